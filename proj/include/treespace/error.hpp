#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace treespace {

enum class ErrorKind {
    DegreeViolation,
    Disconnected,
    Cyclic,
    DuplicateLabel,
    EmptyLabel,
    UnlabelledLeaf,
    UnknownLeaf,
    TooFewLeaves,
    TooManyLeaves,
    NotPerfectSize,
    RangeError,
    InvalidOp,
    SyntaxError,
};

inline std::string_view to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::DegreeViolation: return "DegreeViolation";
    case ErrorKind::Disconnected: return "Disconnected";
    case ErrorKind::Cyclic: return "Cyclic";
    case ErrorKind::DuplicateLabel: return "DuplicateLabel";
    case ErrorKind::EmptyLabel: return "EmptyLabel";
    case ErrorKind::UnlabelledLeaf: return "UnlabelledLeaf";
    case ErrorKind::UnknownLeaf: return "UnknownLeaf";
    case ErrorKind::TooFewLeaves: return "TooFewLeaves";
    case ErrorKind::TooManyLeaves: return "TooManyLeaves";
    case ErrorKind::NotPerfectSize: return "NotPerfectSize";
    case ErrorKind::RangeError: return "RangeError";
    case ErrorKind::InvalidOp: return "InvalidOp";
    case ErrorKind::SyntaxError: return "SyntaxError";
    }
    return "Unknown";
}

/// Every failure raised by the library. Parser errors also carry the byte
/// offset into the input where the problem was detected.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message,
          std::optional<std::size_t> position = std::nullopt)
        : std::runtime_error(format(kind, message, position)),
          kind_(kind),
          position_(position),
          message_(message) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The description without the kind and position prefix.
    const std::string& message() const noexcept { return message_; }
    std::optional<std::size_t> position() const noexcept { return position_; }

private:
    static std::string format(ErrorKind kind, const std::string& message,
                              std::optional<std::size_t> position) {
        std::string out(to_string(kind));
        if (position) {
            out += " at position " + std::to_string(*position);
        }
        out += ": ";
        out += message;
        return out;
    }

    ErrorKind kind_;
    std::optional<std::size_t> position_;
    std::string message_;
};

}  // namespace treespace

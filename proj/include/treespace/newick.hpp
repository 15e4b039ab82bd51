#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "treespace/error.hpp"
#include "treespace/tree.hpp"

namespace treespace {

enum class NewickWarning {
    RootSuppressed,
    BranchLengthsDiscarded,
};

inline std::string_view to_string(NewickWarning w) {
    switch (w) {
    case NewickWarning::RootSuppressed: return "RootSuppressed";
    case NewickWarning::BranchLengthsDiscarded: return "BranchLengthsDiscarded";
    }
    return "Unknown";
}

struct NewickDoc {
    std::string text;
    std::vector<NewickWarning> warnings;
};

struct ParsedNewick {
    PhyloTree tree;
    std::vector<NewickWarning> warnings;
};

namespace detail {

// Recursive-descent reader for a single Newick statement:
//
//   statement := node [':' length] ';'
//   node      := '(' node (',' node)* ')' | label
//   node      := node ':' length          (inside a group)
//
// Internal node labels are rejected.
class NewickReader {
public:
    explicit NewickReader(std::string_view text) : text_(text) {}

    ParsedNewick read() {
        skip_space();
        if (at_end()) {
            fail("expected '(' or a label", pos_);
        }
        Node root = read_node();
        skip_length();
        skip_space();
        expect(';');
        skip_space();
        if (!at_end()) {
            fail("unexpected text after ';'", pos_);
        }
        return assemble(root);
    }

private:
    struct Node {
        VertexId vertex = 0;
        std::size_t position = 0;
        std::vector<VertexId> children;
    };

    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return at_end() ? '\0' : text_[pos_]; }

    [[noreturn]] void fail(const std::string& message, std::size_t position) const {
        throw Error(ErrorKind::SyntaxError, message, position);
    }

    void skip_space() {
        while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    void expect(char c) {
        if (peek() != c) {
            std::string message = "expected '";
            message += c;
            message += "'";
            if (at_end()) {
                message += " but input ended";
            }
            fail(message, pos_);
        }
        ++pos_;
    }

    static bool is_delimiter(char c) {
        return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ',' ||
               c == ';' || c == ':' || c == '[' || c == ']' || c == '\'';
    }

    void skip_length() {
        skip_space();
        if (peek() != ':') {
            return;
        }
        ++pos_;
        skip_space();
        auto start = pos_;
        while (!at_end() && !is_delimiter(text_[pos_])) {
            ++pos_;
        }
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (start == pos_ || ec != std::errc{} || ptr != last) {
            fail("expected a branch length", start);
        }
        saw_length_ = true;
    }

    std::string read_label(std::size_t& start) {
        skip_space();
        start = pos_;
        std::string label;
        if (peek() == '\'') {
            ++pos_;
            while (true) {
                if (at_end()) {
                    fail("unterminated quoted label", start);
                }
                char c = text_[pos_++];
                if (c == '\'') {
                    if (peek() == '\'') {
                        label += '\'';
                        ++pos_;
                        continue;
                    }
                    break;
                }
                label += c;
            }
            if (label.empty()) {
                throw Error(ErrorKind::EmptyLabel, "empty quoted label", start);
            }
            return label;
        }
        while (!at_end() && !is_delimiter(text_[pos_])) {
            char c = text_[pos_++];
            label += (c == '_') ? ' ' : c;
        }
        return label;
    }

    Node read_node() {
        skip_space();
        Node node;
        node.position = pos_;
        node.vertex = static_cast<VertexId>(next_vertex_++);
        if (peek() == '(') {
            ++pos_;
            while (true) {
                Node child = read_node();
                skip_length();
                node.children.push_back(child.vertex);
                nodes_.push_back(std::move(child));
                skip_space();
                if (peek() == ',') {
                    ++pos_;
                    continue;
                }
                if (peek() == ')') {
                    ++pos_;
                    break;
                }
                fail(at_end() ? "expected ',' or ')' but input ended" : "expected ',' or ')'", pos_);
            }
            skip_space();
            if (!at_end() && !is_delimiter(peek())) {
                fail("internal node labels are not supported", pos_);
            }
            if (peek() == '\'') {
                fail("internal node labels are not supported", pos_);
            }
            return node;
        }
        std::size_t start = 0;
        std::string label = read_label(start);
        if (label.empty()) {
            if (peek() == ')' || peek() == ',' || peek() == ':' || peek() == ';' || at_end()) {
                throw Error(ErrorKind::EmptyLabel, "missing leaf label", start);
            }
            fail("expected '(' or a label", start);
        }
        for (const auto& [name, where] : labels_) {
            if (name == label) {
                throw Error(ErrorKind::DuplicateLabel, "label '" + label + "' already used at position " +
                                                           std::to_string(where),
                            start);
            }
        }
        labels_.emplace_back(label, start);
        leaves_.push_back({node.vertex, label});
        return node;
    }

    ParsedNewick assemble(const Node& root) {
        ParsedNewick out;
        nodes_.push_back(root);
        std::vector<const Node*> by_vertex(next_vertex_, nullptr);
        for (const auto& node : nodes_) {
            by_vertex[static_cast<std::size_t>(node.vertex)] = &node;
        }

        std::vector<Edge> edges;
        for (const auto& node : nodes_) {
            if (node.children.empty()) {
                continue;
            }
            bool is_root = node.vertex == root.vertex;
            std::size_t k = node.children.size();
            if (is_root) {
                if (k == 1 || k > 3) {
                    throw Error(ErrorKind::DegreeViolation,
                                "top-level group has " + std::to_string(k) + " children",
                                node.position);
                }
            } else if (k != 2) {
                throw Error(ErrorKind::DegreeViolation,
                            "group has " + std::to_string(k) + " children (vertex degree " +
                                std::to_string(k + 1) + ")",
                            node.position);
            }
            if (is_root && k == 2) {
                edges.emplace_back(node.children[0], node.children[1]);
                out.warnings.push_back(NewickWarning::RootSuppressed);
                continue;
            }
            for (auto child : node.children) {
                edges.emplace_back(node.vertex, child);
            }
        }
        if (saw_length_) {
            out.warnings.push_back(NewickWarning::BranchLengthsDiscarded);
        }
        out.tree = build_tree(edges, leaves_);
        return out;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t next_vertex_ = 0;
    bool saw_length_ = false;
    std::vector<Node> nodes_;
    std::vector<LeafAssignment> leaves_;
    std::vector<std::pair<std::string, std::size_t>> labels_;
};

inline bool needs_quotes(const std::string& label) {
    return std::any_of(label.begin(), label.end(), [](char c) {
        return std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == ')' || c == ',' ||
               c == ';' || c == ':' || c == '[' || c == ']' || c == '\'' || c == '_';
    });
}

inline void write_label(std::string& out, const std::string& label) {
    if (!needs_quotes(label)) {
        out += label;
        return;
    }
    out += '\'';
    for (char c : label) {
        if (c == '\'') {
            out += '\'';
        }
        out += c;
    }
    out += '\'';
}

}  // namespace detail

/// Parses one Newick statement. A bifurcating top level is unrooted by
/// suppressing the degree-two root; branch lengths are read and dropped.
inline ParsedNewick parse_newick(std::string_view text) {
    return detail::NewickReader(text).read();
}

/// Parses one statement per non-blank line.
inline std::vector<ParsedNewick> parse_newick_lines(std::string_view text) {
    std::vector<ParsedNewick> out;
    std::size_t start = 0;
    std::size_t line_number = 0;
    while (start <= text.size()) {
        ++line_number;
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        auto line = text.substr(start, end - start);
        if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
            try {
                out.push_back(parse_newick(line));
            } catch (const Error& e) {
                // report the offset within the whole input
                std::string where = "line " + std::to_string(line_number);
                if (!e.position()) {
                    throw Error(e.kind(), where + ": " + e.message());
                }
                throw Error(e.kind(),
                            where + ", column " + std::to_string(*e.position() + 1) + ": " + e.message(),
                            start + *e.position());
            }
        }
        start = end + 1;
    }
    return out;
}

/// Deterministic Newick text: hung from the internal vertex next to leaf
/// index 0, children ordered by the smallest leaf index below them.
inline std::string serialize_newick(const PhyloTree& tree) {
    const auto n = tree.leaf_count();
    std::string out;
    if (n == 1) {
        detail::write_label(out, tree.leaf_name(0));
        out += ';';
        return out;
    }
    if (n == 2) {
        out += '(';
        detail::write_label(out, tree.leaf_name(0));
        out += ',';
        detail::write_label(out, tree.leaf_name(1));
        out += ");";
        return out;
    }
    const VertexId root = tree.neighbours(0)[0];
    auto rooting = root_at(tree, root);
    auto smallest = [&rooting](VertexId v) {
        return std::countr_zero(rooting.below[static_cast<std::size_t>(v)]);
    };

    auto children_of = [&](VertexId v) {
        std::vector<VertexId> kids;
        for (auto w : tree.neighbours(v)) {
            if (w != rooting.parent[static_cast<std::size_t>(v)]) {
                kids.push_back(w);
            }
        }
        std::sort(kids.begin(), kids.end(),
                  [&](VertexId a, VertexId b) { return smallest(a) < smallest(b); });
        return kids;
    };

    // Explicit stack: (vertex, next child position).
    std::vector<std::pair<VertexId, std::size_t>> stack;
    std::vector<std::vector<VertexId>> kids_cache(tree.vertex_count());
    stack.emplace_back(root, 0);
    kids_cache[static_cast<std::size_t>(root)] = children_of(root);
    out += '(';
    while (!stack.empty()) {
        auto& [v, next] = stack.back();
        const auto& kids = kids_cache[static_cast<std::size_t>(v)];
        if (next == kids.size()) {
            out += ')';
            stack.pop_back();
            continue;
        }
        if (next > 0) {
            out += ',';
        }
        VertexId child = kids[next++];
        if (tree.is_leaf(child)) {
            detail::write_label(out, tree.leaf_name(static_cast<std::size_t>(child)));
        } else {
            kids_cache[static_cast<std::size_t>(child)] = children_of(child);
            out += '(';
            stack.emplace_back(child, 0);
        }
    }
    out += ';';
    return out;
}

inline NewickDoc to_newick_doc(const PhyloTree& tree) { return {serialize_newick(tree), {}}; }

}  // namespace treespace

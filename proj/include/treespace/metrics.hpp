#pragma once

#include <bit>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "treespace/error.hpp"
#include "treespace/tree.hpp"

namespace treespace {

/// Exact integer results. Intermediate products are formed in 128 bits and
/// narrowed with a range check.
using Count = std::int64_t;

/// Largest leaf count accepted by the closed-form functions.
inline constexpr Count kMaxClosedFormLeaves = Count{1} << 20;

namespace detail {

__extension__ typedef __int128 Wide;

inline Count narrow(Wide value) {
    if (value > Wide{INT64_MAX} || value < Wide{INT64_MIN}) {
        throw Error(ErrorKind::RangeError, "closed form overflows 64 bits");
    }
    return static_cast<Count>(value);
}

inline void require_closed_form_n(Count n) {
    if (n < 4) {
        throw Error(ErrorKind::TooFewLeaves, "n = " + std::to_string(n) + " (need n >= 4)");
    }
    if (n > kMaxClosedFormLeaves) {
        throw Error(ErrorKind::RangeError,
                    "n = " + std::to_string(n) + " exceeds " + std::to_string(kMaxClosedFormLeaves));
    }
}

inline void require_tree_n(const PhyloTree& tree) {
    if (tree.leaf_count() < 4) {
        throw Error(ErrorKind::TooFewLeaves,
                    "tree has " + std::to_string(tree.leaf_count()) + " leaves (need n >= 4)");
    }
}

inline Count exact_third(Wide numerator) {
    if (numerator % 3 != 0) {
        throw Error(ErrorKind::RangeError, "internal error: closed form not divisible by 3");
    }
    return narrow(numerator / 3);
}

}  // namespace detail

/// Sum of |A|*|B| over the non-trivial splits A|B, from subtree leaf counts
/// gathered in a single traversal.
inline Count gamma(const PhyloTree& tree) {
    detail::require_tree_n(tree);
    const auto n = static_cast<Count>(tree.leaf_count());
    const auto total = tree.vertex_count();
    std::vector<VertexId> parent(total, -1);
    std::vector<VertexId> order;
    std::vector<Count> leaves_below(total, 0);
    order.reserve(total);
    std::vector<VertexId> stack{0};
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        order.push_back(v);
        for (auto w : tree.neighbours(v)) {
            if (w != parent[static_cast<std::size_t>(v)]) {
                parent[static_cast<std::size_t>(w)] = v;
                stack.push_back(w);
            }
        }
    }
    Count sum = 0;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        auto v = static_cast<std::size_t>(*it);
        if (tree.is_leaf(*it)) {
            leaves_below[v] += 1;
        }
        if (parent[v] < 0) {
            continue;
        }
        leaves_below[static_cast<std::size_t>(parent[v])] += leaves_below[v];
        Count a = leaves_below[v];
        if (a >= 2 && n - a >= 2) {
            sum += a * (n - a);
        }
    }
    return sum;
}

inline Count nni_size(Count n) {
    detail::require_closed_form_n(n);
    return 2 * n - 6;
}

inline Count spr_size(Count n) {
    detail::require_closed_form_n(n);
    return detail::narrow(detail::Wide{2} * (n - 3) * (2 * n - 7));
}

inline Count spr_op_count(Count n) {
    detail::require_closed_form_n(n);
    return detail::narrow(detail::Wide{4} * (n - 2) * (n - 3));
}

/// TBR operation count for a tree with n leaves and the given Gamma.
inline Count tbr_op_count_from_gamma(Count n, Count gamma_value) {
    detail::require_closed_form_n(n);
    return detail::narrow(detail::Wide{4} * gamma_value - detail::Wide{4} * (n - 2) * (n - 3));
}

/// TBR neighbourhood size for a tree with n leaves and the given Gamma.
inline Count tbr_size_from_gamma(Count n, Count gamma_value) {
    detail::require_closed_form_n(n);
    return detail::narrow(detail::Wide{4} * gamma_value - detail::Wide{4 * n - 2} * (n - 3));
}

inline Count tbr_op_count(const PhyloTree& tree) {
    return tbr_op_count_from_gamma(static_cast<Count>(tree.leaf_count()), gamma(tree));
}

inline Count tbr_size(const PhyloTree& tree) {
    return tbr_size_from_gamma(static_cast<Count>(tree.leaf_count()), gamma(tree));
}

/// Largest TBR neighbourhood over all n-leaf trees, attained exactly by
/// caterpillars: (2n^3 - 12n^2 + 16n + 6) / 3.
inline Count caterpillar_tbr_size(Count n) {
    detail::require_closed_form_n(n);
    detail::Wide w = n;
    return detail::exact_third(2 * w * w * w - 12 * w * w + 16 * w + 6);
}

/// Gamma of any caterpillar: sum of i(n-i) for i = 2..n-2, in closed form.
inline Count gamma_caterpillar(Count n) {
    detail::require_closed_form_n(n);
    detail::Wide w = n;
    // sum_{i=1}^{n-1} i(n-i) = (n^3 - n) / 6, minus the two i = 1, n-1 terms.
    detail::Wide total = (w * w * w - w) / 6 - 2 * (w - 1);
    return detail::narrow(total);
}

/// Exponent k such that n = 2^k (k >= 2) or n = 3 * 2^(k-1) (k >= 2), the
/// leaf counts that admit a perfectly balanced tree.
inline std::optional<int> perfect_exponent(Count n) {
    if (n < 4) {
        return std::nullopt;
    }
    auto u = static_cast<std::uint64_t>(n);
    if (std::has_single_bit(u)) {
        return std::countr_zero(u);
    }
    if (u % 3 == 0 && std::has_single_bit(u / 3) && u / 3 >= 2) {
        return std::countr_zero(u / 3) + 1;
    }
    return std::nullopt;
}

inline bool is_perfect_size(Count n) { return perfect_exponent(n).has_value(); }

inline Count perfect_tbr_size(Count n) {
    detail::require_closed_form_n(n);
    auto k = perfect_exponent(n);
    if (!k) {
        throw Error(ErrorKind::NotPerfectSize,
                    "n = " + std::to_string(n) + " is neither 2^k nor 3*2^(k-1)");
    }
    detail::Wide w = n;
    detail::Wide kk = *k;
    if (std::has_single_bit(static_cast<std::uint64_t>(n))) {
        return detail::narrow(w * w * (4 * kk - 13) + 22 * w - 6);
    }
    return detail::narrow(detail::exact_third((12 * kk - 32) * w * w) + 22 * w - 6);
}

/// m = sum alpha_i 2^i with alpha_k = 1.
struct BinaryExpansion {
    Count m = 0;
    std::vector<int> alpha;  // alpha[0] is the lowest bit
    int k = 0;
    int tau = 0;

    /// (sum_{i=j}^{k} alpha_i 2^i) / 2^j, i.e. m with its low j bits cleared,
    /// divided by 2^j.
    Count beta(int j) const {
        if (j < 0 || j > k) {
            throw Error(ErrorKind::RangeError, "beta index " + std::to_string(j) +
                                                   " outside 0.." + std::to_string(k));
        }
        return m >> j;
    }

    /// sum_{i=j}^{k} alpha_i 2^i
    Count high_part(int j) const { return beta(j) << j; }
};

inline BinaryExpansion binary_expansion(Count m) {
    if (m < 1) {
        throw Error(ErrorKind::RangeError, "binary expansion needs m >= 1");
    }
    BinaryExpansion e;
    e.m = m;
    e.k = std::bit_width(static_cast<std::uint64_t>(m)) - 1;
    for (int i = 0; i <= e.k; ++i) {
        e.alpha.push_back(static_cast<int>((m >> i) & 1));
    }
    e.tau = e.k >= 1 ? e.alpha[static_cast<std::size_t>(e.k - 1)] : 0;
    return e;
}

/// 1 when the second-highest bit of m is set.
inline int tau(Count m) { return binary_expansion(m).tau; }

inline Count beta(Count m, int j) { return binary_expansion(m).beta(j); }

/// Gamma of a complete (maximally balanced) tree on n leaves, from the binary
/// expansion of n alone.
inline Count gamma_complete(Count n) {
    detail::require_closed_form_n(n);
    auto e = binary_expansion(n);
    const detail::Wide w = n;
    detail::Wide total = 0;
    for (int j = 1; j <= e.k - 1; ++j) {
        detail::Wide high = e.high_part(j);
        detail::Wide pow_j = detail::Wide{1} << j;
        total += (high - pow_j) * (2 * w - high);
        total += e.alpha[static_cast<std::size_t>(j - 1)] * pow_j * (w - pow_j);
    }
    detail::Wide pow_top = detail::Wide{1} << (e.k - 1);
    total += (e.alpha[static_cast<std::size_t>(e.k - 1)] - 1) * pow_top * (w - pow_top);
    return detail::narrow(total);
}

/// Smallest TBR neighbourhood over all n-leaf trees.
inline Count complete_tbr_size(Count n) { return tbr_size_from_gamma(n, gamma_complete(n)); }

inline int floor_log2(Count n) { return std::bit_width(static_cast<std::uint64_t>(n)) - 1; }

}  // namespace treespace

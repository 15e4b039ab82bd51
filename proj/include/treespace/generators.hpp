#pragma once

#include <cstddef>
#include <cstdint>
#include <iterator>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "treespace/error.hpp"
#include "treespace/metrics.hpp"
#include "treespace/tree.hpp"

namespace treespace {

enum class TreeFamily { Caterpillar, Complete, Perfect, Random };

inline std::string_view to_string(TreeFamily f) {
    switch (f) {
    case TreeFamily::Caterpillar: return "caterpillar";
    case TreeFamily::Complete: return "complete";
    case TreeFamily::Perfect: return "perfect";
    case TreeFamily::Random: return "random";
    }
    return "?";
}

inline TreeFamily parse_family(std::string_view text) {
    if (text == "caterpillar") return TreeFamily::Caterpillar;
    if (text == "complete") return TreeFamily::Complete;
    if (text == "perfect") return TreeFamily::Perfect;
    if (text == "random") return TreeFamily::Random;
    throw Error(ErrorKind::RangeError, "unknown tree family '" + std::string(text) + "'");
}

namespace detail {

inline void require_family_n(std::size_t n) {
    if (n < 4) {
        throw Error(ErrorKind::TooFewLeaves, "n = " + std::to_string(n) + " (need n >= 4)");
    }
    if (n > kMaxLeaves) {
        throw Error(ErrorKind::TooManyLeaves,
                    "n = " + std::to_string(n) + " exceeds " + std::to_string(kMaxLeaves));
    }
}

inline std::vector<LeafAssignment> numbered_leaves(std::size_t n) {
    std::vector<LeafAssignment> leaves;
    for (std::size_t i = 0; i < n; ++i) {
        leaves.push_back({static_cast<VertexId>(i), std::to_string(i + 1)});
    }
    return leaves;
}

// Accumulates a rooted construction: leaves are handed out left to right as
// vertices 0, 1, ..., internal vertices after the leaf block.
struct ShapeBuilder {
    std::size_t n;
    VertexId next_leaf = 0;
    VertexId next_internal;
    std::vector<Edge> edges;

    explicit ShapeBuilder(std::size_t leaf_total)
        : n(leaf_total), next_internal(static_cast<VertexId>(leaf_total)) {}

    VertexId leaf() { return next_leaf++; }

    VertexId join(VertexId left, VertexId right) {
        VertexId v = next_internal++;
        edges.emplace_back(v, left);
        edges.emplace_back(v, right);
        return v;
    }

    // Rooted balanced subtree on m leaves: split off 2^j with
    // 3*2^(j-1) <= m < 3*2^j and recurse on both parts.
    VertexId balanced(std::size_t m) {
        if (m == 1) {
            return leaf();
        }
        if (m == 2) {
            VertexId a = leaf();
            VertexId b = leaf();
            return join(a, b);
        }
        std::size_t j = 0;
        while ((std::size_t{3} << j) <= m) {
            ++j;
        }
        std::size_t power = std::size_t{1} << j;
        VertexId left = balanced(power);
        VertexId right = balanced(m - power);
        return join(left, right);
    }

    VertexId perfect_rooted(std::size_t m) {
        if (m == 1) {
            return leaf();
        }
        VertexId left = perfect_rooted(m / 2);
        VertexId right = perfect_rooted(m / 2);
        return join(left, right);
    }

    PhyloTree finish() const {
        auto leaves = numbered_leaves(n);
        return build_tree(edges, leaves);
    }
};

// Sequential leaf insertion: leaf i (0-based, i >= 3) subdivides edge
// choices[i - 3] of the current tree. Edge order is deterministic: the
// subdivided edge keeps its slot and the two new edges are appended.
inline PhyloTree insertion_tree(std::size_t n, const std::vector<std::size_t>& choices) {
    const VertexId centre = static_cast<VertexId>(n);
    std::vector<Edge> edges{{centre, 0}, {centre, 1}, {centre, 2}};
    VertexId next_internal = centre + 1;
    for (std::size_t i = 3; i < n; ++i) {
        Edge old = edges[choices[i - 3]];
        VertexId w = next_internal++;
        edges[choices[i - 3]] = {old.first, w};
        edges.emplace_back(w, old.second);
        edges.emplace_back(w, static_cast<VertexId>(i));
    }
    auto leaves = numbered_leaves(n);
    return build_tree(edges, leaves);
}

}  // namespace detail

/// Spine of n-2 internal vertices with leaves 1..n attached in order; the
/// cherries are {1,2} and {n-1,n}.
inline PhyloTree caterpillar(std::size_t n) {
    detail::require_family_n(n);
    std::vector<Edge> edges;
    auto spine = [n](std::size_t i) { return static_cast<VertexId>(n + i); };
    const std::size_t spine_len = n - 2;
    for (std::size_t i = 0; i + 1 < spine_len; ++i) {
        edges.emplace_back(spine(i), spine(i + 1));
    }
    edges.emplace_back(spine(0), 0);
    edges.emplace_back(spine(0), 1);
    for (std::size_t i = 1; i + 1 < spine_len; ++i) {
        edges.emplace_back(spine(i), static_cast<VertexId>(i + 1));
    }
    edges.emplace_back(spine(spine_len - 1), static_cast<VertexId>(n - 2));
    edges.emplace_back(spine(spine_len - 1), static_cast<VertexId>(n - 1));
    auto leaves = detail::numbered_leaves(n);
    return build_tree(edges, leaves);
}

/// Maximally balanced tree: a perfect subtree on 2^(k+1) leaves, where
/// 3*2^k <= n < 3*2^(k+1), bridged to a balanced subtree on the rest.
inline PhyloTree complete(std::size_t n) {
    detail::require_family_n(n);
    std::size_t k = 0;
    while (3 * (std::size_t{1} << (k + 1)) <= n) {
        ++k;
    }
    std::size_t block = std::size_t{1} << (k + 1);
    detail::ShapeBuilder b(n);
    VertexId left = b.balanced(block);
    VertexId right = b.balanced(n - block);
    b.edges.emplace_back(left, right);
    return b.finish();
}

/// Fully balanced tree; only n = 2^k or n = 3*2^(k-1) (k >= 2) qualify.
inline PhyloTree perfect(std::size_t n) {
    if (!is_perfect_size(static_cast<Count>(n))) {
        throw Error(ErrorKind::NotPerfectSize,
                    "n = " + std::to_string(n) + " is neither 2^k nor 3*2^(k-1) with k >= 2");
    }
    detail::require_family_n(n);
    detail::ShapeBuilder b(n);
    if (std::has_single_bit(n)) {
        VertexId left = b.perfect_rooted(n / 2);
        VertexId right = b.perfect_rooted(n / 2);
        b.edges.emplace_back(left, right);
    } else {
        VertexId x = b.perfect_rooted(n / 3);
        VertexId y = b.perfect_rooted(n / 3);
        VertexId z = b.perfect_rooted(n / 3);
        VertexId centre = b.next_internal++;
        b.edges.emplace_back(centre, x);
        b.edges.emplace_back(centre, y);
        b.edges.emplace_back(centre, z);
    }
    return b.finish();
}

/// Uniform over all labelled topologies on n leaves: each new leaf lands on
/// one of the current 2i-3 edges with equal probability.
inline PhyloTree random_tree(std::size_t n, std::uint64_t seed) {
    detail::require_family_n(n);
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> choices;
    for (std::size_t i = 3; i < n; ++i) {
        std::uniform_int_distribution<std::size_t> pick(0, 2 * i - 4);
        choices.push_back(pick(rng));
    }
    return detail::insertion_tree(n, choices);
}

inline PhyloTree make_tree(TreeFamily family, std::size_t n, std::uint64_t seed = 0) {
    switch (family) {
    case TreeFamily::Caterpillar: return caterpillar(n);
    case TreeFamily::Complete: return complete(n);
    case TreeFamily::Perfect: return perfect(n);
    case TreeFamily::Random: return random_tree(n, seed);
    }
    throw Error(ErrorKind::RangeError, "unknown family");
}

/// (2n-5)!!, the number of labelled unrooted binary trees on n >= 3 leaves.
inline std::uint64_t tree_count(std::size_t n) {
    std::uint64_t total = 1;
    for (std::size_t f = 3; f + 5 <= 2 * n; f += 2) {
        total *= f;
    }
    return total;
}

inline constexpr std::size_t kMaxEnumerationLeaves = 9;

/// Lazily enumerates every labelled topology on n leaves exactly once, by
/// running the leaf-insertion recursion over all choice sequences.
class AllTrees {
public:
    class iterator {
    public:
        using value_type = PhyloTree;
        using difference_type = std::ptrdiff_t;

        iterator() = default;
        explicit iterator(const AllTrees* owner) : owner_(owner), choices_(owner->n_ - 3, 0) {
            current_ = detail::insertion_tree(owner_->n_, choices_);
        }

        const PhyloTree& operator*() const { return *current_; }
        const PhyloTree* operator->() const { return &*current_; }

        iterator& operator++() {
            // Odometer over choices: position p ranges over 2(p+3)-3 edges.
            std::size_t p = choices_.size();
            while (p > 0) {
                --p;
                if (++choices_[p] < 2 * (p + 3) - 3) {
                    current_ = detail::insertion_tree(owner_->n_, choices_);
                    return *this;
                }
                choices_[p] = 0;
            }
            current_.reset();
            return *this;
        }

        void operator++(int) { ++*this; }

        bool operator==(std::default_sentinel_t) const { return !current_.has_value(); }

    private:
        const AllTrees* owner_ = nullptr;
        std::vector<std::size_t> choices_;
        std::optional<PhyloTree> current_;
    };

    explicit AllTrees(std::size_t n) : n_(n) {
        if (n < 4 || n > kMaxEnumerationLeaves) {
            throw Error(ErrorKind::RangeError, "exhaustive enumeration supports 4 <= n <= " +
                                                   std::to_string(kMaxEnumerationLeaves) +
                                                   ", got " + std::to_string(n));
        }
    }

    iterator begin() const { return iterator(this); }
    std::default_sentinel_t end() const { return {}; }
    std::uint64_t size() const { return tree_count(n_); }

private:
    std::size_t n_;
};

inline AllTrees all_trees(std::size_t n) { return AllTrees(n); }

inline std::vector<PhyloTree> collect_all_trees(std::size_t n) {
    std::vector<PhyloTree> out;
    for (const auto& t : all_trees(n)) {
        out.push_back(t);
    }
    return out;
}

}  // namespace treespace

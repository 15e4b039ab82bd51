#pragma once

#include <algorithm>
#include <cstddef>
#include <set>
#include <vector>

#include "treespace/error.hpp"
#include "treespace/generators.hpp"
#include "treespace/metrics.hpp"
#include "treespace/parallel.hpp"
#include "treespace/tree.hpp"

namespace treespace {

/// Every internal vertex has at least one leaf neighbour.
inline bool is_caterpillar(const PhyloTree& tree) {
    detail::require_tree_n(tree);
    for (std::size_t v = tree.leaf_count(); v < tree.vertex_count(); ++v) {
        auto nb = tree.neighbours(static_cast<VertexId>(v));
        if (std::none_of(nb.begin(), nb.end(), [&tree](VertexId w) { return tree.is_leaf(w); })) {
            return false;
        }
    }
    return true;
}

/// With 3*2^k <= n < 3*2^(k+1): some cluster has exactly 2^(k+1) leaves, and
/// every cluster Y with 2 <= |Y| <= 2^(k+1) is the union of two clusters Y1, Y2
/// with |Y1| = 2^j and 2^(j-1) <= |Y2| < 2^(j+1) for some j.
inline bool is_complete(const PhyloTree& tree) {
    detail::require_tree_n(tree);
    const std::size_t n = tree.leaf_count();
    std::size_t k = 0;
    while (3 * (std::size_t{1} << (k + 1)) <= n) {
        ++k;
    }
    const std::size_t block = std::size_t{1} << (k + 1);

    auto all = clusters(tree);
    bool has_block = std::any_of(all.begin(), all.end(),
                                 [block](const Cluster& c) { return c.size() == block; });
    if (!has_block) {
        return false;
    }
    auto is_cluster = [&all](LeafMask m) {
        return std::binary_search(all.begin(), all.end(), Cluster{m});
    };
    auto balanced_pair = [](std::size_t y1, std::size_t y2) {
        if (!std::has_single_bit(y1)) {
            return false;
        }
        // y1 = 2^j; require 2^(j-1) <= y2 < 2^(j+1)
        return 2 * y2 >= y1 && y2 < 2 * y1;
    };
    for (const auto& y : all) {
        if (y.size() < 2 || y.size() > block) {
            continue;
        }
        bool ok = false;
        for (const auto& y1 : all) {
            if (y1.mask == y.mask || (y1.mask & ~y.mask) != 0) {
                continue;
            }
            LeafMask rest = y.mask & ~y1.mask;
            if (is_cluster(rest) &&
                balanced_pair(y1.size(), static_cast<std::size_t>(popcount(rest)))) {
                ok = true;
                break;
            }
        }
        if (!ok) {
            return false;
        }
    }
    return true;
}

struct ExtremalScanResult {
    std::size_t n = 0;
    std::size_t trees_scanned = 0;
    Count max_value = 0;
    Count min_value = 0;
    Count max_gamma = 0;
    Count min_gamma = 0;
    std::set<CanonicalForm> argmax_forms;
    std::set<CanonicalForm> argmin_forms;
    std::set<CanonicalForm> caterpillar_forms;
    std::set<CanonicalForm> complete_forms;
    /// argmax set equals the set of caterpillars
    bool argmax_all_caterpillar = false;
    /// argmin set equals the set of complete trees
    bool argmin_all_complete = false;
};

inline constexpr std::size_t kMaxScanLeaves = 8;

/// Exhaustive pass over every tree on n leaves, comparing the trees that
/// attain the largest and smallest TBR neighbourhood with the caterpillar and
/// completeness predicates.
inline ExtremalScanResult extremal_scan(std::size_t n, unsigned threads = 1) {
    if (n < 4 || n > kMaxScanLeaves) {
        throw Error(ErrorKind::RangeError, "extremal scan supports 4 <= n <= " +
                                               std::to_string(kMaxScanLeaves) + ", got " +
                                               std::to_string(n));
    }
    auto trees = collect_all_trees(n);

    struct Row {
        Count tbr = 0;
        Count gamma = 0;
        bool caterpillar = false;
        bool complete = false;
    };
    std::vector<Row> rows(trees.size());
    parallel_chunks(trees.size(), threads, [&](std::size_t begin, std::size_t end, unsigned) {
        for (std::size_t i = begin; i < end; ++i) {
            rows[i].gamma = gamma(trees[i]);
            rows[i].tbr = tbr_size(trees[i]);
            rows[i].caterpillar = is_caterpillar(trees[i]);
            rows[i].complete = is_complete(trees[i]);
        }
    });

    ExtremalScanResult r;
    r.n = n;
    r.trees_scanned = trees.size();
    r.max_value = rows.front().tbr;
    r.min_value = rows.front().tbr;
    r.max_gamma = rows.front().gamma;
    r.min_gamma = rows.front().gamma;
    for (const auto& row : rows) {
        r.max_value = std::max(r.max_value, row.tbr);
        r.min_value = std::min(r.min_value, row.tbr);
        r.max_gamma = std::max(r.max_gamma, row.gamma);
        r.min_gamma = std::min(r.min_gamma, row.gamma);
    }
    for (std::size_t i = 0; i < trees.size(); ++i) {
        auto form = canonical_form(trees[i]);
        if (rows[i].tbr == r.max_value) r.argmax_forms.insert(form);
        if (rows[i].tbr == r.min_value) r.argmin_forms.insert(form);
        if (rows[i].caterpillar) r.caterpillar_forms.insert(form);
        if (rows[i].complete) r.complete_forms.insert(form);
    }
    r.argmax_all_caterpillar = r.argmax_forms == r.caterpillar_forms;
    r.argmin_all_complete = r.argmin_forms == r.complete_forms;
    return r;
}

}  // namespace treespace

#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "treespace/error.hpp"

namespace treespace {

/// Structural operations work on at most this many leaves so that a split
/// fits a single 64-bit mask.
inline constexpr std::size_t kMaxLeaves = 64;

using LeafMask = std::uint64_t;
using VertexId = int;
using Edge = std::pair<VertexId, VertexId>;

inline constexpr LeafMask bit(std::size_t index) { return LeafMask{1} << index; }

inline constexpr LeafMask low_bits(std::size_t count) {
    return count >= 64 ? ~LeafMask{0} : bit(count) - 1;
}

inline int popcount(LeafMask mask) { return std::popcount(mask); }

struct LeafLabel {
    std::string name;
    std::size_t index = 0;

    auto operator<=>(const LeafLabel&) const = default;
};

/// A bipartition of the leaf set. The stored mask is the side that does not
/// contain leaf index 0.
struct Split {
    LeafMask mask = 0;
    std::size_t n = 0;

    std::size_t side_size() const { return static_cast<std::size_t>(popcount(mask)); }
    std::size_t other_size() const { return n - side_size(); }
    LeafMask complement() const { return low_bits(n) & ~mask; }
    bool trivial() const { return side_size() == 1 || other_size() == 1; }

    static Split normalized(LeafMask side, std::size_t n) {
        LeafMask all = low_bits(n);
        side &= all;
        return Split{(side & 1) ? (all & ~side) : side, n};
    }

    auto operator<=>(const Split&) const = default;
};

struct Cluster {
    LeafMask mask = 0;

    std::size_t size() const { return static_cast<std::size_t>(popcount(mask)); }
    auto operator<=>(const Cluster&) const = default;
};

/// Order-independent fingerprint of a labelled tree: its leaf names and the
/// sorted masks of all 2n-3 splits.
struct CanonicalForm {
    std::vector<std::string> leaf_names;
    std::vector<LeafMask> split_masks;

    auto operator<=>(const CanonicalForm&) const = default;
};

struct LeafAssignment {
    VertexId vertex = 0;
    std::string name;
};

namespace detail {

inline bool is_integer_label(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(),
                                     [](char c) { return c >= '0' && c <= '9'; });
}

inline std::string_view strip_zeros(std::string_view s) {
    std::size_t i = 0;
    while (i + 1 < s.size() && s[i] == '0') {
        ++i;
    }
    return s.substr(i);
}

inline bool numeric_less(std::string_view a, std::string_view b) {
    auto sa = strip_zeros(a);
    auto sb = strip_zeros(b);
    if (sa.size() != sb.size()) {
        return sa.size() < sb.size();
    }
    if (sa != sb) {
        return sa < sb;
    }
    return a < b;
}

}  // namespace detail

/// Sorts leaf names into index order: numerically when every name is an
/// integer, lexicographically otherwise.
inline void sort_leaf_names(std::vector<std::string>& names) {
    bool numeric = std::all_of(names.begin(), names.end(),
                               [](const std::string& s) { return detail::is_integer_label(s); });
    if (numeric) {
        std::sort(names.begin(), names.end(), [](const std::string& a, const std::string& b) {
            return detail::numeric_less(a, b);
        });
    } else {
        std::sort(names.begin(), names.end());
    }
}

class PhyloTree;
PhyloTree build_tree(std::span<const Edge> edges, std::span<const LeafAssignment> leaves);

/// Unrooted binary tree on uniquely labelled leaves.
///
/// Vertices are renumbered on construction: leaf vertices are 0..n-1 and
/// coincide with leaf indices, internal vertices are n..2n-3. Instances are
/// immutable; every rearrangement produces a new tree.
class PhyloTree {
public:
    PhyloTree() = default;

    std::size_t leaf_count() const { return names_.size(); }
    std::size_t vertex_count() const { return degree_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }

    bool is_leaf(VertexId v) const { return static_cast<std::size_t>(v) < leaf_count(); }
    int degree(VertexId v) const { return degree_[static_cast<std::size_t>(v)]; }

    std::span<const VertexId> neighbours(VertexId v) const {
        auto idx = static_cast<std::size_t>(v);
        return {adjacency_[idx].data(), static_cast<std::size_t>(degree_[idx])};
    }

    const std::vector<std::string>& leaf_names() const { return names_; }
    const std::string& leaf_name(std::size_t index) const { return names_.at(index); }

    LeafLabel leaf_label(std::size_t index) const { return {names_.at(index), index}; }

    std::optional<std::size_t> leaf_index(std::string_view name) const {
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (names_[i] == name) {
                return i;
            }
        }
        return std::nullopt;
    }

    LeafMask all_leaves() const { return low_bits(leaf_count()); }

    LeafMask mask_of(std::span<const std::string> names) const {
        LeafMask mask = 0;
        for (const auto& name : names) {
            auto idx = leaf_index(name);
            if (!idx) {
                throw Error(ErrorKind::UnknownLeaf, "leaf '" + name + "' is not in the tree");
            }
            mask |= bit(*idx);
        }
        return mask;
    }

    /// Leaf names of a mask, in index order.
    std::vector<std::string> names_of(LeafMask mask) const {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < names_.size(); ++i) {
            if (mask & bit(i)) {
                out.push_back(names_[i]);
            }
        }
        return out;
    }

private:
    friend PhyloTree build_tree(std::span<const Edge>, std::span<const LeafAssignment>);

    std::vector<std::string> names_;
    std::vector<std::array<VertexId, 3>> adjacency_;
    std::vector<int> degree_;
    std::vector<Edge> edges_;
};

namespace detail {

struct DisjointSets {
    std::vector<std::size_t> parent;

    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }

    bool unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) {
            return false;
        }
        parent[a] = b;
        return true;
    }
};

}  // namespace detail

/// Validates a graph description and returns the tree it encodes.
///
/// `edges` may use arbitrary vertex ids; `leaves` names the degree-one
/// vertices. Structure is checked before degrees, so a forest is reported
/// as Disconnected even when its pieces also violate the degree rule.
inline PhyloTree build_tree(std::span<const Edge> edges, std::span<const LeafAssignment> leaves) {
    if (leaves.empty()) {
        throw Error(ErrorKind::RangeError, "a tree needs at least one leaf");
    }
    if (leaves.size() > kMaxLeaves) {
        throw Error(ErrorKind::TooManyLeaves,
                    std::to_string(leaves.size()) + " leaves exceeds the limit of " +
                        std::to_string(kMaxLeaves));
    }

    std::map<VertexId, std::size_t> dense;
    auto intern = [&dense](VertexId v) {
        auto [it, inserted] = dense.emplace(v, dense.size());
        return it->second;
    };
    for (const auto& leaf : leaves) {
        intern(leaf.vertex);
    }
    for (const auto& [a, b] : edges) {
        intern(a);
        intern(b);
    }
    const std::size_t vertex_total = dense.size();

    std::vector<std::optional<std::string>> label(vertex_total);
    {
        std::vector<std::string> seen;
        for (const auto& leaf : leaves) {
            if (leaf.name.empty()) {
                throw Error(ErrorKind::EmptyLabel, "leaf at vertex " + std::to_string(leaf.vertex));
            }
            if (std::find(seen.begin(), seen.end(), leaf.name) != seen.end()) {
                throw Error(ErrorKind::DuplicateLabel, "label '" + leaf.name + "' used twice");
            }
            seen.push_back(leaf.name);
            auto& slot = label[dense.at(leaf.vertex)];
            if (slot) {
                throw Error(ErrorKind::DuplicateLabel,
                            "vertex " + std::to_string(leaf.vertex) + " labelled twice");
            }
            slot = leaf.name;
        }
    }

    detail::DisjointSets sets(vertex_total);
    std::vector<std::vector<std::size_t>> adj(vertex_total);
    for (const auto& [a, b] : edges) {
        auto da = dense.at(a);
        auto db = dense.at(b);
        if (!sets.unite(da, db)) {
            throw Error(ErrorKind::Cyclic, "edge (" + std::to_string(a) + "," + std::to_string(b) +
                                               ") closes a cycle");
        }
        adj[da].push_back(db);
        adj[db].push_back(da);
    }
    {
        auto root = sets.find(0);
        for (std::size_t v = 1; v < vertex_total; ++v) {
            if (sets.find(v) != root) {
                throw Error(ErrorKind::Disconnected, "graph has more than one component");
            }
        }
    }

    std::vector<VertexId> original(vertex_total);
    for (const auto& [id, idx] : dense) {
        original[idx] = id;
    }
    if (vertex_total > 1) {
        for (std::size_t v = 0; v < vertex_total; ++v) {
            std::size_t deg = adj[v].size();
            if (label[v] && deg != 1) {
                throw Error(ErrorKind::DegreeViolation,
                            "leaf '" + *label[v] + "' has degree " + std::to_string(deg));
            }
            if (!label[v] && deg == 1) {
                throw Error(ErrorKind::UnlabelledLeaf,
                            "vertex " + std::to_string(original[v]) + " has degree 1 but no label");
            }
            if (!label[v] && deg != 3) {
                throw Error(ErrorKind::DegreeViolation, "internal vertex " +
                                                            std::to_string(original[v]) +
                                                            " has degree " + std::to_string(deg));
            }
        }
    }

    std::vector<std::string> names;
    names.reserve(leaves.size());
    for (const auto& leaf : leaves) {
        names.push_back(leaf.name);
    }
    sort_leaf_names(names);

    const std::size_t n = names.size();
    std::vector<VertexId> renumber(vertex_total, -1);
    VertexId next_internal = static_cast<VertexId>(n);
    for (std::size_t v = 0; v < vertex_total; ++v) {
        if (label[v]) {
            auto pos = std::find(names.begin(), names.end(), *label[v]) - names.begin();
            renumber[v] = static_cast<VertexId>(pos);
        } else {
            renumber[v] = next_internal++;
        }
    }

    PhyloTree tree;
    tree.names_ = std::move(names);
    tree.adjacency_.assign(vertex_total, {-1, -1, -1});
    tree.degree_.assign(vertex_total, 0);
    for (std::size_t v = 0; v < vertex_total; ++v) {
        auto nv = static_cast<std::size_t>(renumber[v]);
        for (auto w : adj[v]) {
            tree.adjacency_[nv][static_cast<std::size_t>(tree.degree_[nv]++)] = renumber[w];
        }
        std::sort(tree.adjacency_[nv].begin(), tree.adjacency_[nv].begin() + tree.degree_[nv]);
    }
    tree.edges_.reserve(edges.size());
    for (const auto& [a, b] : edges) {
        auto ra = renumber[dense.at(a)];
        auto rb = renumber[dense.at(b)];
        tree.edges_.emplace_back(std::min(ra, rb), std::max(ra, rb));
    }
    std::sort(tree.edges_.begin(), tree.edges_.end());
    return tree;
}

inline PhyloTree build_tree(std::span<const Edge> edges, std::span<const std::string> leaf_names,
                            std::span<const VertexId> leaf_vertices) {
    std::vector<LeafAssignment> leaves;
    for (std::size_t i = 0; i < leaf_names.size(); ++i) {
        leaves.push_back({leaf_vertices[i], leaf_names[i]});
    }
    return build_tree(edges, leaves);
}

/// The tree hung from one vertex: parent links, a preorder, and for each
/// vertex the mask of leaves at or below it.
struct Rooting {
    VertexId root = 0;
    std::vector<VertexId> parent;
    std::vector<VertexId> preorder;
    std::vector<LeafMask> below;
};

inline Rooting root_at(const PhyloTree& tree, VertexId root) {
    Rooting r;
    r.root = root;
    r.parent.assign(tree.vertex_count(), -1);
    r.below.assign(tree.vertex_count(), 0);
    r.preorder.reserve(tree.vertex_count());
    std::vector<VertexId> stack{root};
    while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        r.preorder.push_back(v);
        for (auto w : tree.neighbours(v)) {
            if (w != r.parent[static_cast<std::size_t>(v)]) {
                r.parent[static_cast<std::size_t>(w)] = v;
                stack.push_back(w);
            }
        }
    }
    for (auto it = r.preorder.rbegin(); it != r.preorder.rend(); ++it) {
        auto v = static_cast<std::size_t>(*it);
        if (tree.is_leaf(*it)) {
            r.below[v] |= bit(v);
        }
        if (r.parent[v] >= 0) {
            r.below[static_cast<std::size_t>(r.parent[v])] |= r.below[v];
        }
    }
    return r;
}

/// One split per edge, sorted by mask.
inline std::vector<Split> splits(const PhyloTree& tree) {
    std::vector<Split> out;
    const auto n = tree.leaf_count();
    if (n < 2) {
        return out;
    }
    auto rooting = root_at(tree, 0);
    out.reserve(tree.edges().size());
    for (auto v : rooting.preorder) {
        if (v != rooting.root) {
            out.push_back(Split{rooting.below[static_cast<std::size_t>(v)], n});
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline CanonicalForm canonical_form(const PhyloTree& tree) {
    CanonicalForm form;
    form.leaf_names = tree.leaf_names();
    for (const auto& s : splits(tree)) {
        form.split_masks.push_back(s.mask);
    }
    return form;
}

/// Both sides of every split.
inline std::vector<Cluster> clusters(const PhyloTree& tree) {
    std::vector<Cluster> out;
    for (const auto& s : splits(tree)) {
        out.push_back({s.mask});
        out.push_back({s.complement()});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

inline bool is_cherry(const PhyloTree& tree, LeafMask pair) {
    if (popcount(pair) != 2) {
        return false;
    }
    auto all = clusters(tree);
    return std::binary_search(all.begin(), all.end(), Cluster{pair});
}

inline bool is_cherry(const PhyloTree& tree, const std::string& a, const std::string& b) {
    std::vector<std::string> pair{a, b};
    return is_cherry(tree, tree.mask_of(pair));
}

inline std::vector<Cluster> cherries(const PhyloTree& tree) {
    std::vector<Cluster> out;
    for (const auto& c : clusters(tree)) {
        if (c.size() == 2) {
            out.push_back(c);
        }
    }
    return out;
}

/// The minimal subtree connecting the leaves in `keep`, with degree-two
/// vertices suppressed. One or two kept leaves give the bare leaf or a single
/// edge.
inline PhyloTree restrict_to(const PhyloTree& tree, LeafMask keep) {
    keep &= tree.all_leaves();
    if (keep == 0) {
        throw Error(ErrorKind::RangeError, "restriction to an empty leaf set");
    }
    const auto total = tree.vertex_count();
    std::vector<std::vector<VertexId>> adj(total);
    for (std::size_t v = 0; v < total; ++v) {
        auto nb = tree.neighbours(static_cast<VertexId>(v));
        adj[v].assign(nb.begin(), nb.end());
    }
    std::vector<bool> alive(total, true);
    auto erase_link = [&adj](VertexId from, VertexId to) {
        auto& list = adj[static_cast<std::size_t>(from)];
        list.erase(std::find(list.begin(), list.end(), to));
    };

    std::vector<VertexId> pending;
    auto kept = [&](VertexId v) {
        return tree.is_leaf(v) && (keep & bit(static_cast<std::size_t>(v)));
    };
    for (std::size_t v = 0; v < total; ++v) {
        if (!kept(static_cast<VertexId>(v)) && adj[v].size() <= 1) {
            pending.push_back(static_cast<VertexId>(v));
        }
    }
    while (!pending.empty()) {
        auto v = pending.back();
        pending.pop_back();
        auto idx = static_cast<std::size_t>(v);
        if (!alive[idx] || adj[idx].size() > 1) {
            continue;
        }
        alive[idx] = false;
        for (auto w : adj[idx]) {
            erase_link(w, v);
            if (!kept(w) && adj[static_cast<std::size_t>(w)].size() <= 1) {
                pending.push_back(w);
            }
        }
        adj[idx].clear();
    }

    for (std::size_t v = 0; v < total; ++v) {
        if (alive[v] && !tree.is_leaf(static_cast<VertexId>(v)) && adj[v].size() == 2) {
            auto a = adj[v][0];
            auto b = adj[v][1];
            erase_link(a, static_cast<VertexId>(v));
            erase_link(b, static_cast<VertexId>(v));
            adj[static_cast<std::size_t>(a)].push_back(b);
            adj[static_cast<std::size_t>(b)].push_back(a);
            adj[v].clear();
            alive[v] = false;
        }
    }

    std::vector<Edge> edges;
    std::vector<LeafAssignment> leaves;
    for (std::size_t v = 0; v < total; ++v) {
        if (!alive[v]) {
            continue;
        }
        if (kept(static_cast<VertexId>(v))) {
            leaves.push_back({static_cast<VertexId>(v), tree.leaf_name(v)});
        }
        for (auto w : adj[v]) {
            if (static_cast<std::size_t>(w) > v) {
                edges.emplace_back(static_cast<VertexId>(v), w);
            }
        }
    }
    return build_tree(edges, leaves);
}

inline PhyloTree restrict_to(const PhyloTree& tree, std::span<const std::string> names) {
    return restrict_to(tree, tree.mask_of(names));
}

}  // namespace treespace

template <>
struct std::hash<treespace::CanonicalForm> {
    std::size_t operator()(const treespace::CanonicalForm& form) const noexcept {
        std::size_t h = 0xcbf29ce484222325ULL;
        for (auto m : form.split_masks) {
            h ^= std::hash<std::uint64_t>{}(m) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        for (const auto& s : form.leaf_names) {
            h ^= std::hash<std::string>{}(s) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        }
        return h;
    }
};

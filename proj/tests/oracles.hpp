#pragma once

// Brute-force reference implementations used to cross-check the library.
// They work on a plain adjacency list and share no code with the library
// beyond reading the input tree's edge list.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "treespace/tree.hpp"

namespace oracle {

using Mask = std::uint64_t;
using SplitSet = std::vector<Mask>;  // sorted, each mask without leaf 0

struct Graph {
    int n = 0;  // leaves are vertices 0..n-1
    std::vector<std::vector<int>> adj;

    int add_vertex() {
        adj.emplace_back();
        return static_cast<int>(adj.size()) - 1;
    }
    void link(int a, int b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    void unlink(int a, int b) {
        adj[a].erase(std::find(adj[a].begin(), adj[a].end(), b));
        adj[b].erase(std::find(adj[b].begin(), adj[b].end(), a));
    }
    std::vector<std::pair<int, int>> edge_list() const {
        std::vector<std::pair<int, int>> out;
        for (int v = 0; v < static_cast<int>(adj.size()); ++v) {
            for (int w : adj[v]) {
                if (v < w) out.emplace_back(v, w);
            }
        }
        return out;
    }
};

inline Graph to_graph(const treespace::PhyloTree& t) {
    Graph g;
    g.n = static_cast<int>(t.leaf_count());
    g.adj.resize(t.vertex_count());
    for (auto [a, b] : t.edges()) {
        g.link(a, b);
    }
    return g;
}

inline Mask full(int n) { return n == 64 ? ~Mask{0} : (Mask{1} << n) - 1; }

// Leaves reachable from `from` without stepping back to `parent`.
inline Mask leaves_beyond(const Graph& g, int parent, int from) {
    Mask out = 0;
    std::vector<std::pair<int, int>> stack{{parent, from}};
    while (!stack.empty()) {
        auto [p, v] = stack.back();
        stack.pop_back();
        if (v < g.n) out |= Mask{1} << v;
        for (int w : g.adj[v]) {
            if (w != p) stack.emplace_back(v, w);
        }
    }
    return out;
}

inline Mask normalise(Mask side, Mask universe) {
    Mask low = universe & (~universe + 1);
    return (side & low) ? (universe & ~side) : side;
}

inline SplitSet split_set(const Graph& g) {
    SplitSet out;
    for (auto [a, b] : g.edge_list()) {
        out.push_back(normalise(leaves_beyond(g, a, b), full(g.n)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

inline SplitSet split_set(const treespace::PhyloTree& t) { return split_set(to_graph(t)); }

inline std::int64_t gamma(const treespace::PhyloTree& t) {
    std::int64_t total = 0;
    const auto n = static_cast<std::int64_t>(t.leaf_count());
    for (Mask s : split_set(t)) {
        std::int64_t a = std::popcount(s);
        if (a >= 2 && n - a >= 2) total += a * (n - a);
    }
    return total;
}

// Splits of T restricted to the leaf subset Y, normalised within Y.
inline std::set<Mask> restricted(const SplitSet& splits, Mask y) {
    std::set<Mask> out;
    for (Mask s : splits) {
        Mask part = s & y;
        if (part != 0 && part != y) out.insert(normalise(part, y));
    }
    return out;
}

inline bool agree_on(const SplitSet& a, const SplitSet& b, Mask y) {
    return restricted(a, y) == restricted(b, y);
}

// T' is one TBR away from T iff they share a split X1|X2 and agree on both
// sides.
inline bool tbr_adjacent(const SplitSet& t, const SplitSet& u, int n) {
    if (t == u) return false;
    for (Mask s : t) {
        if (!std::binary_search(u.begin(), u.end(), s)) continue;
        Mask other = full(n) & ~s;
        if (agree_on(t, u, s) && agree_on(t, u, other)) return true;
    }
    return false;
}

// As above, with one side additionally keeping its position relative to a
// single leaf of the other side.
inline bool spr_adjacent(const SplitSet& t, const SplitSet& u, int n) {
    if (t == u) return false;
    for (Mask s : t) {
        if (!std::binary_search(u.begin(), u.end(), s)) continue;
        Mask other = full(n) & ~s;
        if (!agree_on(t, u, s) || !agree_on(t, u, other)) continue;
        for (auto [x1, x2] : {std::pair{s, other}, std::pair{other, s}}) {
            Mask anchor = x1 & (~x1 + 1);
            if (agree_on(t, u, x2 | anchor)) return true;
        }
    }
    return false;
}

// Binary trees on the same leaves that differ in exactly one split.
inline bool nni_adjacent(const SplitSet& t, const SplitSet& u) {
    std::vector<Mask> diff;
    std::set_symmetric_difference(t.begin(), t.end(), u.begin(), u.end(), std::back_inserter(diff));
    return diff.size() == 2;
}

// NNI neighbours by swapping subtrees across each internal edge.
inline std::set<SplitSet> nni_neighbourhood(const treespace::PhyloTree& t) {
    Graph g = to_graph(t);
    SplitSet base = split_set(g);
    std::set<SplitSet> out;
    for (auto [u, v] : g.edge_list()) {
        if (u < g.n || v < g.n) continue;
        std::vector<Mask> near, far;
        for (int w : g.adj[u]) if (w != v) near.push_back(leaves_beyond(g, u, w));
        for (int w : g.adj[v]) if (w != u) far.push_back(leaves_beyond(g, v, w));
        Mask old = normalise(near[0] | near[1], full(g.n));
        for (Mask c : far) {
            SplitSet next;
            for (Mask s : base) if (s != old) next.push_back(s);
            next.push_back(normalise(near[0] | c, full(g.n)));
            std::sort(next.begin(), next.end());
            out.insert(next);
        }
    }
    return out;
}

struct TbrEnumeration {
    std::map<SplitSet, int> multiplicity;  // output -> number of operations
    std::map<SplitSet, int> spr_outputs;   // outputs of prune-and-regraft moves
    std::int64_t operations = 0;
    std::int64_t identities = 0;  // reconnections that rebuild T
};

// Every bisection, every pair of reconnection points. Reconnection points
// of a component are its edges after the cut vertex is smoothed away, or
// the bare leaf when the component is a single leaf.
inline TbrEnumeration enumerate_tbr(const treespace::PhyloTree& t) {
    Graph g = to_graph(t);
    const SplitSet base = split_set(g);
    TbrEnumeration result;

    struct Side {
        std::vector<std::pair<int, int>> edges;  // smoothed component edges
        std::vector<std::pair<int, int>> slots;  // (a, b) edge, or (leaf, -1)
        std::pair<int, int> scar{-1, -1};
    };
    auto side_of = [&g](int cut, int across) {
        // component containing `cut` once edge (cut, across) is gone
        Side s;
        std::set<int> comp{cut};
        std::vector<int> stack{cut};
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            for (int w : g.adj[v]) {
                if (w != across && comp.insert(w).second) stack.push_back(w);
            }
        }
        std::vector<std::pair<int, int>> edges;
        for (int v : comp) {
            for (int w : g.adj[v]) {
                if (v < w && comp.count(w)) edges.emplace_back(v, w);
            }
        }
        if (cut < g.n) {
            s.slots.push_back({cut, -1});
            return s;
        }
        std::vector<int> ends;
        for (auto [a, b] : edges) {
            if (a == cut) ends.push_back(b);
            else if (b == cut) ends.push_back(a);
            else s.edges.emplace_back(a, b);
        }
        s.scar = {std::min(ends[0], ends[1]), std::max(ends[0], ends[1])};
        s.edges.push_back(s.scar);
        s.slots = s.edges;
        return s;
    };

    for (auto [u, v] : g.edge_list()) {
        Side a = side_of(u, v);
        Side b = side_of(v, u);
        for (auto sa : a.slots) {
            for (auto sb : b.slots) {
                Graph h;
                h.n = g.n;
                h.adj.resize(g.adj.size());
                for (const Side* side : {&a, &b}) {
                    for (auto [x, y] : side->edges) h.link(x, y);
                }
                auto attach = [&h](std::pair<int, int> slot) {
                    if (slot.second < 0) return slot.first;
                    int w = h.add_vertex();
                    h.unlink(slot.first, slot.second);
                    h.link(slot.first, w);
                    h.link(w, slot.second);
                    return w;
                };
                int pa = attach(sa);
                int pb = attach(sb);
                h.link(pa, pb);
                SplitSet out = split_set(h);
                if (out == base) {
                    ++result.identities;
                    continue;
                }
                ++result.operations;
                ++result.multiplicity[out];
                bool a_fixed = sa.second < 0 || sa == a.scar;
                bool b_fixed = sb.second < 0 || sb == b.scar;
                if (a_fixed || b_fixed) ++result.spr_outputs[out];
            }
        }
    }
    return result;
}

// Gamma of a caterpillar: the non-trivial splits separate the first i
// leaves along the spine for 2 <= i <= n-2.
inline std::int64_t caterpillar_gamma(std::int64_t n) {
    std::int64_t total = 0;
    for (std::int64_t i = 2; i <= n - 2; ++i) total += i * (n - i);
    return total;
}

// Cluster sizes of the rooted balanced tree on m leaves, excluding m itself.
inline void balanced_cluster_sizes(std::int64_t m, std::vector<std::int64_t>& out) {
    if (m <= 1) return;
    std::int64_t p = 1;
    while (3 * (2 * p) <= 2 * m) p *= 2;  // largest 2^j <= 2m/3
    for (std::int64_t part : {p, m - p}) {
        out.push_back(part);
        balanced_cluster_sizes(part, out);
    }
}

// Gamma of the complete tree on n leaves from its recursive shape.
inline std::int64_t complete_gamma(std::int64_t n) {
    std::int64_t block = 2;
    while (3 * block <= n) block *= 2;  // block = 2^(k+1) with 3*2^k <= n < 3*2^(k+1)
    std::vector<std::int64_t> sizes{block};
    balanced_cluster_sizes(block, sizes);
    balanced_cluster_sizes(n - block, sizes);
    std::int64_t total = 0;
    for (std::int64_t c : sizes) {
        if (c >= 2 && n - c >= 2) total += c * (n - c);
    }
    return total;
}

// (2n-5)!! by the recursion t(n) = (2n-5) t(n-1).
inline std::uint64_t tree_count(int n) {
    std::uint64_t t = 1;
    for (int k = 4; k <= n; ++k) t *= static_cast<std::uint64_t>(2 * k - 5);
    return t;
}

}  // namespace oracle

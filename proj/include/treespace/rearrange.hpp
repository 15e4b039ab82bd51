#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "treespace/error.hpp"
#include "treespace/metrics.hpp"
#include "treespace/parallel.hpp"
#include "treespace/tree.hpp"

namespace treespace {

/// Operation classes, ordered by inclusion: every NNI is an SPR and every
/// SPR is a TBR.
enum class OpKind { NNI = 0, SPR = 1, TBR = 2 };

inline std::string_view to_string(OpKind kind) {
    switch (kind) {
    case OpKind::NNI: return "nni";
    case OpKind::SPR: return "spr";
    case OpKind::TBR: return "tbr";
    }
    return "?";
}

inline OpKind parse_op_kind(std::string_view text) {
    if (text == "nni" || text == "NNI") return OpKind::NNI;
    if (text == "spr" || text == "SPR") return OpKind::SPR;
    if (text == "tbr" || text == "TBR") return OpKind::TBR;
    throw Error(ErrorKind::RangeError, "unknown operation kind '" + std::string(text) + "'");
}

/// True when an operation of class `op_class` belongs to O_kind.
inline bool belongs_to(OpKind op_class, OpKind kind) {
    return static_cast<int>(op_class) <= static_cast<int>(kind);
}

/// Where one side of a bisection is reconnected. An edge of the component is
/// named by the partial split it induces on the component's leaves (the part
/// without the component's lowest leaf index). A single-leaf component has no
/// edge to choose and uses root().
struct Attachment {
    LeafMask mask = 0;

    static Attachment root() { return {}; }
    static Attachment edge(LeafMask m) { return {m}; }
    bool is_root() const { return mask == 0; }

    auto operator<=>(const Attachment&) const = default;
};

/// A TBR operation: delete the edge inducing `bisect`, then join the two
/// components at the given attachments. Side A holds leaf index 0; side B is
/// `bisect.mask`.
struct RearrangementOp {
    Split bisect;
    Attachment reconnect_a;
    Attachment reconnect_b;

    auto operator<=>(const RearrangementOp&) const = default;
};

struct NeighbourhoodReport {
    std::size_t n = 0;
    OpKind kind = OpKind::TBR;
    Count op_count = 0;
    Count neighbourhood_size = 0;
    std::map<Count, Count> multiplicity_histogram;
};

struct Neighbourhood {
    std::vector<CanonicalForm> forms;  // sorted
    std::vector<PhyloTree> trees;      // parallel to forms
    std::vector<Count> multiplicities; // parallel to forms
    NeighbourhoodReport report;
};

namespace detail {

// One component left after deleting the bisection edge, seen after its
// degree-two scar vertex has been suppressed.
struct ComponentSide {
    VertexId endpoint = -1;
    LeafMask leaves = 0;
    bool single_leaf = false;
    LeafMask scar = 0;
    std::vector<LeafMask> attachments;         // sorted
    std::vector<Edge> attachment_edges;        // parallel to attachments
    std::vector<LeafMask> scar_adjacent;       // sorted
    VertexId scar_ends[2] = {-1, -1};

    bool at_scar(Attachment a) const { return single_leaf ? a.is_root() : a.mask == scar; }

    bool valid(Attachment a) const {
        if (single_leaf) {
            return a.is_root();
        }
        return !a.is_root() && std::binary_search(attachments.begin(), attachments.end(), a.mask);
    }

    const Edge& edge_for(Attachment a) const {
        auto it = std::lower_bound(attachments.begin(), attachments.end(), a.mask);
        return attachment_edges[static_cast<std::size_t>(it - attachments.begin())];
    }
};

struct Bisection {
    Split split;
    ComponentSide a;
    ComponentSide b;
};

inline Edge ordered(VertexId x, VertexId y) { return {std::min(x, y), std::max(x, y)}; }

class OpEngine {
public:
    explicit OpEngine(const PhyloTree& tree) : tree_(tree), rooting_(root_at(tree, 0)) {
        if (tree.leaf_count() < 4) {
            throw Error(ErrorKind::TooFewLeaves, "rearrangements need n >= 4, tree has " +
                                                     std::to_string(tree.leaf_count()));
        }
        for (auto v : rooting_.preorder) {
            if (v != rooting_.root) {
                child_of_split_.emplace(rooting_.below[static_cast<std::size_t>(v)], v);
            }
        }
    }

    const PhyloTree& tree() const { return tree_; }

    std::vector<Split> bisections() const {
        std::vector<Split> out;
        for (const auto& [mask, v] : child_of_split_) {
            out.push_back(Split{mask, tree_.leaf_count()});
        }
        return out;
    }

    const Bisection& bisection(const Split& split) {
        auto cached = cache_.find(split.mask);
        if (cached != cache_.end()) {
            return *cached->second;
        }
        auto it = child_of_split_.find(split.mask);
        if (split.n != tree_.leaf_count() || it == child_of_split_.end()) {
            throw Error(ErrorKind::InvalidOp, "no edge of the tree induces the requested split");
        }
        VertexId child = it->second;
        VertexId parent = rooting_.parent[static_cast<std::size_t>(child)];
        auto bis = std::make_unique<Bisection>();
        bis->split = Split{split.mask, tree_.leaf_count()};
        bis->b = side(child, parent, split.mask);
        bis->a = side(parent, child, tree_.all_leaves() & ~split.mask);
        return *cache_.emplace(split.mask, std::move(bis)).first->second;
    }

    OpKind classify(const RearrangementOp& op) {
        const auto& bis = bisection(op.bisect);
        check(bis, op);
        bool a_scar = bis.a.at_scar(op.reconnect_a);
        bool b_scar = bis.b.at_scar(op.reconnect_b);
        if (!a_scar && !b_scar) {
            return OpKind::TBR;
        }
        // Exactly one side keeps its original attachment; it is the pruned
        // subtree and the other side is where it was regrafted.
        const ComponentSide& host = a_scar ? bis.b : bis.a;
        Attachment target = a_scar ? op.reconnect_b : op.reconnect_a;
        if (std::binary_search(host.scar_adjacent.begin(), host.scar_adjacent.end(), target.mask)) {
            return OpKind::NNI;
        }
        return OpKind::SPR;
    }

    std::vector<RearrangementOp> enumerate(OpKind kind) {
        std::vector<RearrangementOp> out;
        for (const auto& split : bisections()) {
            const auto& bis = bisection(split);
            auto choices = [](const ComponentSide& s) {
                std::vector<Attachment> c;
                if (s.single_leaf) {
                    c.push_back(Attachment::root());
                } else {
                    for (auto m : s.attachments) {
                        c.push_back(Attachment::edge(m));
                    }
                }
                return c;
            };
            for (auto ra : choices(bis.a)) {
                for (auto rb : choices(bis.b)) {
                    if (bis.a.at_scar(ra) && bis.b.at_scar(rb)) {
                        continue;
                    }
                    RearrangementOp op{split, ra, rb};
                    if (kind == OpKind::TBR || belongs_to(classify(op), kind)) {
                        out.push_back(op);
                    }
                }
            }
        }
        return out;
    }

    PhyloTree apply(const RearrangementOp& op) {
        const auto& bis = bisection(op.bisect);
        check(bis, op);
        std::vector<Edge> edges = tree_.edges();
        auto remove = [&edges](Edge e) {
            auto it = std::find(edges.begin(), edges.end(), ordered(e.first, e.second));
            edges.erase(it);
        };
        auto add = [&edges](VertexId x, VertexId y) { edges.push_back(ordered(x, y)); };

        remove({bis.a.endpoint, bis.b.endpoint});
        for (const ComponentSide* s : {&bis.a, &bis.b}) {
            if (s->single_leaf) {
                continue;
            }
            remove({s->endpoint, s->scar_ends[0]});
            remove({s->endpoint, s->scar_ends[1]});
            add(s->scar_ends[0], s->scar_ends[1]);
        }
        // The suppressed vertex is reused to subdivide the chosen edge.
        auto attach = [&](const ComponentSide& s, Attachment where) {
            if (s.single_leaf) {
                return;
            }
            Edge target = s.edge_for(where);
            remove(target);
            add(target.first, s.endpoint);
            add(s.endpoint, target.second);
        };
        attach(bis.a, op.reconnect_a);
        attach(bis.b, op.reconnect_b);
        add(bis.a.endpoint, bis.b.endpoint);

        std::vector<LeafAssignment> leaves;
        for (std::size_t i = 0; i < tree_.leaf_count(); ++i) {
            leaves.push_back({static_cast<VertexId>(i), tree_.leaf_name(i)});
        }
        return build_tree(edges, leaves);
    }

private:
    void check(const Bisection& bis, const RearrangementOp& op) const {
        if (!bis.a.valid(op.reconnect_a) || !bis.b.valid(op.reconnect_b)) {
            throw Error(ErrorKind::InvalidOp, "reconnection edge does not belong to its component");
        }
        if (bis.a.at_scar(op.reconnect_a) && bis.b.at_scar(op.reconnect_b)) {
            throw Error(ErrorKind::InvalidOp,
                        "reconnecting both components at their scars reproduces the tree");
        }
    }

    LeafMask partial(VertexId x, VertexId y, LeafMask component) const {
        // Edge x-y: the side hanging below the deeper endpoint.
        VertexId lower = rooting_.parent[static_cast<std::size_t>(y)] == x ? y : x;
        LeafMask part = rooting_.below[static_cast<std::size_t>(lower)] & component;
        LeafMask lowest = component & (~component + 1);
        if (part & lowest) {
            part = component & ~part;
        }
        return part;
    }

    ComponentSide side(VertexId endpoint, VertexId across, LeafMask leaves) const {
        ComponentSide s;
        s.endpoint = endpoint;
        s.leaves = leaves;
        if (tree_.is_leaf(endpoint)) {
            s.single_leaf = true;
            return s;
        }
        int k = 0;
        for (auto w : tree_.neighbours(endpoint)) {
            if (w != across) {
                s.scar_ends[k++] = w;
            }
        }
        s.scar = partial(endpoint, s.scar_ends[0], leaves);

        std::vector<std::pair<LeafMask, Edge>> found;
        found.emplace_back(s.scar, ordered(s.scar_ends[0], s.scar_ends[1]));
        // Walk the component from the scar ends, never re-entering the
        // suppressed endpoint.
        std::vector<std::pair<VertexId, VertexId>> stack{{s.scar_ends[0], endpoint},
                                                         {s.scar_ends[1], endpoint}};
        while (!stack.empty()) {
            auto [v, from] = stack.back();
            stack.pop_back();
            for (auto w : tree_.neighbours(v)) {
                if (w == from || w == endpoint) {
                    continue;
                }
                LeafMask m = partial(v, w, leaves);
                found.emplace_back(m, ordered(v, w));
                if (from == endpoint) {
                    s.scar_adjacent.push_back(m);
                }
                stack.emplace_back(w, v);
            }
        }
        std::sort(found.begin(), found.end());
        for (const auto& [m, e] : found) {
            s.attachments.push_back(m);
            s.attachment_edges.push_back(e);
        }
        std::sort(s.scar_adjacent.begin(), s.scar_adjacent.end());
        return s;
    }

    const PhyloTree& tree_;
    Rooting rooting_;
    std::map<LeafMask, VertexId> child_of_split_;
    std::map<LeafMask, std::unique_ptr<Bisection>> cache_;
};

}  // namespace detail

/// All operations of the given class on the tree, ordered by bisection split
/// and then lexicographically by (reconnect_a, reconnect_b). The identity
/// reconnection is never produced.
inline std::vector<RearrangementOp> enumerate_ops(const PhyloTree& tree, OpKind kind) {
    detail::OpEngine engine(tree);
    return engine.enumerate(kind);
}

inline PhyloTree apply_op(const PhyloTree& tree, const RearrangementOp& op) {
    detail::OpEngine engine(tree);
    return engine.apply(op);
}

/// The most specific class the operation belongs to.
inline OpKind classify_op(const PhyloTree& tree, const RearrangementOp& op) {
    detail::OpEngine engine(tree);
    return engine.classify(op);
}

/// Distinct trees one operation away, with how many operations reach each.
inline Neighbourhood neighbourhood(const PhyloTree& tree, OpKind kind, unsigned threads = 1) {
    auto ops = enumerate_ops(tree, kind);

    struct Entry {
        PhyloTree tree;
        Count count = 0;
    };
    using Table = std::map<CanonicalForm, Entry>;
    std::vector<Table> partial(std::max(1u, threads));
    parallel_chunks(ops.size(), threads, [&](std::size_t begin, std::size_t end, unsigned worker) {
        detail::OpEngine engine(tree);
        auto& table = partial[worker];
        for (std::size_t i = begin; i < end; ++i) {
            PhyloTree out = engine.apply(ops[i]);
            auto form = canonical_form(out);
            auto [it, inserted] = table.try_emplace(std::move(form), Entry{});
            if (inserted) {
                it->second.tree = std::move(out);
            }
            ++it->second.count;
        }
    });
    Table merged = std::move(partial[0]);
    for (std::size_t w = 1; w < partial.size(); ++w) {
        for (auto& [form, entry] : partial[w]) {
            auto [it, inserted] = merged.try_emplace(form, entry);
            if (!inserted) {
                it->second.count += entry.count;
            }
        }
    }

    Neighbourhood result;
    result.report.n = tree.leaf_count();
    result.report.kind = kind;
    result.report.op_count = static_cast<Count>(ops.size());
    result.report.neighbourhood_size = static_cast<Count>(merged.size());
    for (auto& [form, entry] : merged) {
        result.forms.push_back(form);
        result.trees.push_back(std::move(entry.tree));
        result.multiplicities.push_back(entry.count);
        ++result.report.multiplicity_histogram[entry.count];
    }
    return result;
}

}  // namespace treespace

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "oracles.hpp"
#include "treespace/generators.hpp"
#include "treespace/newick.hpp"
#include "treespace/tree.hpp"

using namespace treespace;

namespace {

PhyloTree quartet() {
    // ((1,2),(3,4)) with internal vertices 4 and 5
    std::vector<Edge> edges{{4, 0}, {4, 1}, {4, 5}, {5, 2}, {5, 3}};
    std::vector<LeafAssignment> leaves{{0, "1"}, {1, "2"}, {2, "3"}, {3, "4"}};
    return build_tree(edges, leaves);
}

PhyloTree fig1_t1() { return parse_newick("((1,2),3,(4,(5,6)));").tree; }

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "no error thrown";
    return ErrorKind::RangeError;
}

}  // namespace

TEST(BuildTree, QuartetHasExpectedShape) {
    auto t = quartet();
    EXPECT_EQ(t.leaf_count(), 4u);
    EXPECT_EQ(t.vertex_count(), 6u);
    EXPECT_EQ(t.edges().size(), 5u);
    EXPECT_TRUE(is_cherry(t, "1", "2"));
    EXPECT_TRUE(is_cherry(t, "3", "4"));
    EXPECT_FALSE(is_cherry(t, "1", "3"));
}

TEST(BuildTree, VertexNumberingDoesNotMatter) {
    std::vector<Edge> edges{{9, 3}, {9, 7}, {9, 1}, {1, 5}, {1, 2}};
    std::vector<LeafAssignment> leaves{{3, "1"}, {7, "2"}, {5, "3"}, {2, "4"}};
    EXPECT_EQ(canonical_form(build_tree(edges, leaves)), canonical_form(quartet()));
}

TEST(BuildTree, DifferentQuartetsDiffer) {
    auto a = parse_newick("((1,2),(3,4));").tree;
    auto b = parse_newick("((1,3),(2,4));").tree;
    EXPECT_NE(canonical_form(a), canonical_form(b));
}

TEST(BuildTree, RejectsDegreeFour) {
    std::vector<Edge> edges{{5, 0}, {5, 1}, {5, 2}, {5, 3}, {5, 4}};
    std::vector<LeafAssignment> leaves{{0, "a"}, {1, "b"}, {2, "c"}, {3, "d"}, {4, "e"}};
    EXPECT_EQ(kind_of([&] { build_tree(edges, leaves); }), ErrorKind::DegreeViolation);
}

TEST(BuildTree, RejectsInternalDegreeTwo) {
    std::vector<Edge> edges{{3, 0}, {3, 4}, {4, 1}, {4, 5}, {5, 2}, {5, 6}, {6, 7}, {6, 8}};
    std::vector<LeafAssignment> leaves{{0, "a"}, {1, "b"}, {2, "c"}, {7, "d"}, {8, "e"}};
    EXPECT_EQ(kind_of([&] { build_tree(edges, leaves); }), ErrorKind::DegreeViolation);
}

TEST(BuildTree, RejectsDisconnected) {
    std::vector<Edge> edges{{6, 0}, {6, 1}, {6, 2}, {7, 3}, {7, 4}, {7, 5}};
    std::vector<LeafAssignment> leaves{{0, "a"}, {1, "b"}, {2, "c"}, {3, "d"}, {4, "e"}, {5, "f"}};
    EXPECT_EQ(kind_of([&] { build_tree(edges, leaves); }), ErrorKind::Disconnected);
}

TEST(BuildTree, RejectsCycle) {
    std::vector<Edge> edges{{4, 0}, {4, 5}, {5, 6}, {6, 4}, {5, 1}, {6, 2}, {3, 2}};
    std::vector<LeafAssignment> leaves{{0, "a"}, {1, "b"}, {3, "c"}};
    EXPECT_EQ(kind_of([&] { build_tree(edges, leaves); }), ErrorKind::Cyclic);
}

TEST(BuildTree, RejectsDuplicateAndEmptyLabels) {
    std::vector<Edge> edges{{3, 0}, {3, 1}, {3, 2}};
    std::vector<LeafAssignment> dup{{0, "a"}, {1, "a"}, {2, "c"}};
    std::vector<LeafAssignment> empty{{0, "a"}, {1, ""}, {2, "c"}};
    EXPECT_EQ(kind_of([&] { build_tree(edges, dup); }), ErrorKind::DuplicateLabel);
    EXPECT_EQ(kind_of([&] { build_tree(edges, empty); }), ErrorKind::EmptyLabel);
}

TEST(BuildTree, RejectsUnlabelledLeaf) {
    std::vector<Edge> edges{{3, 0}, {3, 1}, {3, 2}};
    std::vector<LeafAssignment> leaves{{0, "a"}, {1, "b"}};
    EXPECT_EQ(kind_of([&] { build_tree(edges, leaves); }), ErrorKind::UnlabelledLeaf);
}

TEST(BuildTree, SixtyFiveLeavesIsTooMany) {
    std::vector<Edge> edges;
    std::vector<LeafAssignment> leaves;
    for (int i = 0; i < 65; ++i) leaves.push_back({i, "x" + std::to_string(i)});
    EXPECT_EQ(kind_of([&] { build_tree(edges, leaves); }), ErrorKind::TooManyLeaves);
}

TEST(BuildTree, ThreeLeafStar) {
    auto t = parse_newick("(1,2,3);").tree;
    auto s = splits(t);
    EXPECT_EQ(s.size(), 3u);
    EXPECT_TRUE(std::all_of(s.begin(), s.end(), [](const Split& x) { return x.trivial(); }));
    EXPECT_EQ(serialize_newick(t), "(1,2,3);");
}

TEST(LeafOrder, IntegerLabelsSortNumerically) {
    auto t = parse_newick("(10,2,(1,9));").tree;
    EXPECT_EQ(t.leaf_names(), (std::vector<std::string>{"1", "2", "9", "10"}));
    auto u = parse_newick("(b,a10,(a2,c));").tree;
    EXPECT_EQ(u.leaf_names(), (std::vector<std::string>{"a10", "a2", "b", "c"}));
}

TEST(Splits, CaterpillarFromFigureOne) {
    auto t = fig1_t1();
    auto s = splits(t);
    ASSERT_EQ(s.size(), 9u);
    std::vector<LeafMask> nontrivial;
    for (const auto& x : s) {
        if (!x.trivial()) nontrivial.push_back(x.mask);
    }
    // leaf 0 is "1", so each split is stored by its other side
    std::vector<LeafMask> want{0b111100, 0b111000, 0b110000};
    std::sort(want.begin(), want.end());
    EXPECT_EQ(nontrivial, want);
}

TEST(Splits, AreNormalisedAndCountsHold) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        auto t = random_tree(4 + seed % 40, seed);
        const auto n = t.leaf_count();
        auto s = splits(t);
        ASSERT_EQ(s.size(), 2 * n - 3);
        EXPECT_EQ(std::count_if(s.begin(), s.end(), [](const Split& x) { return x.trivial(); }),
                  static_cast<long>(n));
        for (const auto& x : s) {
            EXPECT_EQ(x.mask & 1u, 0u);
            EXPECT_GE(x.side_size(), 1u);
            EXPECT_LE(x.side_size(), n - 1);
        }
        std::vector<LeafMask> masks;
        for (const auto& x : s) masks.push_back(x.mask);
        EXPECT_EQ(masks, oracle::split_set(t));
    }
}

TEST(Splits, StructuralInvariantsOnGeneratedTrees) {
    for (std::size_t n = 4; n <= 64; ++n) {
        for (const auto& t : {caterpillar(n), complete(n), random_tree(n, n)}) {
            ASSERT_EQ(t.vertex_count(), 2 * n - 2);
            ASSERT_EQ(t.edges().size(), 2 * n - 3);
            for (std::size_t v = 0; v < t.vertex_count(); ++v) {
                ASSERT_EQ(t.degree(static_cast<VertexId>(v)), v < n ? 1 : 3);
            }
        }
    }
}

TEST(CanonicalForm, InvariantUnderRelabellingAndEdgeShuffle) {
    std::mt19937_64 rng(7);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        auto t = random_tree(4 + seed % 30, seed);
        const auto n = static_cast<VertexId>(t.leaf_count());
        const auto total = static_cast<VertexId>(t.vertex_count());
        std::vector<VertexId> perm(static_cast<std::size_t>(total));
        std::iota(perm.begin(), perm.end(), 0);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<Edge> edges;
        for (auto [a, b] : t.edges()) {
            if (rng() & 1) std::swap(a, b);
            edges.emplace_back(perm[static_cast<std::size_t>(a)], perm[static_cast<std::size_t>(b)]);
        }
        std::shuffle(edges.begin(), edges.end(), rng);
        std::vector<LeafAssignment> leaves;
        for (VertexId i = 0; i < n; ++i) {
            leaves.push_back({perm[static_cast<std::size_t>(i)], t.leaf_name(static_cast<std::size_t>(i))});
        }
        auto u = build_tree(edges, leaves);
        EXPECT_EQ(canonical_form(u), canonical_form(t));
        EXPECT_EQ(std::hash<CanonicalForm>{}(canonical_form(u)), std::hash<CanonicalForm>{}(canonical_form(t)));
    }
}

TEST(Clusters, BothSidesOfEverySplit) {
    auto t = quartet();
    auto c = clusters(t);
    // 4 singletons, 4 triples, {1,2} and {3,4}
    EXPECT_EQ(c.size(), 10u);
    auto ch = cherries(t);
    ASSERT_EQ(ch.size(), 2u);
    EXPECT_EQ(ch[0].mask, 0b0011u);
    EXPECT_EQ(ch[1].mask, 0b1100u);
}

TEST(Restrict, ThreeLeavesGiveTheStar) {
    std::vector<std::string> keep{"1", "2", "3"};
    auto r = restrict_to(fig1_t1(), keep);
    EXPECT_EQ(r.leaf_count(), 3u);
    EXPECT_EQ(serialize_newick(r), "(1,2,3);");
}

TEST(Restrict, FourLeavesFromFigureOne) {
    std::vector<std::string> keep{"1", "2", "5", "6"};
    auto r = restrict_to(fig1_t1(), keep);
    EXPECT_EQ(canonical_form(r), canonical_form(parse_newick("((1,2),(5,6));").tree));
}

TEST(Restrict, FullLeafSetIsIdentity) {
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        auto t = random_tree(5 + seed, seed);
        EXPECT_EQ(canonical_form(restrict_to(t, t.all_leaves())), canonical_form(t));
    }
}

TEST(Restrict, MatchesSplitRestriction) {
    std::mt19937_64 rng(11);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        auto t = random_tree(6 + seed % 20, seed);
        LeafMask keep = rng() & t.all_leaves();
        if (std::popcount(keep) < 4) continue;
        auto r = restrict_to(t, keep);
        // map restricted leaf indices back to the original ones
        std::set<oracle::Mask> got;
        for (auto m : oracle::split_set(r)) {
            oracle::Mask back = 0;
            for (std::size_t i = 0; i < r.leaf_count(); ++i) {
                if (m >> i & 1) back |= bit(*t.leaf_index(r.leaf_name(i)));
            }
            got.insert(oracle::normalise(back, keep));
        }
        EXPECT_EQ(got, oracle::restricted(oracle::split_set(t), keep));
    }
}

TEST(Restrict, SmallSubsetsAndUnknownLeaves) {
    auto t = fig1_t1();
    std::vector<std::string> one{"4"};
    std::vector<std::string> two{"4", "6"};
    std::vector<std::string> bad{"4", "zz"};
    EXPECT_EQ(restrict_to(t, one).leaf_count(), 1u);
    EXPECT_EQ(restrict_to(t, two).leaf_count(), 2u);
    EXPECT_EQ(kind_of([&] { restrict_to(t, bad); }), ErrorKind::UnknownLeaf);
}

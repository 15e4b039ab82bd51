#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "treespace/error.hpp"
#include "treespace/extremal.hpp"
#include "treespace/generators.hpp"
#include "treespace/metrics.hpp"
#include "treespace/newick.hpp"
#include "treespace/parallel.hpp"
#include "treespace/rearrange.hpp"

namespace treespace {

/// Constant in |complete_tbr_size(n) - 4 n^2 floor(log2 n)| <= C n^2. The
/// supremum over n is approached along n = 2^k, where the gap tends to 13 n^2.
inline constexpr double kAsymptoticConstant = 13.0;

/// Sampled sizes used when the formulas suite is asked for random trees.
inline constexpr std::size_t kSampleMaxLeaves = 12;

using ReportValue = std::variant<Count, double, bool, std::string>;
using ReportRow = std::vector<std::pair<std::string, ReportValue>>;

struct Counterexample {
    std::string check;
    std::string newick;
    std::string detail;
};

struct SuiteReport {
    std::string suite;
    bool passed = true;
    std::vector<ReportRow> rows;
    std::vector<Counterexample> counterexamples;

    void fail(Counterexample c) {
        passed = false;
        counterexamples.push_back(std::move(c));
    }
};

namespace detail {

inline std::vector<PhyloTree> suite_trees(std::size_t n, bool exhaustive, std::size_t samples,
                                          std::uint64_t seed) {
    if (exhaustive) {
        return collect_all_trees(n);
    }
    std::mt19937_64 rng(seed + n);
    std::vector<PhyloTree> out;
    for (std::size_t i = 0; i < samples; ++i) {
        out.push_back(random_tree(n, rng()));
    }
    return out;
}

// Runs check(tree, failures) over the trees on a worker pool and returns the
// failures in tree order.
template <typename Check>
std::vector<Counterexample> run_checks(const std::vector<PhyloTree>& trees, unsigned threads,
                                       Check&& check) {
    std::vector<std::vector<Counterexample>> found(trees.size());
    parallel_chunks(trees.size(), threads, [&](std::size_t begin, std::size_t end, unsigned) {
        for (std::size_t i = begin; i < end; ++i) {
            check(trees[i], found[i]);
        }
    });
    std::vector<Counterexample> out;
    for (auto& f : found) {
        out.insert(out.end(), f.begin(), f.end());
    }
    return out;
}

inline void expect_equal(std::vector<Counterexample>& out, const PhyloTree& tree,
                         const std::string& check, Count got, Count want) {
    if (got != want) {
        out.push_back({check, serialize_newick(tree),
                       "enumerated " + std::to_string(got) + ", closed form " +
                           std::to_string(want)});
    }
}

inline void check_exhaustive_range(std::size_t n_max) {
    if (n_max < 4 || n_max > kMaxScanLeaves) {
        throw Error(ErrorKind::RangeError,
                    "--n-max must lie in 4.." + std::to_string(kMaxScanLeaves) +
                        " for exhaustive suites, got " + std::to_string(n_max));
    }
}

template <typename PerTree>
SuiteReport tree_suite(std::string name, std::size_t n_max, std::size_t samples,
                       std::uint64_t seed, unsigned threads, PerTree&& per_tree) {
    check_exhaustive_range(n_max);
    SuiteReport report;
    report.suite = std::move(name);
    auto run = [&](std::size_t n, bool exhaustive) {
        auto trees = suite_trees(n, exhaustive, samples, seed);
        auto failures = run_checks(trees, threads, per_tree);
        report.rows.push_back({{"n", static_cast<Count>(n)},
                               {"trees", static_cast<Count>(trees.size())},
                               {"exhaustive", exhaustive},
                               {"failures", static_cast<Count>(failures.size())}});
        for (auto& f : failures) {
            report.fail(std::move(f));
        }
    };
    for (std::size_t n = 4; n <= n_max; ++n) {
        run(n, true);
    }
    if (samples > 0) {
        for (std::size_t n = n_max + 1; n <= kSampleMaxLeaves; ++n) {
            run(n, false);
        }
    }
    return report;
}

}  // namespace detail

/// Enumerated neighbourhood sizes and operation counts against every closed
/// form, plus the caterpillar/complete sandwich.
inline SuiteReport verify_formulas(std::size_t n_max, std::size_t samples, std::uint64_t seed,
                                   unsigned threads = 1) {
    return detail::tree_suite(
        "formulas", n_max, samples, seed, threads,
        [](const PhyloTree& tree, std::vector<Counterexample>& out) {
            const auto n = static_cast<Count>(tree.leaf_count());
            auto tbr = neighbourhood(tree, OpKind::TBR);
            auto spr = neighbourhood(tree, OpKind::SPR);
            auto nni = neighbourhood(tree, OpKind::NNI);
            detail::expect_equal(out, tree, "tbr_size", tbr.report.neighbourhood_size, tbr_size(tree));
            detail::expect_equal(out, tree, "tbr_op_count", tbr.report.op_count, tbr_op_count(tree));
            detail::expect_equal(out, tree, "spr_size", spr.report.neighbourhood_size, spr_size(n));
            detail::expect_equal(out, tree, "spr_op_count", spr.report.op_count, spr_op_count(n));
            detail::expect_equal(out, tree, "nni_size", nni.report.neighbourhood_size, nni_size(n));
            Count size = tbr.report.neighbourhood_size;
            if (size < complete_tbr_size(n) || size > caterpillar_tbr_size(n)) {
                out.push_back({"sandwich", serialize_newick(tree),
                               "tbr size " + std::to_string(size) + " outside [" +
                                   std::to_string(complete_tbr_size(n)) + ", " +
                                   std::to_string(caterpillar_tbr_size(n)) + "]"});
            }
        });
}

/// Structure of repeated TBR outputs: multiplicities are 1 or 4, the repeated
/// outputs are exactly the NNI neighbourhood, and NNI <= SPR <= TBR as sets.
inline SuiteReport verify_redundancy(std::size_t n_max, std::size_t samples, std::uint64_t seed,
                                     unsigned threads = 1) {
    return detail::tree_suite(
        "redundancy", n_max, samples, seed, threads,
        [](const PhyloTree& tree, std::vector<Counterexample>& out) {
            const auto n = static_cast<Count>(tree.leaf_count());
            auto tbr = neighbourhood(tree, OpKind::TBR);
            auto spr = neighbourhood(tree, OpKind::SPR);
            auto nni = neighbourhood(tree, OpKind::NNI);
            std::vector<CanonicalForm> repeated;
            for (std::size_t i = 0; i < tbr.forms.size(); ++i) {
                Count m = tbr.multiplicities[i];
                if (m != 1 && m != 4) {
                    out.push_back({"multiplicity", serialize_newick(tree),
                                   "output " + serialize_newick(tbr.trees[i]) + " reached " +
                                       std::to_string(m) + " times"});
                }
                if (m > 1) {
                    repeated.push_back(tbr.forms[i]);
                }
            }
            if (repeated != nni.forms) {
                out.push_back({"repeated_equals_nni", serialize_newick(tree),
                               std::to_string(repeated.size()) + " repeated outputs vs " +
                                   std::to_string(nni.forms.size()) + " NNI neighbours"});
            }
            detail::expect_equal(out, tree, "ops_minus_size",
                                 tbr.report.op_count - tbr.report.neighbourhood_size,
                                 3 * nni_size(n));
            if (!std::includes(spr.forms.begin(), spr.forms.end(), nni.forms.begin(), nni.forms.end())) {
                out.push_back({"nesting_nni_spr", serialize_newick(tree), "NNI not within SPR"});
            }
            if (!std::includes(tbr.forms.begin(), tbr.forms.end(), spr.forms.begin(), spr.forms.end())) {
                out.push_back({"nesting_spr_tbr", serialize_newick(tree), "SPR not within TBR"});
            }
        });
}

/// Exhaustive maximiser/minimiser characterisation for 4 <= n <= n_max.
inline SuiteReport verify_extremal(std::size_t n_max, unsigned threads = 1) {
    detail::check_exhaustive_range(n_max);
    SuiteReport report;
    report.suite = "extremal";
    for (std::size_t n = 4; n <= n_max; ++n) {
        auto scan = extremal_scan(n, threads);
        const auto nn = static_cast<Count>(n);
        bool ok = scan.argmax_all_caterpillar && scan.argmin_all_complete &&
                  scan.max_value == caterpillar_tbr_size(nn) &&
                  scan.min_value == complete_tbr_size(nn) && scan.min_gamma == gamma_complete(nn) &&
                  scan.max_gamma == gamma_caterpillar(nn);
        report.rows.push_back({{"n", nn},
                               {"trees", static_cast<Count>(scan.trees_scanned)},
                               {"max", scan.max_value},
                               {"min", scan.min_value},
                               {"argmax_count", static_cast<Count>(scan.argmax_forms.size())},
                               {"argmin_count", static_cast<Count>(scan.argmin_forms.size())},
                               {"argmax_all_caterpillar", scan.argmax_all_caterpillar},
                               {"argmin_all_complete", scan.argmin_all_complete},
                               {"pass", ok}});
        if (!ok) {
            report.fail({"extremal", "", "n = " + std::to_string(n) + ": max " +
                                             std::to_string(scan.max_value) + ", min " +
                                             std::to_string(scan.min_value)});
        }
    }
    return report;
}

/// Closed-form sweep of the complete-tree neighbourhood against
/// 4 n^2 floor(log2 n).
inline SuiteReport verify_asymptotic(Count n_max = kMaxClosedFormLeaves,
                                     double constant = kAsymptoticConstant) {
    if (n_max < 4 || n_max > kMaxClosedFormLeaves) {
        throw Error(ErrorKind::RangeError, "--n-max must lie in 4.." +
                                               std::to_string(kMaxClosedFormLeaves));
    }
    SuiteReport report;
    report.suite = "asymptotic";
    double worst = 0.0;
    Count worst_n = 4;
    // smallest m such that the ratio stays >= 1/2 for every m <= n <= n_max
    Count half_from = 4;
    for (Count n = 4; n <= n_max; ++n) {
        Count value = complete_tbr_size(n);
        Count lead = 4 * n * n * floor_log2(n);
        if (2 * value < lead) {
            half_from = n + 1;
        }
        double scaled = std::abs(static_cast<double>(value - lead)) / (static_cast<double>(n) * n);
        if (scaled > worst) {
            worst = scaled;
            worst_n = n;
        }
        if (scaled > constant) {
            report.fail({"remainder", "", "n = " + std::to_string(n) + ": |gap|/n^2 = " +
                                              std::to_string(scaled)});
        }
    }
    bool increasing = true;
    double previous = 0.0;
    Count last_n = 0;
    double last_ratio = 0.0;
    for (Count n = 6; n <= n_max; n *= 2) {
        double ratio = static_cast<double>(complete_tbr_size(n)) /
                       (4.0 * static_cast<double>(n) * n * floor_log2(n));
        if (ratio <= previous || ratio >= 1.0) {
            increasing = false;
            report.fail({"ratio", "", "n = " + std::to_string(n) + ": ratio " +
                                          std::to_string(ratio) + " after " +
                                          std::to_string(previous)});
        }
        previous = ratio;
        last_n = n;
        last_ratio = ratio;
    }
    report.rows.push_back({{"n_max", n_max},
                           {"observed_constant", worst},
                           {"observed_at", worst_n},
                           {"pinned_constant", constant},
                           {"ratio_increasing_along_3x2k", increasing},
                           {"ratio_at_least_half_from", half_from},
                           {"last_ratio_n", last_n},
                           {"last_ratio", last_ratio}});
    return report;
}

}  // namespace treespace

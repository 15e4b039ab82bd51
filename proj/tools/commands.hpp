#pragma once

// Subcommand bodies for the treespace CLI. Each takes parsed options and the
// output streams and returns the process exit code: 0 success, 1 failed
// verification, 2 usage or input error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "treespace/report_json.hpp"
#include "treespace/treespace.hpp"

namespace treespace::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitUsage = 2;

struct InfoOptions {
    std::string input = "-";
    std::string format = "json";
};

struct NeighbourhoodOptions {
    std::string input = "-";
    std::string op = "tbr";
    bool emit_trees = false;
    bool emit_ops = false;
    bool multiplicities = false;
    std::optional<unsigned> threads;
};

struct GenerateOptions {
    std::string family = "caterpillar";
    std::size_t n = 0;
    std::uint64_t seed = 0;
};

struct VerifyOptions {
    std::string suite = "formulas";
    std::optional<std::int64_t> n_max;
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::optional<unsigned> threads;
};

struct TableOptions {
    std::string what = "tbr-size";
    std::string family = "caterpillar";
    std::int64_t n_min = 4;
    std::int64_t n_max = 16;
    std::string format = "csv";
    std::uint64_t seed = 0;
    std::optional<unsigned> threads;
};

inline std::string read_input(const std::string& path, std::istream& stdin_stream) {
    if (path == "-") {
        return {std::istreambuf_iterator<char>(stdin_stream), std::istreambuf_iterator<char>()};
    }
    std::ifstream file(path, std::ios::binary);
    if (!file) {
        throw Error(ErrorKind::RangeError, "cannot open '" + path + "'");
    }
    return {std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};
}

inline nlohmann::json report_header(const std::string& command, nlohmann::json inputs) {
    return {{"command", command}, {"version", kVersion}, {"inputs", std::move(inputs)}};
}

inline nlohmann::json warnings_json(const std::vector<NewickWarning>& warnings) {
    nlohmann::json out = nlohmann::json::array();
    for (auto w : warnings) {
        out.push_back(std::string(to_string(w)));
    }
    return out;
}

inline void check_format(const std::string& format) {
    if (format != "json" && format != "csv") {
        throw Error(ErrorKind::RangeError, "unknown format '" + format + "' (json or csv)");
    }
}

inline int cmd_info(const InfoOptions& opt, std::istream& in, std::ostream& out) {
    check_format(opt.format);
    auto parsed = parse_newick_lines(read_input(opt.input, in));
    if (parsed.empty()) {
        throw Error(ErrorKind::SyntaxError, "no tree in input", 0);
    }
    nlohmann::json results = nlohmann::json::array();
    for (const auto& p : parsed) {
        const auto& t = p.tree;
        const auto n = static_cast<Count>(t.leaf_count());
        results.push_back({{"newick", serialize_newick(t)},
                           {"n", n},
                           {"gamma", gamma(t)},
                           {"nni_size", nni_size(n)},
                           {"spr_size", spr_size(n)},
                           {"tbr_size", tbr_size(t)},
                           {"spr_op_count", spr_op_count(n)},
                           {"tbr_op_count", tbr_op_count(t)},
                           {"is_caterpillar", is_caterpillar(t)},
                           {"is_complete", is_complete(t)},
                           {"warnings", warnings_json(p.warnings)}});
    }
    if (opt.format == "csv") {
        out << "n,gamma,nni_size,spr_size,tbr_size,spr_op_count,tbr_op_count,is_caterpillar,"
               "is_complete,newick\n";
        for (const auto& r : results) {
            out << r["n"] << ',' << r["gamma"] << ',' << r["nni_size"] << ',' << r["spr_size"] << ','
                << r["tbr_size"] << ',' << r["spr_op_count"] << ',' << r["tbr_op_count"] << ','
                << r["is_caterpillar"] << ',' << r["is_complete"] << ','
                << r["newick"].get<std::string>() << '\n';
        }
        return kExitOk;
    }
    auto report = report_header("info", {{"input", opt.input}, {"format", opt.format}});
    report["results"] = results;
    out << report.dump(2) << '\n';
    return kExitOk;
}

inline int cmd_neighbourhood(const NeighbourhoodOptions& opt, std::istream& in, std::ostream& out,
                             std::ostream& err) {
    auto kind = parse_op_kind(opt.op);
    auto parsed = parse_newick_lines(read_input(opt.input, in));
    if (parsed.size() != 1) {
        throw Error(ErrorKind::RangeError,
                    "expected exactly one tree, got " + std::to_string(parsed.size()));
    }
    const auto& tree = parsed.front().tree;
    auto hood = neighbourhood(tree, kind, resolve_threads(opt.threads));

    auto report = report_header("neighbourhood", {{"input", opt.input},
                                                  {"op", std::string(to_string(kind))},
                                                  {"emit_trees", opt.emit_trees},
                                                  {"emit_ops", opt.emit_ops},
                                                  {"multiplicities", opt.multiplicities}});
    nlohmann::json results = {{"newick", serialize_newick(tree)},
                              {"n", tree.leaf_count()},
                              {"op", std::string(to_string(kind))},
                              {"op_count", hood.report.op_count},
                              {"neighbourhood_size", hood.report.neighbourhood_size},
                              {"warnings", warnings_json(parsed.front().warnings)}};
    if (opt.multiplicities) {
        results["multiplicity_histogram"] = histogram_to_json(hood.report.multiplicity_histogram);
    }
    if (opt.emit_ops) {
        nlohmann::json ops = nlohmann::json::array();
        for (const auto& op : enumerate_ops(tree, kind)) {
            ops.push_back(op_to_json(op));
        }
        results["ops"] = ops;
    }
    report["results"] = results;

    if (opt.emit_trees) {
        for (const auto& t : hood.trees) {
            out << serialize_newick(t) << '\n';
        }
        err << report.dump(2) << '\n';
    } else {
        out << report.dump(2) << '\n';
    }
    return kExitOk;
}

inline int cmd_generate(const GenerateOptions& opt, std::ostream& out) {
    auto family = parse_family(opt.family);
    out << serialize_newick(make_tree(family, opt.n, opt.seed)) << '\n';
    return kExitOk;
}

inline int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
    unsigned threads = resolve_threads(opt.threads);
    SuiteReport suite;
    auto small_n_max = [&opt](std::int64_t fallback) {
        std::int64_t v = opt.n_max.value_or(fallback);
        if (v < 4) {
            throw Error(ErrorKind::RangeError, "--n-max must be at least 4");
        }
        return static_cast<std::size_t>(v);
    };
    if (opt.suite == "formulas") {
        suite = verify_formulas(small_n_max(7), opt.samples, opt.seed, threads);
    } else if (opt.suite == "redundancy") {
        suite = verify_redundancy(small_n_max(7), opt.samples, opt.seed, threads);
    } else if (opt.suite == "extremal") {
        suite = verify_extremal(small_n_max(8), threads);
    } else if (opt.suite == "asymptotic") {
        suite = verify_asymptotic(opt.n_max.value_or(kMaxClosedFormLeaves));
    } else {
        throw Error(ErrorKind::RangeError, "unknown suite '" + opt.suite +
                                               "' (formulas, redundancy, extremal, asymptotic)");
    }
    nlohmann::json inputs = {{"suite", opt.suite}, {"samples", opt.samples}};
    if (opt.n_max) {
        inputs["n_max"] = *opt.n_max;
    }
    auto report = report_header("verify", inputs);
    report["seed"] = opt.seed;
    report["results"] = suite_to_json(suite);
    out << report.dump(2) << '\n';
    for (const auto& c : suite.counterexamples) {
        err << "FAIL " << c.check << ' ' << c.newick << ' ' << c.detail << '\n';
    }
    return suite.passed ? kExitOk : kExitFailed;
}

inline int cmd_table(const TableOptions& opt, std::ostream& out) {
    check_format(opt.format);
    if (opt.what != "gamma" && opt.what != "tbr-size") {
        throw Error(ErrorKind::RangeError, "unknown quantity '" + opt.what + "' (gamma or tbr-size)");
    }
    auto family = parse_family(opt.family);
    const Count limit =
        family == TreeFamily::Random ? static_cast<Count>(kMaxLeaves) : kMaxClosedFormLeaves;
    if (opt.n_min < 4 || opt.n_max < opt.n_min || opt.n_max > limit) {
        throw Error(ErrorKind::RangeError, "n range must satisfy 4 <= n-min <= n-max <= " +
                                               std::to_string(limit) + " for family " + opt.family);
    }
    const bool want_gamma = opt.what == "gamma";
    const std::string column = want_gamma ? "gamma" : "tbr_size";

    std::vector<Count> sizes;
    for (Count n = opt.n_min; n <= opt.n_max; ++n) {
        if (family != TreeFamily::Perfect || is_perfect_size(n)) {
            sizes.push_back(n);
        }
    }
    std::vector<std::pair<Count, Count>> rows(sizes.size());
    parallel_chunks(sizes.size(), resolve_threads(opt.threads),
                    [&](std::size_t begin, std::size_t end, unsigned) {
                        for (std::size_t i = begin; i < end; ++i) {
                            Count n = sizes[i];
                            Count g = 0;
                            switch (family) {
                            case TreeFamily::Caterpillar: g = gamma_caterpillar(n); break;
                            case TreeFamily::Complete:
                            case TreeFamily::Perfect: g = gamma_complete(n); break;
                            case TreeFamily::Random:
                                g = gamma(random_tree(static_cast<std::size_t>(n), opt.seed));
                                break;
                            }
                            rows[i] = {n, want_gamma ? g : tbr_size_from_gamma(n, g)};
                        }
                    });

    if (opt.format == "csv") {
        out << "n," << column << '\n';
        for (const auto& [n, v] : rows) {
            out << n << ',' << v << '\n';
        }
        return kExitOk;
    }
    nlohmann::json inputs = {{"what", opt.what},
                             {"family", opt.family},
                             {"n_min", opt.n_min},
                             {"n_max", opt.n_max},
                             {"format", opt.format}};
    auto report = report_header("table", inputs);
    if (family == TreeFamily::Random) {
        report["seed"] = opt.seed;
    }
    nlohmann::json results = nlohmann::json::array();
    for (const auto& [n, v] : rows) {
        results.push_back({{"n", n}, {column, v}});
    }
    report["results"] = results;
    out << report.dump(2) << '\n';
    return kExitOk;
}

}  // namespace treespace::cli

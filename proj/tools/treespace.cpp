#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

void add_threads(CLI::App* cmd, std::optional<unsigned>& threads) {
    cmd->add_option("--threads", threads, "worker threads (default: $TREESPACE_THREADS or 1)")
        ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace treespace::cli;

    CLI::App app{"Rearrangement neighbourhoods of unrooted binary phylogenetic trees"};
    app.set_version_flag("--version", std::string(treespace::kVersion));
    app.require_subcommand(1);

    InfoOptions info;
    auto* info_cmd = app.add_subcommand("info", "metrics of each tree in a Newick file");
    info_cmd->add_option("input", info.input, "Newick file, one tree per line ('-' for stdin)");
    info_cmd->add_option("--format", info.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    NeighbourhoodOptions hood;
    auto* hood_cmd = app.add_subcommand("neighbourhood", "enumerate a rearrangement neighbourhood");
    hood_cmd->alias("neighborhood");
    hood_cmd->add_option("input", hood.input, "Newick file ('-' for stdin)");
    hood_cmd->add_option("--op", hood.op, "nni, spr or tbr")->check(CLI::IsMember({"nni", "spr", "tbr"}));
    hood_cmd->add_flag("--emit-trees", hood.emit_trees, "Newick of each neighbour on stdout, report on stderr");
    hood_cmd->add_flag("--emit-ops", hood.emit_ops, "include every operation record in the report");
    hood_cmd->add_flag("--multiplicities", hood.multiplicities, "include the multiplicity histogram");
    add_threads(hood_cmd, hood.threads);

    GenerateOptions gen;
    auto* gen_cmd = app.add_subcommand("generate", "print a tree from a named family");
    gen_cmd->add_option("--family", gen.family, "caterpillar, complete, perfect or random")
        ->check(CLI::IsMember({"caterpillar", "complete", "perfect", "random"}));
    gen_cmd->add_option("--n", gen.n, "number of leaves")->required();
    gen_cmd->add_option("--seed", gen.seed, "seed for the random family");

    VerifyOptions verify;
    auto* verify_cmd = app.add_subcommand("verify", "check closed forms against enumeration");
    verify_cmd->add_option("--suite", verify.suite, "formulas, redundancy, extremal or asymptotic")
        ->check(CLI::IsMember({"formulas", "redundancy", "extremal", "asymptotic"}));
    verify_cmd->add_option("--n-max", verify.n_max, "largest n checked");
    verify_cmd->add_option("--samples", verify.samples, "random trees per size above --n-max (up to 12)");
    verify_cmd->add_option("--seed", verify.seed, "seed for sampled trees");
    add_threads(verify_cmd, verify.threads);

    TableOptions table;
    auto* table_cmd = app.add_subcommand("table", "tabulate gamma or TBR size over a family");
    table_cmd->add_option("--what", table.what, "gamma or tbr-size")->check(CLI::IsMember({"gamma", "tbr-size"}));
    table_cmd->add_option("--family", table.family, "caterpillar, complete, perfect or random")
        ->check(CLI::IsMember({"caterpillar", "complete", "perfect", "random"}));
    table_cmd->add_option("--n-min", table.n_min, "smallest n (default 4)");
    table_cmd->add_option("--n-max", table.n_max, "largest n");
    table_cmd->add_option("--format", table.format, "csv or json")->check(CLI::IsMember({"json", "csv"}));
    table_cmd->add_option("--seed", table.seed, "seed for the random family");
    add_threads(table_cmd, table.threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*info_cmd) return cmd_info(info, std::cin, std::cout);
        if (*hood_cmd) return cmd_neighbourhood(hood, std::cin, std::cout, std::cerr);
        if (*gen_cmd) return cmd_generate(gen, std::cout);
        if (*verify_cmd) return cmd_verify(verify, std::cout, std::cerr);
        if (*table_cmd) return cmd_table(table, std::cout);
    } catch (const treespace::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

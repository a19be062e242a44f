#include <fstream>
#include <iostream>
#include <map>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using allmatch::cli::ExperimentConfig;

void add_matrix_input(CLI::App* cmd, ExperimentConfig& cfg) {
    auto* in = cmd->add_option("--input", cfg.input_path, "Matrix file (header \"m n\", then m rows of 0/1)");
    auto* rnd = cmd->add_option("--random", cfg.random_spec, "Ensemble: bernoulli:m:n:p | exactones:m:n | edges:m:n");
    in->excludes(rnd);
    rnd->excludes(in);
}

void add_common(CLI::App* cmd, ExperimentConfig& cfg) {
    static const std::map<std::string, allmatch::cli::OutputFormat> formats{
        {"text", allmatch::cli::OutputFormat::text},
        {"csv", allmatch::cli::OutputFormat::csv},
        {"json", allmatch::cli::OutputFormat::json}};
    cmd->add_option("--format", cfg.format, "Output format: text, csv or json")
        ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
    cmd->add_option("--out", cfg.out_path, "Write output to PATH instead of stdout");
    cmd->add_option("--seed", cfg.seed, "64-bit seed");
    cmd->add_option("--threads", cfg.threads, "Worker threads")->check(CLI::Range(1U, 256U));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact and Monte Carlo counting of all matchings in bipartite graphs"};
    app.require_subcommand(1);
    ExperimentConfig cfg;

    auto* exact = app.add_subcommand("exact", "Exact AM, k-matching profile and transformed-permanent cross-check");
    add_matrix_input(exact, cfg);
    add_common(exact, cfg);

    auto* estimate = app.add_subcommand("estimate", "Run RM or AMM trials and compare against exact moments");
    add_matrix_input(estimate, cfg);
    add_common(estimate, cfg);
    static const std::map<std::string, allmatch::Method> methods{{"rm", allmatch::Method::rm}, {"amm", allmatch::Method::amm}};
    estimate->add_option("--method", cfg.method, "rm or amm")->transform(CLI::CheckedTransformer(methods, CLI::ignore_case));
    estimate->add_option("--trials", cfg.trials, "Number of trials")->check(CLI::PositiveNumber);

    auto* moments = app.add_subcommand("moments", "Evaluate an ensemble-moment formula exactly");
    moments->add_option("formula", cfg.moment, "thm3|thm4|thm5|thm6|thm7|thm8-mean|thm8-m2")
        ->required()
        ->check(CLI::IsMember({"thm3", "thm4", "thm5", "thm6", "thm7", "thm8-mean", "thm8-m2"}));
    moments->add_option("--n", cfg.n, "Matrix size n");
    moments->add_option("--m", cfg.m, "Rows (thm3/thm4) or edges (thm8)");
    moments->add_option("--eps", cfg.eps, "Tail offset as P/Q (thm7), 0 < eps <= 1/50");
    add_common(moments, cfg);

    auto* verify = app.add_subcommand("verify", "Run the invariant suites; nonzero exit on any failure");
    verify->add_option("--suite", cfg.suite, "small or full")->check(CLI::IsMember({"small", "full"}));
    add_common(verify, cfg);

    auto* scan = app.add_subcommand("ratio-scan", "Per-n table of exact ensemble moments and their ratio");
    std::string range = "1:10";
    scan->add_option("--n-range", range, "LO:HI");
    scan->add_option("--eps", cfg.eps, "Tail offset as P/Q, 0 < eps <= 1/50");
    add_common(scan, cfg);

    CLI11_PARSE(app, argc, argv);
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        if (cfg.command == "ratio-scan") {
            const auto colon = range.find(':');
            if (colon == std::string::npos) throw allmatch::cli::usage_error("--n-range expects LO:HI");
            cfg.range_lo = std::stoul(range.substr(0, colon));
            cfg.range_hi = std::stoul(range.substr(colon + 1));
        }
        const auto rec = allmatch::cli::dispatch(cfg);
        const std::string text = allmatch::cli::render(rec, cfg.format);
        if (cfg.out_path) {
            std::ofstream out(*cfg.out_path, std::ios::binary);
            if (!out) throw allmatch::cli::usage_error("cannot write '" + *cfg.out_path + "'");
            out << text;
        } else {
            std::cout << text;
        }
        return rec.ok ? 0 : 1;
    } catch (const std::invalid_argument&) {
        std::cerr << "error: --n-range expects LO:HI with decimal bounds\n";
        return 2;
    } catch (const allmatch::error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}

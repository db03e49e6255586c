// recmax: threshold sequences, almost-sure extreme-value classification and
// jump-chain verification for discrete distributions.
//
// Subcommands:
//   analyze   classify limsup/liminf offsets and per-offset i.o. verdicts
//   simulate  run the record-path ensemble and dump hit matrices
//   verify    compare simulated hits against the exact ledgers
//   tables    emit (n, a_n, R(a_n), r(a_n)) over a log-spaced grid
//
// Exit codes: 0 success; 1 malformed spec or I/O failure; 2 a precondition
// of the classification was not declared (report still printed); 3 a
// statistical check failed.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "recmax/asymptotics.hpp"
#include "recmax/distribution.hpp"
#include "recmax/oracle.hpp"
#include "recmax/record_sim.hpp"
#include "recmax/report_io.hpp"

namespace {

using nlohmann::json;

json load_spec(const std::string& arg) {
    std::string text = arg;
    if (!arg.empty() && arg[0] != '{' && arg[0] != '[') {
        std::ifstream in(arg);
        if (!in) throw std::invalid_argument("cannot open spec file: " + arg);
        std::ostringstream ss;
        ss << in.rdbuf();
        text = ss.str();
    }
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("invalid JSON spec: ") + e.what());
    }
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    return out;
}

struct AnalyzeArgs {
    std::string dist_spec;
    std::string regime_spec;
    bool fit = false;
    std::string offsets = "-5:5";
    std::string format = "text";
    std::string out;
};

int run_analyze(const AnalyzeArgs& args) {
    std::optional<recmax::DiscreteDistribution> dist;
    if (!args.dist_spec.empty()) dist = recmax::parse_distribution(load_spec(args.dist_spec));

    recmax::RateRegime regime;
    bool fitted = false;
    if (!args.regime_spec.empty()) {
        regime = recmax::parse_regime(load_spec(args.regime_spec));
    } else if (dist && args.fit) {
        regime = recmax::fit_regime(*dist, 8, 2000).regime;
        fitted = true;
    } else {
        throw std::invalid_argument("analyze needs --regime, or --dist together with --fit");
    }

    const auto [l_min, l_max] = recmax::parse_offsets(args.offsets);
    recmax::AsymptoticReport report = recmax::full_report(regime, l_min, l_max);
    report.fitted = fitted;

    std::ostringstream body;
    if (args.format == "json") {
        json j = recmax::report_to_json(report);
        if (dist) {
            j["distribution"] = recmax::distribution_to_json(*dist);
            json rows = json::array();
            for (const auto& row : recmax::threshold_table(*dist, 1000000, 1)) {
                json entry = {{"n", row.n},
                              {"a_n", row.a_n},
                              {"R_a_n", row.R_at_a},
                              {"r_a_n", row.a_n >= 1 ? json(row.r_at_a) : json()}};
                if (dist->family() == recmax::DiscreteDistribution::Family::poisson) {
                    const double approx = recmax::poisson_threshold_approximation(
                        dist->poisson_lambda(), row.log_n);
                    if (!std::isnan(approx)) entry["a_n_approx"] = approx;
                }
                rows.push_back(entry);
            }
            j["threshold_table"] = rows;
        }
        body << j.dump(2) << "\n";
    } else {
        if (dist) {
            body << "distribution: " << dist->describe() << "\n";
            body << "threshold table (n, a_n, R(a_n), r(a_n)";
            const bool poisson = dist->family() == recmax::DiscreteDistribution::Family::poisson;
            if (poisson) body << ", a_n approximation";
            body << "):\n";
            for (const auto& row : recmax::threshold_table(*dist, 1000000, 1)) {
                body << "  n=" << row.n << "  a_n=" << row.a_n
                     << "  R=" << recmax::fmt_double(row.R_at_a);
                if (row.a_n >= 1) body << "  r=" << recmax::fmt_double(row.r_at_a);
                if (poisson) {
                    const double approx = recmax::poisson_threshold_approximation(
                        dist->poisson_lambda(), row.log_n);
                    if (!std::isnan(approx)) body << "  approx=" << recmax::fmt_double(approx);
                }
                body << "\n";
            }
            body << "hazard increments r(k), k = 1..12:\n ";
            for (std::uint64_t k = 1; k <= 12; ++k)
                body << " " << recmax::fmt_double(dist->hazard_increment(k));
            body << "\n\n";
        }
        body << recmax::report_to_text(report);
    }

    if (!args.out.empty())
        open_output(args.out) << body.str();
    else
        std::cout << body.str();
    return report.precondition_failures.empty() ? 0 : 2;
}

struct SimArgs {
    std::string dist_spec;
    recmax::SimConfig config;
    std::string offsets = "0:0";
    std::string out_dir = ".";
};

int run_simulate(const SimArgs& args) {
    const auto dist = recmax::parse_distribution(load_spec(args.dist_spec));
    recmax::SimConfig config = args.config;
    std::tie(config.l_min, config.l_max) = recmax::parse_offsets(args.offsets);
    const recmax::BlockHitMatrix matrix = recmax::run_ensemble(dist, config);

    auto hits = open_output(args.out_dir + "/hits.csv");
    recmax::write_ensemble_csv(hits, matrix);
    auto summary = open_output(args.out_dir + "/summary.json");
    summary << recmax::summary_json(matrix, dist).dump(2) << "\n";
    std::cout << "wrote " << args.out_dir << "/hits.csv and " << args.out_dir
              << "/summary.json\n";
    return 0;
}

struct VerifyArgs {
    std::string dist_spec;
    std::string ledger_dist_spec;
    recmax::SimConfig config;
    std::string offsets = "0:0";
    double n_sigma = 3.0;
};

int run_verify(const VerifyArgs& args) {
    const auto dist = recmax::parse_distribution(load_spec(args.dist_spec));
    const auto ledger_dist = args.ledger_dist_spec.empty()
                                 ? dist
                                 : recmax::parse_distribution(load_spec(args.ledger_dist_spec));
    recmax::SimConfig config = args.config;
    std::tie(config.l_min, config.l_max) = recmax::parse_offsets(args.offsets);
    const recmax::BlockHitMatrix matrix = recmax::run_ensemble(dist, config);
    const recmax::VerifyReport report =
        recmax::verify_ensemble(matrix, ledger_dist, args.n_sigma);
    for (const auto& c : report.checks) {
        std::printf("%-22s l=%+d  mean=%10.4f  expected=%10.4f  sigma=%8.4f  z=%6.2f  %s  (%s)\n",
                    recmax::to_string(c.family), c.l, c.mean_hits, c.expected, c.sigma, c.z,
                    c.pass ? "PASS" : "FAIL", c.note.c_str());
    }
    std::printf("%s\n", report.all_pass ? "verify: all checks passed"
                                        : "verify: statistical failure");
    return report.all_pass ? 0 : 3;
}

struct TablesArgs {
    std::string dist_spec;
    std::uint64_t n_max = 1000000;
    unsigned per_decade = 1;
    std::string out;
};

int run_tables(const TablesArgs& args) {
    const auto dist = recmax::parse_distribution(load_spec(args.dist_spec));
    const auto rows = recmax::threshold_table(dist, args.n_max, args.per_decade);
    if (!args.out.empty()) {
        auto out = open_output(args.out);
        recmax::write_tables_csv(out, rows);
    } else {
        recmax::write_tables_csv(std::cout, rows);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"running-maximum asymptotics for discrete distributions"};
    app.require_subcommand(1);

    AnalyzeArgs analyze;
    auto* cmd_analyze = app.add_subcommand("analyze", "classify almost-sure offsets");
    cmd_analyze->add_option("--dist", analyze.dist_spec, "distribution spec (file or inline JSON)");
    cmd_analyze->add_option("--regime", analyze.regime_spec, "regime spec (file or inline JSON)");
    cmd_analyze->add_flag("--fit", analyze.fit, "fit a regime from the distribution (advisory)");
    cmd_analyze->add_option("--offsets", analyze.offsets, "offset range a:b");
    cmd_analyze->add_option("--format", analyze.format, "text or json")
        ->check(CLI::IsMember({"text", "json"}));
    cmd_analyze->add_option("--out", analyze.out, "output file (default stdout)");

    SimArgs simulate;
    auto* cmd_simulate = app.add_subcommand("simulate", "run the record-path ensemble");
    cmd_simulate->add_option("--dist", simulate.dist_spec, "distribution spec")->required();
    cmd_simulate->add_option("--K", simulate.config.K, "number of blocks")->required();
    cmd_simulate->add_option("--paths", simulate.config.paths, "number of paths")->required();
    cmd_simulate->add_option("--seed", simulate.config.seed, "master seed");
    cmd_simulate->add_option("--offsets", simulate.offsets, "offset range a:b");
    cmd_simulate->add_option("--threads", simulate.config.threads, "worker threads (0 = auto)");
    cmd_simulate->add_flag("--lower-equal-anywhere", simulate.config.lower_equal_anywhere,
                           "also record the block-wide lower equality family");
    cmd_simulate->add_option("--out", simulate.out_dir, "output directory");

    VerifyArgs verify;
    auto* cmd_verify = app.add_subcommand("verify", "check simulation against exact ledgers");
    cmd_verify->add_option("--dist", verify.dist_spec, "distribution spec")->required();
    cmd_verify->add_option("--ledger-dist", verify.ledger_dist_spec,
                           "compare against the ledger of a different distribution "
                           "(negative control)");
    cmd_verify->add_option("--K", verify.config.K, "number of blocks")->required();
    cmd_verify->add_option("--paths", verify.config.paths, "number of paths")->required();
    cmd_verify->add_option("--seed", verify.config.seed, "master seed");
    cmd_verify->add_option("--offsets", verify.offsets, "offset range a:b");
    cmd_verify->add_option("--threads", verify.config.threads, "worker threads (0 = auto)");
    cmd_verify->add_option("--sigma", verify.n_sigma, "deviation threshold in standard errors");

    TablesArgs tables;
    auto* cmd_tables = app.add_subcommand("tables", "emit the threshold table as CSV");
    cmd_tables->add_option("--dist", tables.dist_spec, "distribution spec")->required();
    cmd_tables->add_option("--nmax", tables.n_max, "largest n in the grid");
    cmd_tables->add_option("--per-decade", tables.per_decade, "grid points per decade");
    cmd_tables->add_option("--out", tables.out, "output file (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_analyze->parsed()) return run_analyze(analyze);
        if (cmd_simulate->parsed()) return run_simulate(simulate);
        if (cmd_verify->parsed()) return run_verify(verify);
        if (cmd_tables->parsed()) return run_tables(tables);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

#include "recmax/report_io.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>

namespace recmax {

DiscreteDistribution parse_distribution(const nlohmann::json& j) {
    try {
        const std::string family = j.at("family").get<std::string>();
        if (family == "poisson") return DiscreteDistribution::poisson(j.at("lambda").get<double>());
        if (family == "geometric") return DiscreteDistribution::geometric(j.at("q").get<double>());
        if (family == "pmf_table")
            return DiscreteDistribution::pmf_table(j.at("p").get<std::vector<double>>(),
                                                   j.at("tail_rate").get<double>());
        throw std::invalid_argument("unknown distribution family: " + family);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed distribution spec: ") + e.what());
    }
}

nlohmann::json distribution_to_json(const DiscreteDistribution& dist) {
    nlohmann::json j;
    switch (dist.family()) {
        case DiscreteDistribution::Family::poisson:
            j["family"] = "poisson";
            j["lambda"] = dist.poisson_lambda();
            break;
        case DiscreteDistribution::Family::geometric:
            j["family"] = "geometric";
            j["q"] = dist.geometric_q();
            break;
        case DiscreteDistribution::Family::pmf_table:
            j["family"] = "pmf_table";
            j["p"] = dist.table_probabilities();
            j["tail_rate"] = dist.table_tail_rate();
            break;
    }
    return j;
}

RateRegime parse_regime(const nlohmann::json& j) {
    try {
        const std::string kind = j.at("regime").get<std::string>();
        RateRegime r;
        if (kind == "bounded")
            r = RateRegime::bounded(j.at("C0").get<double>());
        else if (kind == "sublog2")
            r = RateRegime::sublog2();
        else if (kind == "log2linear")
            r = RateRegime::log2linear(j.at("c").get<double>());
        else if (kind == "loglinear")
            r = RateRegime::loglinear(j.at("c").get<double>());
        else if (kind == "superlog")
            r = RateRegime::superlog(j.at("r_over_n_to_zero").get<bool>());
        else
            throw std::invalid_argument("unknown regime kind: " + kind);
        if (j.contains("monotone")) r.monotone = j.at("monotone").get<bool>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed regime spec: ") + e.what());
    }
}

nlohmann::json regime_to_json(const RateRegime& regime) {
    nlohmann::json j;
    switch (regime.kind) {
        case RateRegime::Kind::bounded:
            j["regime"] = "bounded";
            j["C0"] = regime.c;
            break;
        case RateRegime::Kind::sublog2:
            j["regime"] = "sublog2";
            break;
        case RateRegime::Kind::log2linear:
            j["regime"] = "log2linear";
            j["c"] = regime.c;
            break;
        case RateRegime::Kind::loglinear:
            j["regime"] = "loglinear";
            j["c"] = regime.c;
            break;
        case RateRegime::Kind::superlog:
            j["regime"] = "superlog";
            j["r_over_n_to_zero"] = regime.r_over_n_to_zero;
            break;
    }
    j["monotone"] = regime.monotone;
    return j;
}

std::pair<int, int> parse_offsets(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("offsets must be given as a:b, got: " + text);
    try {
        const int a = std::stoi(text.substr(0, colon));
        const int b = std::stoi(text.substr(colon + 1));
        if (a > b) throw std::invalid_argument("offsets a:b need a <= b, got: " + text);
        return {a, b};
    } catch (const std::logic_error&) {
        throw std::invalid_argument("offsets must be given as a:b, got: " + text);
    }
}

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

nlohmann::json report_to_json(const AsymptoticReport& report) {
    nlohmann::json j;
    j["regime"] = regime_to_json(report.regime);
    j["fitted"] = report.fitted;
    j["limsup_offset"] = to_string(report.limsup_offset);
    j["liminf_offset"] = to_string(report.liminf_offset);
    nlohmann::json verdicts = nlohmann::json::array();
    for (const auto& [l, v] : report.io_verdicts)
        verdicts.push_back({{"l", l}, {"verdict", to_string(v)}});
    j["io_verdicts"] = verdicts;
    j["applied"] = report.applied;
    j["precondition_failures"] = report.precondition_failures;
    return j;
}

std::string report_to_text(const AsymptoticReport& report) {
    std::ostringstream os;
    os << "regime: " << report.regime.describe();
    if (report.fitted) os << "  [fitted, not asserted]";
    os << "\n";
    os << "limsup (M_n - a_n) = " << to_string(report.limsup_offset) << "\n";
    os << "liminf (M_n - a_n) = -" << to_string(report.liminf_offset) << "\n";
    bool all_io = !report.io_verdicts.empty();
    for (const auto& [l, v] : report.io_verdicts) all_io = all_io && v == Verdict::almost_surely_io;
    if (all_io) {
        const auto& first_rule = report.applied.empty() ? std::string() : report.applied.front();
        os << "all offsets i.o.";
        if (first_rule.find("Theorem B") != std::string::npos)
            os << " (" << first_rule.substr(first_rule.find(": ") + 2) << ")";
        os << "\n";
    }
    os << "offset verdicts:\n";
    for (const auto& [l, v] : report.io_verdicts) {
        os << "  l=" << l << ": " << to_string(v) << "\n";
    }
    os << "applied rules:\n";
    for (const auto& a : report.applied) os << "  " << a << "\n";
    if (!report.precondition_failures.empty()) {
        os << "precondition failures:\n";
        for (const auto& f : report.precondition_failures) os << "  " << f << "\n";
    }
    return os.str();
}

std::vector<ThresholdRow> threshold_table(const DiscreteDistribution& dist, std::uint64_t n_max,
                                          unsigned points_per_decade) {
    if (n_max < 1) throw std::invalid_argument("threshold_table: n_max must be >= 1");
    if (points_per_decade < 1) points_per_decade = 1;
    std::vector<ThresholdRow> rows;
    std::uint64_t last_n = 0;
    const double log_nmax = std::log(static_cast<double>(n_max));
    const double step = std::log(10.0) / points_per_decade;
    auto add_row = [&](std::uint64_t n) {
        ThresholdRow row;
        row.n = n;
        row.log_n = std::log(static_cast<double>(n));
        row.a_n = dist.threshold_sequence(n);
        row.R_at_a = dist.log_tail(row.a_n);
        row.r_at_a = row.a_n >= 1 ? dist.hazard_increment(row.a_n)
                                  : std::numeric_limits<double>::quiet_NaN();
        rows.push_back(row);
        last_n = n;
    };
    for (double ln = 0.0; ln <= log_nmax + 1e-12; ln += step) {
        const auto n = static_cast<std::uint64_t>(std::llround(std::exp(ln)));
        if (n <= last_n || n > n_max) continue;
        add_row(n);
    }
    if (last_n < n_max) add_row(n_max);  // the grid always ends on n_max
    return rows;
}

double poisson_threshold_approximation(double lambda, double log_n) {
    if (!(log_n > std::exp(1.0)))  // need L3 defined: ln ln ln n > 0 wants ln n > e
        return std::numeric_limits<double>::quiet_NaN();
    const double l2 = std::log(log_n);
    const double l3 = std::log(l2);
    return log_n / l2 * (1.0 + (l3 + std::log(lambda) + 1.0) / l2);
}

void write_tables_csv(std::ostream& os, const std::vector<ThresholdRow>& rows) {
    os << "n,a_n,R_a_n,r_a_n\n";
    for (const auto& row : rows) {
        os << row.n << "," << row.a_n << "," << fmt_double(row.R_at_a) << ",";
        if (row.a_n >= 1) os << fmt_double(row.r_at_a);
        os << "\n";
    }
}

void write_ledger_csv(std::ostream& os, const ExpectedHitsLedger& ledger) {
    os << "k,p_lo,p_hi,c_lo,c_hi\n";
    for (std::size_t i = 0; i < ledger.per_block.size(); ++i) {
        os << (i + 1) << "," << fmt_double(ledger.per_block[i].lo) << ","
           << fmt_double(ledger.per_block[i].hi) << "," << fmt_double(ledger.cumulative[i].lo)
           << "," << fmt_double(ledger.cumulative[i].hi) << "\n";
    }
}

void write_ensemble_csv(std::ostream& os, const BlockHitMatrix& matrix) {
    os << "path,k,event,l,hit\n";
    const auto& cfg = matrix.config();
    for (std::uint32_t p = 0; p < cfg.paths; ++p)
        for (std::uint64_t k = 1; k <= cfg.K; ++k)
            for (const EventFamily f : cfg.families())
                for (int l = cfg.l_min; l <= cfg.l_max; ++l)
                    os << p << "," << k << "," << to_string(f) << "," << l << ","
                       << (matrix.hit(f, l, p, k) ? 1 : 0) << "\n";
}

nlohmann::json summary_json(const BlockHitMatrix& matrix, const DiscreteDistribution& dist) {
    const auto& cfg = matrix.config();
    nlohmann::json j;
    j["distribution"] = distribution_to_json(dist);
    j["K"] = cfg.K;
    j["paths"] = cfg.paths;
    j["seed"] = cfg.seed;
    j["offsets"] = {cfg.l_min, cfg.l_max};
    nlohmann::json events = nlohmann::json::array();
    for (const EventFamily f : cfg.families()) {
        for (int l = cfg.l_min; l <= cfg.l_max; ++l) {
            nlohmann::json blocks = nlohmann::json::array();
            for (std::uint64_t k = 1; k <= cfg.K; ++k) {
                const ProbBounds& p = matrix.block_probability(f, l, k);
                blocks.push_back({{"k", k},
                                  {"rate", matrix.block_hit_rate(f, l, k)},
                                  {"p_lo", p.lo},
                                  {"p_hi", p.hi}});
            }
            events.push_back({{"family", to_string(f)}, {"l", l}, {"blocks", blocks}});
        }
    }
    j["events"] = events;
    return j;
}

VerifyReport verify_ensemble(const BlockHitMatrix& matrix, const DiscreteDistribution& ledger_dist,
                             double n_sigma) {
    const auto& cfg = matrix.config();
    VerifyReport report;
    for (const EventFamily f : cfg.families()) {
        for (int l = cfg.l_min; l <= cfg.l_max; ++l) {
            const ExpectedHitsLedger ledger = expected_hits(ledger_dist, cfg.K, l, f);
            VerifyCheck check;
            check.family = f;
            check.l = l;
            check.expected = ledger.total();
            check.mean_hits = matrix.mean_total_hits(f, l);
            // standard error of the mean: sample sd across paths, floored by
            // the independent-binomial approximation
            double var_binom = 0.0;
            for (const auto& p : ledger.per_block) var_binom += p.mid() * (1.0 - p.mid());
            const double sd = std::max(matrix.sd_total_hits(f, l), std::sqrt(var_binom));
            check.sigma = sd / std::sqrt(static_cast<double>(cfg.paths));
            const double dev = std::abs(check.mean_hits - check.expected);
            check.z = check.sigma > 0.0 ? dev / check.sigma : (dev > 0.0 ? HUGE_VAL : 0.0);
            check.pass = dev <= n_sigma * check.sigma + 1e-12;
            check.plateau = ledger_plateaued(ledger);
            check.note = check.plateau ? "plateau, consistent with convergence"
                                       : "persistent growth, consistent with divergence";
            report.all_pass = report.all_pass && check.pass;
            report.checks.push_back(check);
        }
    }
    return report;
}

}  // namespace recmax

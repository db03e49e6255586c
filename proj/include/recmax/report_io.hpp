#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "recmax/asymptotics.hpp"
#include "recmax/distribution.hpp"
#include "recmax/oracle.hpp"
#include "recmax/record_sim.hpp"

namespace recmax {

/// Distribution specification: {"family":"poisson","lambda":1.0} |
/// {"family":"geometric","q":0.5} |
/// {"family":"pmf_table","p":[...],"tail_rate":0.5}.
/// Throws std::invalid_argument on malformed input.
DiscreteDistribution parse_distribution(const nlohmann::json& j);
nlohmann::json distribution_to_json(const DiscreteDistribution& dist);

/// Regime specification: {"regime":"bounded","C0":0.7} | {"regime":"sublog2"}
/// | {"regime":"log2linear","c":0.4} | {"regime":"loglinear","c":1.0} |
/// {"regime":"superlog","r_over_n_to_zero":true}; optional "monotone".
RateRegime parse_regime(const nlohmann::json& j);
nlohmann::json regime_to_json(const RateRegime& regime);

/// "a:b" -> [a, b]
std::pair<int, int> parse_offsets(const std::string& text);

/// %.17g, byte-stable across runs
std::string fmt_double(double x);

nlohmann::json report_to_json(const AsymptoticReport& report);
std::string report_to_text(const AsymptoticReport& report);

/// One row of the threshold table: n (as a log time), a_n, R(a_n), r(a_n).
struct ThresholdRow {
    double log_n = 0.0;
    std::uint64_t n = 0;  // 0 when n exceeds integer range
    std::uint64_t a_n = 0;
    double R_at_a = 0.0;
    double r_at_a = 0.0;  // NaN when a_n == 0
};
std::vector<ThresholdRow> threshold_table(const DiscreteDistribution& dist, std::uint64_t n_max,
                                          unsigned points_per_decade);

/// a_n expansion for the Poisson family on decade grids:
/// (ln n / L2(n)) (1 + (L3(n) + ln lambda + 1) / L2(n)); NaN below n = 16.
double poisson_threshold_approximation(double lambda, double log_n);

void write_tables_csv(std::ostream& os, const std::vector<ThresholdRow>& rows);
void write_ledger_csv(std::ostream& os, const ExpectedHitsLedger& ledger);
/// columns: path,k,event,l,hit
void write_ensemble_csv(std::ostream& os, const BlockHitMatrix& matrix);
/// per-block hit rates next to the exact probabilities
nlohmann::json summary_json(const BlockHitMatrix& matrix, const DiscreteDistribution& dist);

/// One statistical comparison of simulated hits against the exact ledger.
struct VerifyCheck {
    EventFamily family = EventFamily::lower_equal;
    int l = 0;
    double mean_hits = 0.0;
    double expected = 0.0;
    double sigma = 0.0;  // standard error of the mean estimate
    double z = 0.0;
    bool plateau = false;
    bool pass = false;
    std::string note;
};

struct VerifyReport {
    std::vector<VerifyCheck> checks;
    bool all_pass = true;
};

/// Compares mean total hits per path against the ledger of `ledger_dist` for
/// every family and offset of the ensemble, flagging deviations beyond
/// n_sigma standard errors (sample-based, with an independent-binomial
/// floor). Feeding a ledger distribution different from the simulated one is
/// the intended negative control.
VerifyReport verify_ensemble(const BlockHitMatrix& matrix, const DiscreteDistribution& ledger_dist,
                             double n_sigma = 3.0);

}  // namespace recmax

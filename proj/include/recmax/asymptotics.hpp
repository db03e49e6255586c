#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "recmax/distribution.hpp"

namespace recmax {

/// Declared asymptotic shape of the hazard increments r(n). Convergence of
/// the criterion series is decided symbolically from this declaration, never
/// from partial sums.
struct RateRegime {
    enum class Kind { bounded, sublog2, log2linear, loglinear, superlog };

    Kind kind = Kind::bounded;
    /// C0 for bounded (r(n) <= C0); the coefficient c otherwise.
    double c = 0.0;
    bool monotone = true;
    bool r_to_infinity = false;
    bool r_over_n_to_zero = true;

    /// r(n) <= C0 for all n.
    static RateRegime bounded(double C0, bool monotone = true);
    /// r(n) = chi(n) L2(n) -> infinity with chi(n) -> 0, r increasing.
    static RateRegime sublog2();
    /// r(n) = (c + o(1)) L2(n), r monotone.
    static RateRegime log2linear(double c);
    /// r(n) = c L(n) + O(1), r monotone.
    static RateRegime loglinear(double c);
    /// r monotone with r(n)/L(n) -> infinity; whether r(n)/n -> 0 must be declared.
    static RateRegime superlog(bool r_over_n_to_zero);

    std::string describe() const;
};

/// One of the two criterion series: sum_k exp(-j r(k)) (plain_exp) or
/// sum_k exp(-exp(j r(k))) (double_exp).
struct SeriesKind {
    enum class Family { plain_exp, double_exp };
    Family family = Family::plain_exp;
    unsigned j = 0;
};

enum class Convergence { converges, diverges, undecidable };

enum class Verdict { almost_surely_io, almost_surely_finitely_often, undecided };

/// Verdict plus the rule that produced it; `failure` is set when a
/// precondition of the applicable theorem is not declared by the regime.
struct Classification {
    Verdict verdict = Verdict::undecided;
    std::string rule;
    std::optional<std::string> failure;
};

struct OffsetLimit {
    enum class Kind { finite, infinite, undecided };
    Kind kind = Kind::undecided;
    int value = 0;  // meaningful when finite

    static OffsetLimit finite(int m) { return {Kind::finite, m}; }
    static OffsetLimit infinite() { return {Kind::infinite, 0}; }
    static OffsetLimit undecided() { return {Kind::undecided, 0}; }
    bool is_finite() const { return kind == Kind::finite; }
    friend bool operator==(const OffsetLimit& a, const OffsetLimit& b) {
        return a.kind == b.kind && (a.kind != Kind::finite || a.value == b.value);
    }
};

/// Full classification of the almost-sure behaviour of M_n - a_n.
struct AsymptoticReport {
    RateRegime regime;
    /// m with limsup (M_n - a_n) = m, when decided.
    OffsetLimit limsup_offset;
    /// m with liminf (M_n - a_n) = -m, when decided.
    OffsetLimit liminf_offset;
    /// verdict for {M_n = a_n + l i.o.} per offset l (both signs).
    std::map<int, Verdict> io_verdicts;
    /// theorem tags with the series and j actually used, one entry per offset.
    std::vector<std::string> applied;
    std::vector<std::string> precondition_failures;
    bool fitted = false;  // regime came from a least-squares fit, not a declaration
};

/// Decides convergence of a criterion series for a declared regime.
/// j = 0 always diverges. Boundary cases whose answer genuinely depends on
/// the undeclared correction term return `undecidable`.
Convergence decide_series(const RateRegime& regime, SeriesKind series);

/// Verdict for {M_n = a_n + l i.o.}, l >= 0 (series plain_exp, j = l-1).
Classification classify_upper(const RateRegime& regime, int l);

enum class LowerMode { at_most, equal };

/// Verdict for {M_n <= a_n - l i.o.} (at_most) or {M_n = a_n - l i.o.}
/// (equal), l >= 1. Series double_exp, j = l-1; the `equal` mode additionally
/// requires r(n)/n -> 0.
Classification classify_lower(const RateRegime& regime, int l, LowerMode mode);

/// min{m >= 1 : plain_exp(j=m) converges}; infinite when it diverges for all
/// j; undecided when a needed decision is undecidable.
OffsetLimit limsup_offset(const RateRegime& regime);

/// Same with the double_exp series; liminf (M_n - a_n) = -m.
OffsetLimit liminf_offset(const RateRegime& regime);

/// Per-offset verdicts over [l_min, l_max] with offsets, applied rules and
/// precondition flags filled in.
AsymptoticReport full_report(const RateRegime& regime, int l_min, int l_max);

/// Diagnostic partial sums S_J of the criterion series evaluated from exact
/// hazards of a concrete distribution, J = 1..K. Never used to decide
/// convergence.
std::vector<double> series_partial_sums(const DiscreteDistribution& dist, SeriesKind series,
                                        std::uint64_t K);

/// Advisory least-squares fit of r(k), k in [k0, K], to the candidate regime
/// shapes. The result is marked fitted, not asserted.
struct FittedRegime {
    RateRegime regime;
    double rss = 0.0;
    std::string note;
};
FittedRegime fit_regime(const DiscreteDistribution& dist, std::uint64_t k0, std::uint64_t K);

std::string to_string(Verdict v);
std::string to_string(Convergence c);
std::string to_string(const OffsetLimit& o);

}  // namespace recmax

#include "recmax/asymptotics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace recmax {
namespace {

// Relative slack for detecting the boundary j*c == 1: a declared coefficient
// this close to 1/j is treated as sitting on it.
constexpr double kBoundaryTol = 1e-9;

bool on_unit_boundary(double jc) { return std::abs(jc - 1.0) <= kBoundaryTol; }

std::string series_text(SeriesKind s) {
    std::ostringstream os;
    os << (s.family == SeriesKind::Family::plain_exp ? "sum exp(-j r(k))"
                                                     : "sum exp(-exp(j r(k))))")
       << " with j=" << s.j;
    return os.str();
}

}  // namespace

RateRegime RateRegime::bounded(double C0, bool monotone) {
    if (!(C0 > 0.0)) throw std::invalid_argument("bounded regime: C0 must be > 0");
    return RateRegime{Kind::bounded, C0, monotone, false, true};
}

RateRegime RateRegime::sublog2() {
    return RateRegime{Kind::sublog2, 0.0, true, true, true};
}

RateRegime RateRegime::log2linear(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("log2linear regime: c must be > 0");
    return RateRegime{Kind::log2linear, c, true, true, true};
}

RateRegime RateRegime::loglinear(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("loglinear regime: c must be > 0");
    return RateRegime{Kind::loglinear, c, true, true, true};
}

RateRegime RateRegime::superlog(bool r_over_n_to_zero) {
    return RateRegime{Kind::superlog, 0.0, true, true, r_over_n_to_zero};
}

std::string RateRegime::describe() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::bounded: os << "bounded(C0=" << c << ")"; break;
        case Kind::sublog2: os << "sublog2"; break;
        case Kind::log2linear: os << "log2linear(c=" << c << ")"; break;
        case Kind::loglinear: os << "loglinear(c=" << c << ")"; break;
        case Kind::superlog:
            os << "superlog(r/n->0: " << (r_over_n_to_zero ? "yes" : "no") << ")";
            break;
    }
    return os.str();
}

Convergence decide_series(const RateRegime& regime, SeriesKind series) {
    if (series.j == 0) return Convergence::diverges;  // all terms bounded below
    const double jc = static_cast<double>(series.j) * regime.c;
    switch (regime.kind) {
        case RateRegime::Kind::bounded:
        case RateRegime::Kind::sublog2:
            // terms are eventually >= k^{-eps} for every eps > 0
            return Convergence::diverges;
        case RateRegime::Kind::superlog:
            return Convergence::converges;
        case RateRegime::Kind::loglinear:
            if (series.family == SeriesKind::Family::double_exp)
                return Convergence::converges;  // terms exp(-const * k^{jc})
            // plain: terms k^{-jc} up to a bounded factor, so the boundary
            // jc == 1 still diverges (harmonic comparison).
            return jc > 1.0 && !on_unit_boundary(jc) ? Convergence::converges
                                                     : Convergence::diverges;
        case RateRegime::Kind::log2linear:
            if (series.family == SeriesKind::Family::plain_exp)
                return Convergence::diverges;  // terms (ln k)^{-jc}
            // double: terms exp(-(ln k)^{jc + o(1)}); the o(1) decides at jc == 1
            if (on_unit_boundary(jc)) return Convergence::undecidable;
            return jc > 1.0 ? Convergence::converges : Convergence::diverges;
    }
    return Convergence::undecidable;
}

Classification classify_upper(const RateRegime& regime, int l) {
    if (l < 0) throw std::invalid_argument("classify_upper: l must be >= 0");
    if (!regime.monotone || !regime.r_to_infinity) {
        Classification c;
        c.failure = "Theorem 1 needs monotone r with r(n) -> infinity";
        c.rule = "Theorem 1 not applicable";
        return c;
    }
    if (l <= 1) return {Verdict::almost_surely_io, "Theorem 1(i)", std::nullopt};
    const SeriesKind s{SeriesKind::Family::plain_exp, static_cast<unsigned>(l - 1)};
    switch (decide_series(regime, s)) {
        case Convergence::diverges:
            return {Verdict::almost_surely_io, "Theorem 1(ii): " + series_text(s) + " diverges",
                    std::nullopt};
        case Convergence::converges:
            return {Verdict::almost_surely_finitely_often,
                    "Theorem 1(ii): " + series_text(s) + " converges", std::nullopt};
        case Convergence::undecidable:
            return {Verdict::undecided, "Theorem 1(ii): " + series_text(s) + " undecidable",
                    std::nullopt};
    }
    return {};
}

Classification classify_lower(const RateRegime& regime, int l, LowerMode mode) {
    if (l < 1) throw std::invalid_argument("classify_lower: l must be >= 1");
    if (!regime.monotone || !regime.r_to_infinity) {
        Classification c;
        c.failure = "Theorems 2/3 need monotone r with r(n) -> infinity";
        c.rule = "Theorems 2/3 not applicable";
        return c;
    }
    const SeriesKind s{SeriesKind::Family::double_exp, static_cast<unsigned>(l - 1)};
    if (mode == LowerMode::at_most) {
        if (l == 1) return {Verdict::almost_surely_io, "Theorem 2(i)", std::nullopt};
        switch (decide_series(regime, s)) {
            case Convergence::diverges:
                return {Verdict::almost_surely_io,
                        "Theorem 2(ii): " + series_text(s) + " diverges", std::nullopt};
            case Convergence::converges:
                return {Verdict::almost_surely_finitely_often,
                        "Theorem 2(ii): " + series_text(s) + " converges", std::nullopt};
            case Convergence::undecidable:
                return {Verdict::undecided, "Theorem 2(ii): " + series_text(s) + " undecidable",
                        std::nullopt};
        }
        return {};
    }
    // equal mode
    switch (decide_series(regime, s)) {
        case Convergence::converges:
            // the equality event is contained in the at-most event
            return {Verdict::almost_surely_finitely_often,
                    "Theorem 2(ii): " + series_text(s) + " converges", std::nullopt};
        case Convergence::diverges:
            if (!regime.r_over_n_to_zero) {
                Classification c;
                c.failure = "Theorem 3 needs r(n)/n -> 0";
                c.rule = "Theorem 3 not applicable";
                return c;
            }
            return {Verdict::almost_surely_io,
                    "Theorem 3: " + series_text(s) + " diverges and r(n)/n -> 0", std::nullopt};
        case Convergence::undecidable:
            return {Verdict::undecided, "Theorem 3: " + series_text(s) + " undecidable",
                    std::nullopt};
    }
    return {};
}

namespace {

OffsetLimit first_convergent_j(const RateRegime& regime, SeriesKind::Family family) {
    // Theorem B regimes: every offset is hit i.o., so both extremes are
    // infinite. Item (ii) needs no monotonicity at all; item (i) keeps the
    // increasing r of its definition.
    if (regime.kind == RateRegime::Kind::bounded) return OffsetLimit::infinite();
    if (regime.kind == RateRegime::Kind::sublog2)
        return regime.monotone ? OffsetLimit::infinite() : OffsetLimit::undecided();
    if (!regime.monotone || !regime.r_to_infinity) return OffsetLimit::undecided();
    if (regime.kind == RateRegime::Kind::log2linear && family == SeriesKind::Family::plain_exp)
        return OffsetLimit::infinite();  // divergent at every j
    for (unsigned m = 1; m <= 10'000'000; ++m) {
        switch (decide_series(regime, {family, m})) {
            case Convergence::converges:
                return OffsetLimit::finite(static_cast<int>(m));
            case Convergence::undecidable:
                return OffsetLimit::undecided();
            case Convergence::diverges:
                break;
        }
    }
    return OffsetLimit::undecided();
}

}  // namespace

OffsetLimit limsup_offset(const RateRegime& regime) {
    return first_convergent_j(regime, SeriesKind::Family::plain_exp);
}

OffsetLimit liminf_offset(const RateRegime& regime) {
    return first_convergent_j(regime, SeriesKind::Family::double_exp);
}

AsymptoticReport full_report(const RateRegime& regime, int l_min, int l_max) {
    if (l_min > l_max) throw std::invalid_argument("full_report: empty offset range");
    if (static_cast<long>(l_max) - l_min > 10'000)
        throw std::invalid_argument("full_report: offset range too wide");
    AsymptoticReport rep;
    rep.regime = regime;
    rep.limsup_offset = limsup_offset(regime);
    rep.liminf_offset = liminf_offset(regime);

    const bool theorem_b = regime.kind == RateRegime::Kind::bounded ||
                           regime.kind == RateRegime::Kind::sublog2;
    auto record = [&](int l, const Classification& c) {
        rep.io_verdicts[l] = c.verdict;
        std::ostringstream os;
        os << "l=" << l << ": " << c.rule;
        rep.applied.push_back(os.str());
        if (c.failure) {
            bool seen = false;
            for (const auto& f : rep.precondition_failures) seen = seen || f == *c.failure;
            if (!seen) rep.precondition_failures.push_back(*c.failure);
        }
    };

    for (int l = l_min; l <= l_max; ++l) {
        if (theorem_b) {
            const char* tag = regime.kind == RateRegime::Kind::bounded ? "Theorem B(ii)"
                                                                       : "Theorem B(i)";
            record(l, {Verdict::almost_surely_io, tag, std::nullopt});
            continue;
        }
        if (l >= 0) {
            record(l, classify_upper(regime, l));
        } else if (l == -1 && rep.limsup_offset.is_finite()) {
            // with the plain series convergent at m and divergent at m-1 the
            // offset -1 is hit i.o. without needing r(n)/n -> 0
            record(l, {Verdict::almost_surely_io, "Corollary 1(ii)", std::nullopt});
        } else {
            record(l, classify_lower(regime, -l, LowerMode::equal));
        }
    }
    return rep;
}

std::vector<double> series_partial_sums(const DiscreteDistribution& dist, SeriesKind series,
                                        std::uint64_t K) {
    if (K == 0) throw std::invalid_argument("series_partial_sums: K must be >= 1");
    std::vector<double> sums;
    sums.reserve(K);
    double acc = 0.0;
    for (std::uint64_t k = 1; k <= K; ++k) {
        const double jr = static_cast<double>(series.j) * dist.hazard_increment(k);
        double term;
        if (series.family == SeriesKind::Family::plain_exp) {
            term = std::exp(-jr);
        } else {
            const double inner = std::exp(jr);
            term = std::isinf(inner) ? 0.0 : std::exp(-inner);
        }
        acc += term;
        sums.push_back(acc);
    }
    return sums;
}

FittedRegime fit_regime(const DiscreteDistribution& dist, std::uint64_t k0, std::uint64_t K) {
    if (k0 < 2 || K < k0 + 8)
        throw std::invalid_argument("fit_regime: need k0 >= 2 and K >= k0 + 8");
    std::vector<double> ks, rs;
    for (std::uint64_t k = k0; k <= K; ++k) {
        ks.push_back(static_cast<double>(k));
        rs.push_back(dist.hazard_increment(k));
    }
    const std::size_t n = rs.size();

    auto sse_for = [&](auto&& model) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = rs[i] - model(ks[i]);
            s += d * d;
        }
        return s;
    };
    // constant level
    double mean = 0.0;
    for (double r : rs) mean += r;
    mean /= static_cast<double>(n);
    const double sse_const = sse_for([&](double) { return mean; });
    // c * L2(k), through the origin
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(std::log(ks[i]));
        num += rs[i] * x;
        den += x * x;
    }
    const double c_l2 = num / den;
    const double sse_l2 = sse_for([&](double k) { return c_l2 * std::log(std::log(k)); });
    // c * L(k) + b
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = std::log(ks[i]);
        sx += x; sy += rs[i]; sxx += x * x; sxy += x * rs[i];
    }
    const double dn = static_cast<double>(n);
    const double c_l1 = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    const double b_l1 = (sy - c_l1 * sx) / dn;
    const double sse_l1 = sse_for([&](double k) { return c_l1 * std::log(k) + b_l1; });
    // c * k + b (super-logarithmic growth)
    sx = sy = sxx = sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sx += ks[i]; sy += rs[i]; sxx += ks[i] * ks[i]; sxy += ks[i] * rs[i];
    }
    const double c_k = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
    const double b_k = (sy - c_k * sx) / dn;
    const double sse_k = sse_for([&](double k) { return c_k * k + b_k; });

    FittedRegime out;
    double best = sse_const;
    double rmax = 0.0;
    bool nondecreasing = true;
    for (std::size_t i = 0; i < n; ++i) {
        rmax = std::max(rmax, rs[i]);
        if (i > 0 && rs[i] < rs[i - 1] - 1e-12) nondecreasing = false;
    }
    out.regime = RateRegime::bounded(rmax, nondecreasing);
    // a richer shape must earn its keep: require a clear residual drop
    const auto improves = [&](double sse) { return sse < 0.9 * best - 1e-12; };
    if (improves(sse_l2) && c_l2 > 0) {
        best = sse_l2;
        // distinguish a vanishing coefficient from a stable one by the trend
        // of r(k)/L2(k) between the two halves of the window
        double chi_lo = 0, chi_hi = 0;
        for (std::size_t i = 0; i < n / 2; ++i) chi_lo += rs[i] / std::log(std::log(ks[i]));
        for (std::size_t i = n / 2; i < n; ++i) chi_hi += rs[i] / std::log(std::log(ks[i]));
        chi_lo /= static_cast<double>(n / 2);
        chi_hi /= static_cast<double>(n - n / 2);
        out.regime = (chi_hi < 0.8 * chi_lo) ? RateRegime::sublog2()
                                             : RateRegime::log2linear(c_l2);
    }
    if (improves(sse_l1) && c_l1 > 0) {
        best = sse_l1;
        out.regime = RateRegime::loglinear(c_l1);
    }
    if (improves(sse_k) && c_k > 0) {
        best = sse_k;
        out.regime = RateRegime::superlog(false);
    }
    out.rss = best;
    out.note = "fitted, not asserted (least squares on r(k), k in [" + std::to_string(k0) +
               ", " + std::to_string(K) + "])";
    return out;
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::almost_surely_io: return "io";
        case Verdict::almost_surely_finitely_often: return "finitely_often";
        case Verdict::undecided: return "undecided";
    }
    return "?";
}

std::string to_string(Convergence c) {
    switch (c) {
        case Convergence::converges: return "converges";
        case Convergence::diverges: return "diverges";
        case Convergence::undecidable: return "undecidable";
    }
    return "?";
}

std::string to_string(const OffsetLimit& o) {
    switch (o.kind) {
        case OffsetLimit::Kind::finite: return std::to_string(o.value);
        case OffsetLimit::Kind::infinite: return "infinity";
        case OffsetLimit::Kind::undecided: return "undecided";
    }
    return "?";
}

}  // namespace recmax

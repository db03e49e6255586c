#include "recmax/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "recmax/rng.hpp"

namespace recmax {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ln(-ln(1 - e^{-R})) without intermediate underflow: for large R the inner
// value is e^{-R}(1 + e^{-R}/2 + ...), so the outer log is -R + O(e^{-R}).
double log_neg_log1mexp(double R) {
    if (R >= 30.0) return -R + 0.5 * std::exp(-R);
    return std::log(-log1mexp(R));
}

// n * (-ln(1 - e^{-R(x+1)})), the exponent t with P(M_n <= x) = e^{-t}.
double neg_log_max_cdf(const DiscreteDistribution& dist, LogTime n, std::int64_t x) {
    if (x < 0) return kInf;
    const double R = dist.log_tail(static_cast<std::uint64_t>(x) + 1);
    if (n.has_count() && n.count <= (std::uint64_t{1} << 53))
        return static_cast<double>(n.count) * (-log1mexp(R));
    return std::exp(n.log_value + log_neg_log1mexp(R));
}

// e^{-a} - e^{-b} for a <= b, without cancellation.
double exp_diff(double a, double b) {
    if (std::isinf(a)) return 0.0;
    return std::exp(-a) * (-std::expm1(a - b));
}

double clamp01(double p) { return std::min(1.0, std::max(0.0, p)); }

struct Block {
    LogTime start;
    LogTime last;  // n_{k+1} - 1
    bool empty = false;
};

Block block_of(const DiscreteDistribution& dist, std::uint64_t k) {
    Block b;
    b.start = dist.block_start(k);
    const LogTime next = dist.block_start(k + 1);
    if (b.start.has_count() && next.has_count()) {
        b.empty = next.count <= b.start.count;
        b.last = b.empty ? b.start : LogTime::from_count(next.count - 1);
    } else {
        b.empty = next.log_value <= b.start.log_value;
        b.last = LogTime::from_log(next.log_value);  // the -1 is invisible at this scale
    }
    return b;
}

}  // namespace

const char* to_string(EventFamily f) {
    switch (f) {
        case EventFamily::upper: return "upper";
        case EventFamily::lower_at_most: return "lower_at_most";
        case EventFamily::lower_equal: return "lower_equal";
        case EventFamily::lower_equal_anywhere: return "lower_equal_anywhere";
    }
    return "?";
}

double max_log_cdf(const DiscreteDistribution& dist, LogTime n, std::int64_t x) {
    return -neg_log_max_cdf(dist, n, x);
}

double max_cdf(const DiscreteDistribution& dist, LogTime n, std::int64_t x) {
    return std::exp(max_log_cdf(dist, n, x));
}

double max_cdf(const DiscreteDistribution& dist, std::uint64_t n, std::int64_t x) {
    return max_cdf(dist, LogTime::from_count(n), x);
}

double max_pmf(const DiscreteDistribution& dist, LogTime n, std::int64_t x) {
    if (x < 0) return 0.0;
    return exp_diff(neg_log_max_cdf(dist, n, x), neg_log_max_cdf(dist, n, x - 1));
}

ProbBounds hit_probability_exact(const DiscreteDistribution& dist, std::uint64_t k, int l,
                                 EventFamily family) {
    if (k == 0) throw std::invalid_argument("hit_probability_exact: k must be >= 1");
    const std::int64_t ki = static_cast<std::int64_t>(k);
    if (family == EventFamily::lower_at_most || family == EventFamily::lower_equal) {
        const std::int64_t v = ki - l;
        if (v < 0) return {0.0, 0.0};
        const LogTime s = dist.block_start(k);
        const double p = family == EventFamily::lower_at_most ? max_cdf(dist, s, v)
                                                              : max_pmf(dist, s, v);
        return {p, p};
    }
    // visit events: first-visit decomposition of {some n in I_k has M_n = v}
    // with v = k+l (upper) or v = k-l (block-wide lower equality)
    const std::int64_t v = family == EventFamily::upper ? ki + l : ki - l;
    if (v < 0) return {0.0, 0.0};
    const Block b = block_of(dist, k);
    if (b.empty) return {0.0, 0.0};
    const double at_start = max_pmf(dist, b.start, v);
    // P(first visit at n+1) = P(M_n <= v-1) P(X = v); summing the geometric
    // run of P(M_n <= v-1) over n = n_k .. n_{k+1}-2 gives
    // (C(n_k, v-1) - C(n_{k+1}-1, v-1)) / (1 - beta) with beta = 1 - T(v),
    // and p_v / (1 - beta) = P(X = v | X >= v) = 1 - e^{-r(v+1)}.
    const double q_v = -std::expm1(-dist.hazard_increment(static_cast<std::uint64_t>(v) + 1));
    const double run = exp_diff(neg_log_max_cdf(dist, b.start, v - 1),
                                neg_log_max_cdf(dist, b.last, v - 1));
    const double p = clamp01(at_start + q_v * run);
    return {p, p};
}

ProbBounds upper_hit_bounds(const DiscreteDistribution& dist, std::uint64_t k, int l) {
    if (k == 0) throw std::invalid_argument("upper_hit_bounds: k must be >= 1");
    const std::int64_t v = static_cast<std::int64_t>(k) + l;
    if (v < 0) return {0.0, 0.0};
    const Block b = block_of(dist, k);
    if (b.empty) return {0.0, 0.0};
    const double lo = max_pmf(dist, b.last, v);
    const double hi = clamp01(exp_diff(neg_log_max_cdf(dist, b.start, v),
                                       neg_log_max_cdf(dist, b.last, v - 1)));
    return {std::min(lo, hi), hi};
}

ExpectedHitsLedger expected_hits(const DiscreteDistribution& dist, std::uint64_t K, int l,
                                 EventFamily family) {
    ExpectedHitsLedger ledger;
    ledger.family = family;
    ledger.l = l;
    ledger.per_block.reserve(K);
    ledger.cumulative.reserve(K);
    double clo = 0.0, chi = 0.0, comp_lo = 0.0, comp_hi = 0.0;
    for (std::uint64_t k = 1; k <= K; ++k) {
        const ProbBounds p = hit_probability_exact(dist, k, l, family);
        ledger.per_block.push_back(p);
        double y = p.lo - comp_lo, t = clo + y;
        comp_lo = (t - clo) - y;
        clo = t;
        y = p.hi - comp_hi;
        t = chi + y;
        comp_hi = (t - chi) - y;
        chi = t;
        ledger.cumulative.push_back({clo, chi});
    }
    return ledger;
}

bool ledger_plateaued(const ExpectedHitsLedger& ledger, double tol) {
    if (ledger.cumulative.empty()) return true;
    const double total = ledger.cumulative.back().mid();
    if (total <= 0.0) return true;
    const std::size_t cut = ledger.cumulative.size() * 3 / 4;
    const double tail = total - ledger.cumulative[cut - 1].mid();
    return tail < tol * total;
}

DirectSampler::DirectSampler(const DiscreteDistribution& dist) : dist_(dist) {
    // table up to where the remaining tail mass is negligible (R > ln 1e18)
    for (std::uint64_t i = 0;; ++i) {
        const double R = dist.log_tail(i + 1);
        cdf_.push_back(-std::expm1(-R));
        if (R > 41.5 || cdf_.size() >= 1'000'000) break;
    }
}

std::int64_t DirectSampler::draw(std::mt19937_64& rng) const {
    const double u = uniform_open01(rng);
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it != cdf_.end()) return static_cast<std::int64_t>(it - cdf_.begin());
    // beyond the table (mass < 1e-18): invert on R directly
    std::uint64_t i = cdf_.size();
    const double target = -std::log1p(-u);
    while (dist_.log_tail(i + 1) < target) ++i;
    return static_cast<std::int64_t>(i);
}

std::int64_t DirectSampler::max_of(std::uint64_t n, std::mt19937_64& rng) const {
    std::int64_t best = -1;
    for (std::uint64_t i = 0; i < n; ++i) best = std::max(best, draw(rng));
    return best;
}

std::int64_t direct_simulate_max(const DiscreteDistribution& dist, std::uint64_t n,
                                 std::mt19937_64& rng) {
    if (n == 0 || n > 10'000'000)
        throw std::invalid_argument("direct_simulate_max: n outside the direct budget [1, 1e7]");
    return DirectSampler(dist).max_of(n, rng);
}

}  // namespace recmax

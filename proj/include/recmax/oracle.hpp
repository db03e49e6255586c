#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "recmax/distribution.hpp"
#include "recmax/logdomain.hpp"

namespace recmax {

/// The block-event families on I_k = [n_k, n_{k+1}):
///   upper(l):                some n in I_k has M_n = k + l
///   lower_at_most(l):        M at time n_k is <= k - l
///   lower_equal(l):          M at time n_k is == k - l
///   lower_equal_anywhere(l): some n in I_k has M_n = k - l (the block-wide
///                            reading of the equality event, reported only
///                            under an explicit flag)
enum class EventFamily { upper, lower_at_most, lower_equal, lower_equal_anywhere };

const char* to_string(EventFamily f);

/// A probability known exactly (lo == hi) or bracketed by rigorous bounds.
struct ProbBounds {
    double lo = 0.0;
    double hi = 0.0;
    bool exact() const { return lo == hi; }
    double mid() const { return 0.5 * (lo + hi); }
};

/// ln P(M_n <= x) = n * ln(1 - exp(-R(x+1))), exact in log domain for any
/// horizon; -infinity for x < 0.
double max_log_cdf(const DiscreteDistribution& dist, LogTime n, std::int64_t x);

/// P(M_n <= x), stable whether n*T(x+1) is huge or tiny.
double max_cdf(const DiscreteDistribution& dist, LogTime n, std::int64_t x);
double max_cdf(const DiscreteDistribution& dist, std::uint64_t n, std::int64_t x);

/// P(M_n == x) as a stable difference of two max_cdf values.
double max_pmf(const DiscreteDistribution& dist, LogTime n, std::int64_t x);

/// Exact probability of a block event. The lower families are direct max_cdf
/// differences at n_k. The upper family decomposes by the first visit of the
/// level v = k+l: P(M_{n_k} = v) + P(X = v | X >= v) * sum over the block of
/// P(M_n <= v-1), a geometric sum with a closed form. All three come out as
/// exact scalars (lo == hi).
ProbBounds hit_probability_exact(const DiscreteDistribution& dist, std::uint64_t k, int l,
                                 EventFamily family);

/// Conservative bracket for the upper family built only from block-end and
/// block-start marginals: lo = P(M at block end == k+l),
/// hi = P(M at block start <= k+l and M at block end >= k+l).
ProbBounds upper_hit_bounds(const DiscreteDistribution& dist, std::uint64_t k, int l);

/// Per-block probabilities P_k and their running sums C_K for one event
/// family and offset; the reference ledger for every statistical check.
struct ExpectedHitsLedger {
    EventFamily family = EventFamily::lower_equal;
    int l = 0;
    std::vector<ProbBounds> per_block;   // P_k, k = 1..K
    std::vector<ProbBounds> cumulative;  // C_k
    double total() const { return cumulative.empty() ? 0.0 : cumulative.back().mid(); }
};

ExpectedHitsLedger expected_hits(const DiscreteDistribution& dist, std::uint64_t K, int l,
                                 EventFamily family);

/// Plateau test: the last-quartile increments contribute less than
/// `tol` * C_K. The operational surrogate for a convergent criterion series.
bool ledger_plateaued(const ExpectedHitsLedger& ledger, double tol = 1e-4);

/// Draws one value of X by inversion on the exact CDF. Used for desk-scale
/// ground truth; a per-distribution table keeps a draw at a few ns.
class DirectSampler {
public:
    explicit DirectSampler(const DiscreteDistribution& dist);
    std::int64_t draw(std::mt19937_64& rng) const;
    /// max of n i.i.d. draws
    std::int64_t max_of(std::uint64_t n, std::mt19937_64& rng) const;

private:
    const DiscreteDistribution& dist_;
    std::vector<double> cdf_;
};

/// Maximum of n i.i.d. draws, n <= 1e7 (throws std::invalid_argument beyond
/// the budget). The ground-truth sampler for equivalence tests.
std::int64_t direct_simulate_max(const DiscreteDistribution& dist, std::uint64_t n,
                                 std::mt19937_64& rng);

}  // namespace recmax

#pragma once

#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "recmax/logdomain.hpp"

namespace recmax {

/// Raised when a log-tail value leaves the representable range.
class tail_overflow_error : public std::range_error {
public:
    using std::range_error::range_error;
};

/// A discrete distribution on {0,1,2,...} with p_i > 0 for every i, exposing
/// the tail log-function R(k) = -ln P(X >= k) and everything derived from it:
/// hazard increments r(n) = R(n) - R(n-1), the threshold sequence
/// a_n = max{k >= 0 : P(X >= k) >= 1/n}, and the block starts
/// n_k = ceil(exp(R(k))).
///
/// Supported families:
///   - Poisson(lambda), 0 < lambda <= 700 (the validated accuracy envelope);
///   - Geometric(q), P(X = i) = q (1-q)^i, 0 < q < 1;
///   - PmfTable: explicit head probabilities plus a geometric continuation of
///     the tail at a declared rate, so the support stays all of N.
///
/// All operations are pure after cache warm-up. Copies share the memo cache;
/// concurrent readers are safe, writes are serialized internally.
class DiscreteDistribution {
public:
    enum class Family { poisson, geometric, pmf_table };

    static DiscreteDistribution poisson(double lambda);
    static DiscreteDistribution geometric(double q);
    static DiscreteDistribution pmf_table(std::vector<double> probabilities, double tail_rate);

    Family family() const { return family_; }

    /// R(k) to ~1e-13 relative for k <= 1e4; R(0) == 0 exactly.
    double log_tail(std::uint64_t k) const;

    /// r(n) = log_tail(n) - log_tail(n-1), n >= 1. Strictly positive.
    double hazard_increment(std::uint64_t n) const;

    /// ln P(X = k).
    double log_pmf(std::uint64_t k) const;

    /// a_n for an integer n >= 1.
    std::uint64_t threshold_sequence(std::uint64_t n) const;

    /// a_n for a log-domain time, so n beyond integer range is supported.
    /// Values of R(k) within a few ulp of ln n count as ties and are included,
    /// matching the ">=" in the defining inequality P(X >= k) >= 1/n.
    std::uint64_t threshold_sequence(LogTime n) const;

    /// n_k = ceil(exp(R(k))) as a log-domain time, k >= 1. Carries the exact
    /// integer count while exp(R(k)) <= ~1e15. Block I_k = [n_k, n_{k+1});
    /// when the block is nonempty, threshold_sequence(n_k) == k.
    LogTime block_start(std::uint64_t k) const;

    /// Precomputes log-tails up to k so later reads never take the write lock.
    void warm_up(std::uint64_t k) const;

    double poisson_lambda() const;
    double geometric_q() const;
    const std::vector<double>& table_probabilities() const;
    double table_tail_rate() const;

    std::string describe() const;

private:
    struct PoissonCache;

    DiscreteDistribution() = default;

    double log_tail_uncached(std::uint64_t k) const;

    Family family_ = Family::geometric;
    double lambda_ = 0.0;            // poisson
    double gamma_ = 0.0;             // geometric: r(n) == gamma for all n
    std::vector<double> table_p_;    // pmf_table head
    double tail_rate_ = 0.0;         // pmf_table continuation ratio
    std::vector<double> table_r_;    // R(0..m) over the table head
    double tail_log_rate_ = 0.0;     // -ln(tail_rate)
    std::shared_ptr<PoissonCache> cache_;
};

}  // namespace recmax

#include "recmax/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <shared_mutex>

namespace recmax {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Largest R(k) for which ceil(exp(R(k))) is still resolved as an integer.
constexpr double kLogCountLimit = 34.538776394910684;  // ln(1e15)

// Ascending tail series T(k) = p_k (1 + l/(k+1) + l^2/((k+1)(k+2)) + ...),
// summed in the linear domain (all terms positive, no cancellation) and
// assembled in logs. Valid whenever the term ratio l/(k+1) < 1, which holds
// on the branch where it is used (T(k) < 1/2 forces k >= median >= l - ln 2).
double poisson_log_tail_series(double lambda, std::uint64_t k) {
    double sum = 1.0;
    double term = 1.0;
    for (std::uint64_t m = k + 1;; ++m) {
        term *= lambda / static_cast<double>(m);
        sum += term;
        if (term < sum * 1e-18) break;
    }
    const double log_pk = static_cast<double>(k) * std::log(lambda) - lambda -
                          std::lgamma(static_cast<double>(k) + 1.0);
    return -(log_pk + std::log(sum));
}

}  // namespace

struct DiscreteDistribution::PoissonCache {
    mutable std::shared_mutex mutex;
    // r_memo[k] == R(k); append-only, grown in order so the CDF side can be
    // accumulated in one compensated pass.
    std::vector<double> r_memo;
    double cdf = 0.0;          // sum of p_0..p_{k-1} for k == r_memo.size()
    double cdf_comp = 0.0;     // Kahan compensation
    double pmf_next = 0.0;     // p_{r_memo.size() - 1}
};

DiscreteDistribution DiscreteDistribution::poisson(double lambda) {
    if (!(lambda > 0.0) || !(lambda <= 700.0))
        throw std::invalid_argument("poisson: lambda must be in (0, 700]");
    DiscreteDistribution d;
    d.family_ = Family::poisson;
    d.lambda_ = lambda;
    d.cache_ = std::make_shared<PoissonCache>();
    d.cache_->r_memo.push_back(0.0);
    d.cache_->pmf_next = std::exp(-lambda);  // p_0
    return d;
}

DiscreteDistribution DiscreteDistribution::geometric(double q) {
    if (!(q > 0.0) || !(q < 1.0))
        throw std::invalid_argument("geometric: q must be in (0, 1)");
    DiscreteDistribution d;
    d.family_ = Family::geometric;
    d.gamma_ = -std::log1p(-q);  // ln(1/(1-q))
    return d;
}

DiscreteDistribution DiscreteDistribution::pmf_table(std::vector<double> probabilities,
                                                     double tail_rate) {
    if (probabilities.empty())
        throw std::invalid_argument("pmf_table: need at least one probability");
    if (!(tail_rate > 0.0) || !(tail_rate < 1.0))
        throw std::invalid_argument("pmf_table: tail_rate must be in (0, 1)");
    DiscreteDistribution d;
    d.family_ = Family::pmf_table;
    d.tail_rate_ = tail_rate;
    d.tail_log_rate_ = -std::log(tail_rate);
    d.table_r_.resize(probabilities.size() + 1);
    d.table_r_[0] = 0.0;
    double cdf = 0.0, comp = 0.0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        if (!(probabilities[i] > 0.0))
            throw std::invalid_argument("pmf_table: probabilities must be strictly positive");
        const double y = probabilities[i] - comp;
        const double t = cdf + y;
        comp = (t - cdf) - y;
        cdf = t;
        if (!(cdf < 1.0))
            throw std::invalid_argument("pmf_table: probabilities must sum to < 1");
        d.table_r_[i + 1] = -std::log1p(-cdf);
        if (!(d.table_r_[i + 1] > d.table_r_[i]))
            throw std::invalid_argument("pmf_table: probabilities too small to resolve a strict tail decrease");
    }
    d.table_p_ = std::move(probabilities);
    return d;
}

double DiscreteDistribution::log_tail(std::uint64_t k) const {
    if (k == 0) return 0.0;
    double r;
    switch (family_) {
        case Family::geometric:
            r = gamma_ * static_cast<double>(k);
            break;
        case Family::pmf_table:
            if (k < table_r_.size()) {
                r = table_r_[k];
            } else {
                const std::size_t m = table_r_.size() - 1;
                r = table_r_[m] + static_cast<double>(k - m) * tail_log_rate_;
            }
            break;
        case Family::poisson: {
            {
                std::shared_lock lock(cache_->mutex);
                if (k < cache_->r_memo.size()) return cache_->r_memo[k];
            }
            warm_up(k);
            std::shared_lock lock(cache_->mutex);
            return cache_->r_memo[k];
        }
        default:
            r = 0.0;
    }
    if (!std::isfinite(r)) throw tail_overflow_error("log_tail: R(k) not representable");
    return r;
}

void DiscreteDistribution::warm_up(std::uint64_t k) const {
    if (family_ != Family::poisson) return;
    std::unique_lock lock(cache_->mutex);
    PoissonCache& c = *cache_;
    while (c.r_memo.size() <= k) {
        const std::uint64_t next = c.r_memo.size();  // computing R(next)
        // advance CDF to include p_{next-1}
        const double y = c.pmf_next - c.cdf_comp;
        const double t = c.cdf + y;
        c.cdf_comp = (t - c.cdf) - y;
        c.cdf = t;
        c.pmf_next *= lambda_ / static_cast<double>(next);  // now p_{next}
        const double r = (c.cdf <= 0.5) ? -std::log1p(-c.cdf)
                                        : poisson_log_tail_series(lambda_, next);
        c.r_memo.push_back(r);
    }
}

double DiscreteDistribution::hazard_increment(std::uint64_t n) const {
    if (n == 0) throw std::invalid_argument("hazard_increment: n must be >= 1");
    return log_tail(n) - log_tail(n - 1);
}

double DiscreteDistribution::log_pmf(std::uint64_t k) const {
    // p_k = T(k)(1 - e^{-r(k+1)})
    return -log_tail(k) + std::log(-std::expm1(-hazard_increment(k + 1)));
}

std::uint64_t DiscreteDistribution::threshold_sequence(std::uint64_t n) const {
    if (n == 0) throw std::invalid_argument("threshold_sequence: n must be >= 1");
    if (n == 1) return 0;
    return threshold_sequence(LogTime::from_count(n));
}

std::uint64_t DiscreteDistribution::threshold_sequence(LogTime n) const {
    const double target = n.log_value;
    // Ties at double resolution count as R(k) <= ln n.
    const double tol = 4.0 * kEps * std::max(1.0, target);
    auto below = [&](std::uint64_t k) { return log_tail(k) <= target + tol; };
    if (!below(1)) return 0;
    std::uint64_t lo = 1, hi = 2;
    while (below(hi)) {
        lo = hi;
        if (hi > (std::uint64_t{1} << 40))
            throw tail_overflow_error("threshold_sequence: index out of supported range");
        hi *= 2;
    }
    // invariant: below(lo) && !below(hi)
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        (below(mid) ? lo : hi) = mid;
    }
    return lo;
}

LogTime DiscreteDistribution::block_start(std::uint64_t k) const {
    if (k == 0) throw std::invalid_argument("block_start: k must be >= 1");
    const double r = log_tail(k);
    if (r > kLogCountLimit) return LogTime::from_log(r);
    const double x = std::exp(r);
    const double nearest = std::nearbyint(x);
    // Snap to an adjacent integer when exp(R(k)) is an exact boundary up to
    // accumulated rounding (|error| <~ x * R * eps).
    double n;
    if (nearest >= 1.0 && std::abs(x - nearest) <= 4.0 * kEps * (1.0 + r) * x)
        n = nearest;
    else
        n = std::ceil(x);
    return LogTime::from_count(static_cast<std::uint64_t>(n));
}

double DiscreteDistribution::poisson_lambda() const {
    if (family_ != Family::poisson) throw std::logic_error("not a poisson distribution");
    return lambda_;
}

double DiscreteDistribution::geometric_q() const {
    if (family_ != Family::geometric) throw std::logic_error("not a geometric distribution");
    return -std::expm1(-gamma_);
}

const std::vector<double>& DiscreteDistribution::table_probabilities() const {
    if (family_ != Family::pmf_table) throw std::logic_error("not a pmf_table distribution");
    return table_p_;
}

double DiscreteDistribution::table_tail_rate() const {
    if (family_ != Family::pmf_table) throw std::logic_error("not a pmf_table distribution");
    return tail_rate_;
}

std::string DiscreteDistribution::describe() const {
    switch (family_) {
        case Family::poisson:
            return "poisson(lambda=" + std::to_string(lambda_) + ")";
        case Family::geometric:
            return "geometric(q=" + std::to_string(geometric_q()) + ")";
        case Family::pmf_table:
            return "pmf_table(" + std::to_string(table_p_.size()) +
                   " entries, tail_rate=" + std::to_string(tail_rate_) + ")";
    }
    return "?";
}

}  // namespace recmax

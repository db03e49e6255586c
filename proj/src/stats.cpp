#include "recmax/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace recmax {
namespace {

std::pair<std::int64_t, std::int64_t> value_range(const std::vector<std::int64_t>& xs) {
    const auto [mn, mx] = std::minmax_element(xs.begin(), xs.end());
    return {*mn, *mx};
}

// counts[v - lo] = #samples equal to v
std::vector<std::uint64_t> histogram(const std::vector<std::int64_t>& xs, std::int64_t lo,
                                     std::int64_t hi) {
    std::vector<std::uint64_t> h(static_cast<std::size_t>(hi - lo + 1), 0);
    for (const std::int64_t x : xs) ++h[static_cast<std::size_t>(x - lo)];
    return h;
}

}  // namespace

double ks_statistic(const std::vector<std::int64_t>& samples,
                    const std::function<double(std::int64_t)>& cdf) {
    if (samples.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    const auto [lo, hi] = value_range(samples);
    const auto h = histogram(samples, lo, hi);
    const double n = static_cast<double>(samples.size());
    double cum = 0.0, d = cdf(lo - 1);  // deviation below the support is F itself
    d = std::abs(d);
    for (std::int64_t v = lo; v <= hi; ++v) {
        cum += static_cast<double>(h[static_cast<std::size_t>(v - lo)]);
        d = std::max(d, std::abs(cum / n - cdf(v)));
    }
    return d;
}

double ks_statistic(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    const auto [alo, ahi] = value_range(a);
    const auto [blo, bhi] = value_range(b);
    const std::int64_t lo = std::min(alo, blo), hi = std::max(ahi, bhi);
    const auto ha = histogram(a, lo, hi);
    const auto hb = histogram(b, lo, hi);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    double ca = 0.0, cb = 0.0, d = 0.0;
    for (std::size_t i = 0; i < ha.size(); ++i) {
        ca += static_cast<double>(ha[i]);
        cb += static_cast<double>(hb[i]);
        d = std::max(d, std::abs(ca / na - cb / nb));
    }
    return d;
}

double sample_mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("sample_mean: empty sample");
    double s = 0.0;
    for (const double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double sample_sd(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double mean = sample_mean(xs);
    double ss = 0.0;
    for (const double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace recmax

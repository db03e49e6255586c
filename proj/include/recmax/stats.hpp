#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace recmax {

/// One-sample Kolmogorov-Smirnov statistic for integer-valued samples:
/// sup over the support of |F_hat(x) - F(x)|, with F evaluated through the
/// supplied CDF callable.
double ks_statistic(const std::vector<std::int64_t>& samples,
                    const std::function<double(std::int64_t)>& cdf);

/// Two-sample KS statistic for integer-valued samples.
double ks_statistic(const std::vector<std::int64_t>& a, const std::vector<std::int64_t>& b);

double sample_mean(const std::vector<double>& xs);
double sample_sd(const std::vector<double>& xs);

}  // namespace recmax

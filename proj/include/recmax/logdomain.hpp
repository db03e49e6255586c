#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

namespace recmax {

constexpr double kLn2 = 0.6931471805599453;

/// ln(1 - exp(-a)) for a >= 0, evaluated without cancellation at either end.
/// For a -> 0 the result tends to -infinity; for large a it is -exp(-a)(1+o(1)).
inline double log1mexp(double a) {
    assert(a >= 0.0);
    if (a == 0.0) return -std::numeric_limits<double>::infinity();
    if (a > kLn2) return std::log1p(-std::exp(-a));
    return std::log(-std::expm1(-a));
}

/// ln(exp(a) + exp(b)), stable for arguments of any magnitude.
inline double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (std::isinf(b) && b < 0) return a;
    return a + std::log1p(std::exp(b - a));
}

/// j-fold natural logarithm L_j(x). Throws std::domain_error as soon as an
/// argument of one of the j logarithms is <= 0.
inline double iterated_log(unsigned j, double x) {
    if (j == 0) return x;
    for (unsigned i = 0; i < j; ++i) {
        if (!(x > 0.0))
            throw std::domain_error("iterated_log: intermediate logarithm of a non-positive value");
        x = std::log(x);
    }
    return x;
}

/// A positive integer time stored as its natural logarithm, so that horizons
/// far beyond 2^64 stay representable. While the time still fits an integer
/// an exact count is carried alongside the log; comparisons between two
/// counted times are then exact. Once only the log survives, comparisons are
/// good to ~1e-15 relative per arithmetic step (1e-13 documented end to end).
struct LogTime {
    double log_value = 0.0;     // ln(time); time >= 1 so always >= 0
    std::uint64_t count = 1;    // exact integer time, or 0 when not tracked

    static LogTime one() { return LogTime{0.0, 1}; }

    static LogTime from_count(std::uint64_t n) {
        assert(n >= 1);
        return LogTime{std::log(static_cast<double>(n)), n};
    }

    static LogTime from_log(double lv) {
        assert(lv >= 0.0);
        return LogTime{lv, 0};
    }

    bool has_count() const { return count != 0; }

    friend bool operator<(const LogTime& a, const LogTime& b) {
        if (a.count != 0 && b.count != 0) return a.count < b.count;
        return a.log_value < b.log_value;
    }
    friend bool operator>(const LogTime& a, const LogTime& b) { return b < a; }
    friend bool operator<=(const LogTime& a, const LogTime& b) { return !(b < a); }
    friend bool operator>=(const LogTime& a, const LogTime& b) { return !(a < b); }
    friend bool operator==(const LogTime& a, const LogTime& b) {
        if (a.count != 0 && b.count != 0) return a.count == b.count;
        return a.log_value == b.log_value;
    }
    friend bool operator!=(const LogTime& a, const LogTime& b) { return !(a == b); }
};

}  // namespace recmax

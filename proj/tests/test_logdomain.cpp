#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "recmax/logdomain.hpp"
#include "test_helpers.hpp"

using namespace recmax;

TEST_CASE("log1mexp matches long-double reference on both branches") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> small(1e-12, 0.69), large(0.70, 40.0);
    for (int i = 0; i < 2000; ++i) {
        for (const double a : {small(rng), large(rng)}) {
            // extended-precision reference, cancellation-free on both ends
            const long double la = static_cast<long double>(a);
            const long double want = a > 0.7 ? log1pl(-expl(-la)) : logl(-expm1l(-la));
            CHECK(testutil::rel_err(log1mexp(a), static_cast<double>(want)) < 1e-13);
        }
    }
    CHECK(log1mexp(0.0) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("log_add_exp is a stable logsumexp") {
    CHECK(log_add_exp(0.0, 0.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(log_add_exp(1000.0, 0.0) == doctest::Approx(1000.0));
    CHECK(log_add_exp(-std::numeric_limits<double>::infinity(), 3.0) == 3.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 50.0);
    for (int i = 0; i < 2000; ++i) {
        const double a = u(rng), b = u(rng);
        const long double want =
            logl(expl(static_cast<long double>(a)) + expl(static_cast<long double>(b)));
        CHECK(testutil::rel_err(log_add_exp(a, b), static_cast<double>(want)) < 1e-14);
    }
}

TEST_CASE("iterated_log values and domain errors") {
    CHECK(iterated_log(1, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(iterated_log(2, std::exp(std::exp(1.0))) == doctest::Approx(1.0).epsilon(1e-13));
    // frozen: ln ln ln 1e6
    CHECK(iterated_log(3, 1e6) == doctest::Approx(0.9653825322519586).epsilon(1e-13));
    // cross-check by two-step composition
    CHECK(iterated_log(3, 1e6) ==
          doctest::Approx(iterated_log(2, iterated_log(1, 1e6))).epsilon(1e-15));
    CHECK_THROWS_AS(iterated_log(2, 1.0), std::domain_error);
    CHECK_THROWS_AS(iterated_log(1, 0.0), std::domain_error);
    CHECK_THROWS_AS(iterated_log(3, 2.0), std::domain_error);
}

TEST_CASE("LogTime ordering is exact on counted values") {
    const LogTime a = LogTime::from_count(1000000000000ull);
    const LogTime b = LogTime::from_count(1000000000001ull);
    CHECK(a < b);   // logs of adjacent huge integers are equal in double
    CHECK(a != b);
    CHECK(a.log_value == doctest::Approx(b.log_value));
    const LogTime c = LogTime::from_log(800.0);
    CHECK(a < c);
    CHECK(LogTime::one().log_value == 0.0);
}

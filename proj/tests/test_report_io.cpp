#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "recmax/report_io.hpp"

using namespace recmax;
using nlohmann::json;

TEST_CASE("distribution spec round trip") {
    for (const char* text :
         {R"({"family":"poisson","lambda":1.0})", R"({"family":"geometric","q":0.5})",
          R"({"family":"pmf_table","p":[0.3,0.2],"tail_rate":0.5})"}) {
        const auto dist = parse_distribution(json::parse(text));
        const auto again = parse_distribution(distribution_to_json(dist));
        CHECK(again.family() == dist.family());
        CHECK(again.log_tail(5) == dist.log_tail(5));
    }
    CHECK_THROWS_AS(parse_distribution(json::parse(R"({"family":"normal"})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_distribution(json::parse(R"({"family":"poisson"})")),
                    std::invalid_argument);
    CHECK_THROWS_AS(parse_distribution(json::parse(R"({"family":"geometric","q":1.5})")),
                    std::invalid_argument);
}

TEST_CASE("regime spec round trip") {
    for (const char* text :
         {R"({"regime":"bounded","C0":0.7})", R"({"regime":"sublog2"})",
          R"({"regime":"log2linear","c":0.4})", R"({"regime":"loglinear","c":1.0})",
          R"({"regime":"superlog","r_over_n_to_zero":true})"}) {
        const RateRegime r = parse_regime(json::parse(text));
        const RateRegime again = parse_regime(regime_to_json(r));
        CHECK(again.kind == r.kind);
        CHECK(again.c == r.c);
        CHECK(again.monotone == r.monotone);
        CHECK(again.r_to_infinity == r.r_to_infinity);
        CHECK(again.r_over_n_to_zero == r.r_over_n_to_zero);
    }
    const RateRegime nm = parse_regime(json::parse(R"({"regime":"loglinear","c":1,"monotone":false})"));
    CHECK(!nm.monotone);
    CHECK_THROWS_AS(parse_regime(json::parse(R"({"regime":"cubic"})")), std::invalid_argument);
    CHECK_THROWS_AS(parse_regime(json::parse(R"({"regime":"loglinear"})")), std::invalid_argument);
}

TEST_CASE("offsets parsing") {
    CHECK(parse_offsets("-2:3") == std::pair<int, int>{-2, 3});
    CHECK(parse_offsets("0:0") == std::pair<int, int>{0, 0});
    CHECK_THROWS_AS(parse_offsets("3:-2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_offsets("5"), std::invalid_argument);
    CHECK_THROWS_AS(parse_offsets("a:b"), std::invalid_argument);
}

TEST_CASE("report serialization carries verdicts and rules") {
    const auto report = full_report(RateRegime::loglinear(1.0), -2, 3);
    const json j = report_to_json(report);
    CHECK(j["limsup_offset"] == "2");
    CHECK(j["liminf_offset"] == "1");
    CHECK(j["io_verdicts"].size() == 6);
    CHECK(j["precondition_failures"].empty());
    bool has_rule = false;
    for (const auto& a : j["applied"])
        has_rule = has_rule || a.get<std::string>().find("Theorem 1") != std::string::npos;
    CHECK(has_rule);

    const std::string text = report_to_text(report);
    CHECK(text.find("limsup (M_n - a_n) = 2") != std::string::npos);
    CHECK(text.find("liminf (M_n - a_n) = -1") != std::string::npos);

    const auto geo_report = full_report(RateRegime::bounded(0.69), -3, 3);
    const std::string geo_text = report_to_text(geo_report);
    CHECK(geo_text.find("all offsets i.o.") != std::string::npos);
    CHECK(geo_text.find("Theorem B(ii)") != std::string::npos);
}

TEST_CASE("threshold table grid") {
    const auto geo = DiscreteDistribution::geometric(0.5);
    const auto rows = threshold_table(geo, 16, 1);  // decades: 1, 10
    REQUIRE(rows.size() >= 2);
    CHECK(rows[0].n == 1);
    CHECK(rows[0].a_n == 0);
    CHECK(std::isnan(rows[0].r_at_a));
    // denser grid hits the doubling points
    const auto dense = threshold_table(geo, 16, 10);
    bool saw8 = false;
    for (const auto& row : dense)
        if (row.n == 8) {
            saw8 = true;
            CHECK(row.a_n == 3);
        }
    CHECK(saw8);

    std::ostringstream os;
    write_tables_csv(os, dense);
    CHECK(os.str().find("n,a_n,R_a_n,r_a_n") == 0);
    CHECK(os.str().find("\n1,0,0,\n") != std::string::npos);  // a_1 = 0 row has no hazard
}

TEST_CASE("poisson threshold approximation is close at large n") {
    const auto pois = DiscreteDistribution::poisson(1.0);
    const double ln_n = std::log(1e6);
    const double approx = poisson_threshold_approximation(1.0, ln_n);
    const double exact = static_cast<double>(pois.threshold_sequence(std::uint64_t{1000000}));
    CHECK(std::abs(approx - exact) < 2.5);  // first-order expansion
    CHECK(std::isnan(poisson_threshold_approximation(1.0, 1.0)));
}

TEST_CASE("ledger csv format") {
    const auto geo = DiscreteDistribution::geometric(0.5);
    const auto ledger = expected_hits(geo, 5, 1, EventFamily::lower_at_most);
    std::ostringstream os;
    write_ledger_csv(os, ledger);
    const std::string text = os.str();
    CHECK(text.find("k,p_lo,p_hi,c_lo,c_hi") == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 6);
}

TEST_CASE("ensemble csv and summary schema") {
    const auto geo = DiscreteDistribution::geometric(0.5);
    SimConfig config;
    config.K = 4;
    config.paths = 3;
    config.seed = 5;
    config.l_min = -2;
    config.l_max = 3;
    const auto matrix = run_ensemble(geo, config);

    std::ostringstream os;
    write_ensemble_csv(os, matrix);
    const std::string text = os.str();
    CHECK(text.find("path,k,event,l,hit") == 0);
    // 3 paths * 4 blocks * 3 families * 6 offsets rows (+ header)
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 3 * 4 * 3 * 6);
    for (const char* family : {"upper", "lower_at_most", "lower_equal"})
        CHECK(text.find(family) != std::string::npos);

    const json summary = summary_json(matrix, geo);
    CHECK(summary["K"] == 4);
    CHECK(summary["paths"] == 3);
    CHECK(summary["events"].size() == 3 * 6);
    const auto& first = summary["events"][0];
    CHECK(first["blocks"].size() == 4);
    CHECK(first["blocks"][0].contains("rate"));
    CHECK(first["blocks"][0].contains("p_lo"));
    CHECK(first["blocks"][0].contains("p_hi"));
}

TEST_CASE("verify_ensemble passes on matched ledgers and fails the negative control") {
    const auto pois = DiscreteDistribution::poisson(1.0);
    SimConfig config;
    config.K = 40;
    config.paths = 600;
    config.seed = 424242;
    config.l_min = 1;
    config.l_max = 1;
    const auto matrix = run_ensemble(pois, config);

    const VerifyReport good = verify_ensemble(matrix, pois, 4.0);
    CHECK(good.all_pass);
    REQUIRE(!good.checks.empty());
    for (const auto& c : good.checks) CHECK(c.sigma > 0.0);

    // deliberately mismatched ledger: expectations off by far more than noise
    const VerifyReport bad = verify_ensemble(matrix, DiscreteDistribution::geometric(0.9), 4.0);
    CHECK(!bad.all_pass);
}

TEST_CASE("verify_ensemble annotates plateau vs growth") {
    const auto pois = DiscreteDistribution::poisson(1.0);
    SimConfig config;
    config.K = 60;
    config.paths = 200;
    config.seed = 31;
    config.l_min = 1;
    config.l_max = 2;
    const auto matrix = run_ensemble(pois, config);
    const VerifyReport rep = verify_ensemble(matrix, pois, 4.0);
    bool saw_plateau = false, saw_growth = false;
    for (const auto& c : rep.checks) {
        if (c.family == EventFamily::lower_equal && c.l == 2) {
            CHECK(c.plateau);
            saw_plateau = true;
        }
        if (c.family == EventFamily::lower_equal && c.l == 1) {
            CHECK(!c.plateau);
            saw_growth = true;
        }
    }
    CHECK(saw_plateau);
    CHECK(saw_growth);
}

TEST_CASE("fmt_double is stable and precise") {
    CHECK(fmt_double(0.5) == "0.5");
    CHECK(fmt_double(1.0 / 3.0) == fmt_double(1.0 / 3.0));
    const double x = 0.1234567890123456789;
    CHECK(std::stod(fmt_double(x)) == x);  // round trip
}

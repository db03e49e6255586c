// Acceptance suite: one pass/fail line per criterion, exit code = number of
// failures. Statistical checks run on fixed, pre-registered seeds so the
// outcome is deterministic.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <mpfr.h>
#include <boost/multiprecision/cpp_int.hpp>

#include "recmax/asymptotics.hpp"
#include "recmax/distribution.hpp"
#include "recmax/oracle.hpp"
#include "recmax/record_sim.hpp"
#include "recmax/report_io.hpp"
#include "recmax/rng.hpp"
#include "recmax/stats.hpp"
#include "test_helpers.hpp"

using namespace recmax;
using boost::multiprecision::cpp_int;

namespace {

struct Criterion {
    std::string name;
    bool pass = false;
    std::string detail;
    double seconds = 0.0;
};

constexpr std::uint64_t kSeedLaw = 0xC4A11;
constexpr std::uint64_t kSeedBorel = 0xC5B22;
constexpr std::uint64_t kSeedPersist = 0xC6C33;
constexpr std::uint64_t kSeedBlocks = 0xC7D44;
constexpr std::uint64_t kSeedProps = 0xC8E55;

// ---------------------------------------------------------------- criterion 1

// Poisson log-tail at 256-bit precision (~77 digits) by forward summation.
double mpfr_poisson_log_tail(double lambda, std::uint64_t k) {
    constexpr mpfr_prec_t prec = 256;
    mpfr_t lam, term, sum, tmp;
    mpfr_inits2(prec, lam, term, sum, tmp, nullptr);
    mpfr_set_d(lam, lambda, MPFR_RNDN);
    // term = p_k = e^-lambda * lambda^k / k!
    mpfr_neg(term, lam, MPFR_RNDN);
    mpfr_exp(term, term, MPFR_RNDN);
    for (std::uint64_t i = 1; i <= k; ++i) {
        mpfr_mul(term, term, lam, MPFR_RNDN);
        mpfr_div_ui(term, term, static_cast<unsigned long>(i), MPFR_RNDN);
    }
    mpfr_set_ui(sum, 0, MPFR_RNDN);
    for (std::uint64_t i = k;; ++i) {
        mpfr_add(sum, sum, term, MPFR_RNDN);
        mpfr_mul(term, term, lam, MPFR_RNDN);
        mpfr_div_ui(term, term, static_cast<unsigned long>(i + 1), MPFR_RNDN);
        // stop when term < sum * 2^-220
        mpfr_mul_2si(tmp, sum, -220, MPFR_RNDN);
        if (i > k + 8 && mpfr_cmp(term, tmp) < 0) break;
    }
    mpfr_log(sum, sum, MPFR_RNDN);
    const double r = -mpfr_get_d(sum, MPFR_RNDN);
    mpfr_clears(lam, term, sum, tmp, nullptr);
    return r;
}

Criterion criterion_tail_exactness() {
    Criterion c{"1 tail exactness (poisson vs 77-digit summation)", true, "", 0};
    double worst = 0.0;
    for (const double lambda : {0.5, 1.0, 2.0}) {
        const auto dist = DiscreteDistribution::poisson(lambda);
        for (std::uint64_t k = 0; k <= 50; ++k) {
            const double got = dist.log_tail(k);
            if (k == 0) {
                if (got != 0.0) c.pass = false;
                continue;
            }
            const double want = mpfr_poisson_log_tail(lambda, k);
            const double rel = std::abs(got - want) / std::abs(want);
            worst = std::max(worst, rel);
            if (rel > 1e-10) c.pass = false;
        }
    }
    std::ostringstream os;
    os << "max rel err " << worst;
    c.detail = os.str();
    return c;
}

// ---------------------------------------------------------------- criterion 2

Criterion criterion_geometric_thresholds() {
    Criterion c{"2 threshold exactness (geometric, n <= 1e6)", true, "", 0};
    const std::uint64_t n_max = 1000000;
    std::uint64_t checked = 0, wrong = 0;
    for (const auto& [q, num, den] :
         {std::tuple<double, int, int>{0.1, 9, 10}, {0.5, 1, 2}, {0.9, 1, 10}}) {
        const auto dist = DiscreteDistribution::geometric(q);
        // exact block boundaries: a_n >= k iff n * num^k >= den^k, so the
        // first n with a_n = k is ceil(den^k / num^k), in exact integers
        std::vector<std::uint64_t> boundary;  // boundary[k-1] = min{n : a_n = k}
        cpp_int num_pow = 1, den_pow = 1;
        for (;;) {
            num_pow *= num;
            den_pow *= den;
            const cpp_int b = (den_pow + num_pow - 1) / num_pow;
            if (b > n_max) break;
            boundary.push_back(static_cast<std::uint64_t>(b));
        }
        std::uint64_t a = 0;
        for (std::uint64_t n = 1; n <= n_max; ++n) {
            while (a < boundary.size() && boundary[a] <= n) ++a;
            if (dist.threshold_sequence(n) != a) ++wrong;
            ++checked;
        }
    }
    std::ostringstream os;
    os << checked << " values, " << wrong << " mismatches";
    c.detail = os.str();
    c.pass = wrong == 0;
    return c;
}

// ---------------------------------------------------------------- criterion 3

Criterion criterion_classifier_examples() {
    Criterion c{"3 classifier example reproduction", true, "", 0};
    std::vector<std::string> bad;

    const auto pois = full_report(RateRegime::loglinear(1.0), -2, 3);
    if (!(pois.limsup_offset == OffsetLimit::finite(2))) bad.push_back("poisson limsup");
    if (!(pois.liminf_offset == OffsetLimit::finite(1))) bad.push_back("poisson liminf");

    if (!(liminf_offset(RateRegime::log2linear(0.4)) == OffsetLimit::finite(3)))
        bad.push_back("log2linear liminf");

    const auto geo = full_report(RateRegime::bounded(std::log(2.0)), -5, 5);
    for (const auto& [l, v] : geo.io_verdicts)
        if (v != Verdict::almost_surely_io) bad.push_back("bounded l=" + std::to_string(l));

    c.pass = bad.empty();
    std::ostringstream os;
    if (bad.empty())
        os << "(2,1), liminf 3, all-io reproduced";
    else
        for (const auto& b : bad) os << b << " ";
    c.detail = os.str();
    return c;
}

// ---------------------------------------------------------------- criterion 4

struct LawSamples {
    std::vector<std::int64_t> jump;    // per horizon
    std::vector<std::int64_t> direct;
};

Criterion criterion_simulator_law() {
    Criterion c{"4 simulator law (KS battery, 1e5 samples)", true, "", 0};
    const std::vector<std::uint64_t> horizons = {100, 1000, 10000};
    const int reps = 100000;
    const double ks_limit = 0.0061;
    double worst = 0.0;
    std::ostringstream fails;

    for (const auto& spec : {std::pair<const char*, DiscreteDistribution>{
                                 "poisson(1)", DiscreteDistribution::poisson(1.0)},
                             {"geometric(.5)", DiscreteDistribution::geometric(0.5)}}) {
        const auto& dist = spec.second;
        const std::uint64_t K = dist.threshold_sequence(horizons.back()) + 1;
        dist.warm_up(K + 64);
        const DirectSampler sampler(dist);

        std::vector<LawSamples> per_horizon(horizons.size());
        for (auto& s : per_horizon) {
            s.jump.resize(reps);
            s.direct.resize(reps);
        }

        const unsigned n_threads = std::max(1u, std::thread::hardware_concurrency());
        auto worker = [&](unsigned tid) {
            for (int rep = tid; rep < reps; rep += static_cast<int>(n_threads)) {
                std::mt19937_64 rng =
                    make_stream(kSeedLaw, static_cast<std::uint64_t>(rep) * 2);
                const RecordPath path = simulate_record_path(dist, K, rng);
                std::mt19937_64 rng2 =
                    make_stream(kSeedLaw, static_cast<std::uint64_t>(rep) * 2 + 1);
                for (std::size_t h = 0; h < horizons.size(); ++h) {
                    per_horizon[h].jump[rep] = path.value_at(LogTime::from_count(horizons[h]));
                    per_horizon[h].direct[rep] = sampler.max_of(horizons[h], rng2);
                }
            }
        };
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
        for (auto& th : pool) th.join();

        for (std::size_t h = 0; h < horizons.size(); ++h) {
            const LogTime t = LogTime::from_count(horizons[h]);
            const auto cdf = [&](std::int64_t x) { return max_cdf(dist, t, x); };
            const double d_jump = ks_statistic(per_horizon[h].jump, cdf);
            const double d_direct = ks_statistic(per_horizon[h].direct, cdf);
            const double d_two = ks_statistic(per_horizon[h].jump, per_horizon[h].direct);
            for (const auto& [tag, d] :
                 {std::pair<const char*, double>{"jump/cdf", d_jump},
                  {"direct/cdf", d_direct},
                  {"jump/direct", d_two}}) {
                worst = std::max(worst, d);
                if (d >= ks_limit) {
                    c.pass = false;
                    fails << spec.first << " n=" << horizons[h] << " " << tag << " D=" << d
                          << "; ";
                }
            }
        }
    }
    std::ostringstream os;
    os << "18 tests, max KS " << worst << " (limit " << ks_limit << ") " << fails.str();
    c.detail = os.str();
    return c;
}

// ---------------------------------------------------------------- criterion 5

Criterion criterion_borel_cantelli() {
    Criterion c{"5 Borel-Cantelli consistency (poisson, K=60)", true, "", 0};
    const auto dist = DiscreteDistribution::poisson(1.0);
    SimConfig config;
    config.K = 60;
    config.paths = 1000;
    config.seed = kSeedBorel;
    config.l_min = 1;
    config.l_max = 2;
    const BlockHitMatrix matrix = run_ensemble(dist, config);
    std::ostringstream os;

    for (const int l : {1, 2}) {
        const auto ledger = expected_hits(dist, config.K, l, EventFamily::lower_equal);
        const double mean = matrix.mean_total_hits(EventFamily::lower_equal, l);
        double var_binom = 0.0;
        for (const auto& p : ledger.per_block) var_binom += p.mid() * (1.0 - p.mid());
        const double se = std::max(matrix.sd_total_hits(EventFamily::lower_equal, l),
                                   std::sqrt(var_binom)) /
                          std::sqrt(static_cast<double>(config.paths));
        const double z = std::abs(mean - ledger.total()) / se;
        if (z > 3.0) c.pass = false;
        os << "l=" << l << ": mean " << mean << " vs " << ledger.total() << " (z=" << z << ") ";
        if (l == 2) {
            const bool plateau = ledger_plateaued(ledger, 1e-4);
            if (!plateau) c.pass = false;
            os << (plateau ? "plateaued" : "NOT plateaued");
        }
    }
    c.detail = os.str();
    return c;
}

// ---------------------------------------------------------------- criterion 6

Criterion criterion_divergent_persistence() {
    Criterion c{"6 divergent persistence (geometric, K=100)", true, "", 0};
    const auto dist = DiscreteDistribution::geometric(0.5);
    SimConfig config;
    config.K = 100;
    config.paths = 1000;
    config.seed = kSeedPersist;
    config.l_min = -2;
    config.l_max = 2;
    const BlockHitMatrix matrix = run_ensemble(dist, config);
    const std::uint64_t k_from = 2 * config.K / 3 + 1;  // final third: 67..100
    std::ostringstream os;
    double worst = 1.0;
    for (int l = -2; l <= 2; ++l) {
        int paths_hit = 0;
        for (std::uint32_t p = 0; p < config.paths; ++p) {
            bool hit = false;
            for (std::uint64_t k = k_from; k <= config.K && !hit; ++k)
                hit = matrix.hit(EventFamily::upper, l, p, k);
            paths_hit += hit ? 1 : 0;
        }
        const double frac = static_cast<double>(paths_hit) / config.paths;
        worst = std::min(worst, frac);
        if (frac < 0.10) c.pass = false;
    }
    os << "min fraction of paths with late hits " << worst << " (need >= 0.10)";
    c.detail = os.str();
    return c;
}

// ---------------------------------------------------------------- criterion 7

Criterion criterion_block_equivalence() {
    Criterion c{"7 block-event brute-force equivalence (geometric, k <= 19)", true, "", 0};
    const auto dist = DiscreteDistribution::geometric(0.5);
    const std::uint64_t K = 19;  // n_20 = 2^20
    const auto blocks = BlockBoundaries::compute(dist, K);
    const int l_lo = -3, l_hi = 3;
    std::uint64_t checked = 0, wrong = 0;
    for (std::uint64_t p = 0; p < 60; ++p) {
        std::mt19937_64 rng = make_stream(kSeedBlocks, p);
        const RecordPath path = simulate_record_path(dist, K, rng);
        // integer record schedule for the literal scan
        std::vector<std::pair<std::uint64_t, std::int64_t>> recs;
        for (const auto& r : path.records) recs.push_back({r.time.count, r.value});
        for (std::uint64_t k = 1; k <= K; ++k) {
            const std::uint64_t s = blocks.start[k].count;
            const std::uint64_t e = blocks.start[k + 1].count;
            // literal scan: which offsets M - k occur on [s, e), and M at s
            std::uint64_t visited_mask = 0;  // bit (off + 32) for off in [-32, 31]
            std::size_t ri = 0;
            std::int64_t m_at_s = -1;
            for (std::uint64_t n = s; n < e; ++n) {
                while (ri + 1 < recs.size() && recs[ri + 1].first <= n) ++ri;
                const std::int64_t m = recs[ri].second;
                if (n == s) m_at_s = m;
                const std::int64_t off = m - static_cast<std::int64_t>(k);
                if (off >= -32 && off <= 31) visited_mask |= 1ull << (off + 32);
            }
            for (int l = l_lo; l <= l_hi; ++l) {
                const BlockHits got = block_hits(path, blocks, k, l);
                const bool upper_brute = (visited_mask >> (l + 32)) & 1;
                const bool anywhere_brute = (visited_mask >> (-l + 32)) & 1;
                const bool at_most_brute = m_at_s <= static_cast<std::int64_t>(k) - l;
                const bool equal_brute = m_at_s == static_cast<std::int64_t>(k) - l;
                const bool anywhere_got = level_visited_in_block(
                    path, blocks, k, static_cast<std::int64_t>(k) - l);
                wrong += got.upper != upper_brute;
                wrong += got.lower_at_most != at_most_brute;
                wrong += got.lower_equal != equal_brute;
                wrong += anywhere_got != anywhere_brute;
                checked += 4;
            }
        }
    }
    std::ostringstream os;
    os << checked << " booleans, " << wrong << " mismatches";
    c.detail = os.str();
    c.pass = wrong == 0;
    return c;
}

// ---------------------------------------------------------------- criterion 8

Criterion criterion_property_suites() {
    Criterion c{"8 property suites (>= 1e3 cases each)", true, "", 0};
    std::ostringstream os;
    std::mt19937_64 rng(kSeedProps);

    // monotone R
    {
        int cases = 0, bad = 0;
        for (int rep = 0; rep < 25; ++rep) {
            const auto td = testutil::random_dist(rng);
            double prev = -1.0;
            for (std::uint64_t k = 0; k <= 60; ++k) {
                const double r = td.dist.log_tail(k);
                if (!(r > prev)) ++bad;
                prev = r;
                ++cases;
            }
        }
        os << "monotoneR " << cases << "/" << bad << " ";
        if (bad || cases < 1000) c.pass = false;
    }
    // threshold sandwich vs brute tails
    {
        int cases = 0, bad = 0;
        std::uniform_int_distribution<std::uint64_t> pick_n(1, 100000);
        for (int rep = 0; rep < 12; ++rep) {
            const auto td = testutil::random_dist(rng);
            for (int i = 0; i < 100; ++i) {
                const std::uint64_t n = pick_n(rng);
                const std::uint64_t a = td.dist.threshold_sequence(n);
                const long double inv = 1.0L / static_cast<long double>(n);
                if (!(td.brute_tail(a) >= inv * (1.0L - 1e-14L)) ||
                    !(td.brute_tail(a + 1) < inv * (1.0L + 1e-14L)))
                    ++bad;
                ++cases;
            }
        }
        os << "sandwich " << cases << "/" << bad << " ";
        if (bad || cases < 1000) c.pass = false;
    }
    // monotone-hazard inequality
    {
        int cases = 0, bad = 0;
        for (const auto& td : {testutil::make_poisson(1.0), testutil::make_geometric(0.3)}) {
            for (std::uint64_t k = 1; k <= 900; k += 3) {
                for (int l = 2; l <= 5; ++l) {
                    const double mid = td.dist.log_tail(k + l) - td.dist.log_tail(k + 1);
                    const double lo = (l - 1) * td.dist.hazard_increment(k + 1);
                    const double hi = (l - 1) * td.dist.hazard_increment(k + l);
                    if (!(lo <= mid * (1 + 1e-9) + 1e-12) || !(mid <= hi * (1 + 1e-9) + 1e-12))
                        ++bad;
                    ++cases;
                }
            }
        }
        os << "hazard-sandwich " << cases << "/" << bad << " ";
        if (bad || cases < 1000) c.pass = false;
    }
    // verdict/offset consistency
    {
        int cases = 0, bad = 0;
        std::uniform_real_distribution<double> coeff(0.05, 5.0);
        for (int i = 0; i < 1200; ++i) {
            RateRegime r;
            switch (rng() % 5) {
                case 0: r = RateRegime::bounded(coeff(rng)); break;
                case 1: r = RateRegime::sublog2(); break;
                case 2: r = RateRegime::log2linear(coeff(rng)); break;
                case 3: r = RateRegime::loglinear(coeff(rng)); break;
                default: r = RateRegime::superlog(rng() % 2 == 0); break;
            }
            const OffsetLimit up = limsup_offset(r);
            if (up.is_finite()) {
                if (classify_upper(r, up.value).verdict != Verdict::almost_surely_io) ++bad;
                if (classify_upper(r, up.value + 1).verdict !=
                    Verdict::almost_surely_finitely_often)
                    ++bad;
            }
            const OffsetLimit lo = liminf_offset(r);
            if (lo.is_finite()) {
                if (classify_lower(r, lo.value, LowerMode::at_most).verdict !=
                    Verdict::almost_surely_io)
                    ++bad;
                if (classify_lower(r, lo.value + 1, LowerMode::at_most).verdict !=
                    Verdict::almost_surely_finitely_often)
                    ++bad;
            }
            ++cases;
        }
        os << "offsets " << cases << "/" << bad << " ";
        if (bad || cases < 1000) c.pass = false;
    }
    // lower_equal implies lower_at_most, and determinism, on one ensemble
    {
        const auto dist = DiscreteDistribution::poisson(1.0);
        SimConfig config;
        config.K = 12;
        config.paths = 500;
        config.seed = kSeedProps;
        config.l_min = -1;
        config.l_max = 1;
        const BlockHitMatrix a = run_ensemble(dist, config);
        const BlockHitMatrix b = run_ensemble(dist, config);
        int cases = 0, bad = 0;
        for (std::uint32_t p = 0; p < config.paths; ++p)
            for (std::uint64_t k = 1; k <= config.K; ++k)
                for (int l = -1; l <= 1; ++l) {
                    if (a.hit(EventFamily::lower_equal, l, p, k) &&
                        !a.hit(EventFamily::lower_at_most, l, p, k))
                        ++bad;
                    ++cases;
                }
        os << "equal=>atmost " << cases << "/" << bad << " ";
        if (bad || cases < 1000) c.pass = false;
        if (!(a == b)) {
            os << "NONDETERMINISTIC ";
            c.pass = false;
        } else {
            os << "deterministic(" << config.paths << " paths) ";
        }
    }
    c.detail = os.str();
    return c;
}

}  // namespace

int main() {
    std::vector<Criterion (*)()> suite = {
        criterion_tail_exactness,    criterion_geometric_thresholds,
        criterion_classifier_examples, criterion_simulator_law,
        criterion_borel_cantelli,    criterion_divergent_persistence,
        criterion_block_equivalence, criterion_property_suites,
    };
    int failures = 0;
    for (const auto& fn : suite) {
        const auto start = std::chrono::steady_clock::now();
        Criterion c = fn();
        c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] %-55s %7.2fs  %s\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.seconds, c.detail.c_str());
        std::fflush(stdout);
        failures += c.pass ? 0 : 1;
    }
    std::printf("ACCEPTANCE: %d/%zu criteria passed\n", static_cast<int>(suite.size()) - failures,
                suite.size());
    return failures;
}

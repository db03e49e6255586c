#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "recmax/distribution.hpp"
#include "recmax/logdomain.hpp"
#include "recmax/oracle.hpp"

namespace recmax {

/// Waiting time between records: the number of further draws until one
/// exceeds the current maximum. Carries an exact integer while it fits.
struct Waiting {
    bool has_count = true;
    std::uint64_t count = 1;
    double log_value = 0.0;
};

/// Waiting time from a uniform u in (0,1); log_q = -R(m+1) is the log success
/// probability of exceeding the current maximum m. For q >= 1e-8 this is the
/// exact geometric ceil(ln u / ln(1-q)); below that, the exponential form
/// ln W = R(m+1) + ln(-ln u) with relative error <= q.
Waiting waiting_from_uniform(double u, double log_q);
Waiting sample_record_waiting(std::mt19937_64& rng, double log_q);

/// Value of X conditioned on X > m (m = -1 draws unconditionally), by
/// inversion on the conditional tail in log domain:
/// min{ i > m : R(i+1) >= R(m+1) - ln(1-u) }.
std::int64_t conditional_value_from_uniform(const DiscreteDistribution& dist, std::int64_t m,
                                            double u);
std::int64_t sample_conditional_value(const DiscreteDistribution& dist, std::mt19937_64& rng,
                                      std::int64_t m);

LogTime advance(LogTime t, const Waiting& w);

/// The jump chain of the running maximum: the strictly increasing (time,
/// value) records, which determine M at every time up to the horizon.
struct RecordPath {
    struct Record {
        LogTime time;
        std::int64_t value;
    };
    std::vector<Record> records;
    LogTime horizon;  // records cover all times strictly before this

    /// M at time t (t must be below the horizon).
    std::int64_t value_at(LogTime t) const;
};

/// Simulates the jump chain up to the horizon n_{K+1}: start at time 1 with
/// an unconditional draw, then alternate geometric waits and conditional
/// record values. The law of M_t matches max of t i.i.d. draws exactly, up
/// to the documented tiny-q waiting approximation.
RecordPath simulate_record_path(const DiscreteDistribution& dist, std::uint64_t K,
                                std::mt19937_64& rng);

/// Block boundaries n_1..n_{K+1} computed once.
struct BlockBoundaries {
    std::vector<LogTime> start;  // start[k] = n_k, k = 1..K+1
    std::uint64_t K = 0;
    static BlockBoundaries compute(const DiscreteDistribution& dist, std::uint64_t K);
};

struct BlockHits {
    bool upper = false;
    bool lower_at_most = false;
    bool lower_equal = false;
};

/// Event indicators for block k and offset l. The lower families are read at
/// n_k (monotonicity of M makes "some n in I_k has M_n <= k-l" equivalent to
/// the reading at n_k); the upper family intersects the occupancy interval
/// of the level k+l with [n_k, n_{k+1}). Throws std::out_of_range when the
/// path horizon does not cover the block.
BlockHits block_hits(const RecordPath& path, const BlockBoundaries& blocks, std::uint64_t k,
                     int l);
BlockHits block_hits(const RecordPath& path, const DiscreteDistribution& dist, std::uint64_t k,
                     int l);

/// True when the level v is occupied at some time in [n_k, n_{k+1}). With
/// v = k-l this is the block-wide variant of the lower equality event.
bool level_visited_in_block(const RecordPath& path, const BlockBoundaries& blocks,
                            std::uint64_t k, std::int64_t v);

struct SimConfig {
    std::uint64_t K = 1;
    std::uint32_t paths = 1;
    std::uint64_t seed = 0;
    int l_min = 0;
    int l_max = 0;
    unsigned threads = 0;  // 0 = hardware concurrency
    /// also record the block-wide lower equality family
    bool lower_equal_anywhere = false;

    /// families recorded under this configuration
    std::vector<EventFamily> families() const {
        std::vector<EventFamily> fs = {EventFamily::upper, EventFamily::lower_at_most,
                                       EventFamily::lower_equal};
        if (lower_equal_anywhere) fs.push_back(EventFamily::lower_equal_anywhere);
        return fs;
    }
};

/// Hit indicators for every (family, offset, path, block), plus the exact
/// per-block probabilities for comparison. lower_equal(l) implies
/// lower_at_most(l) entrywise by construction.
class BlockHitMatrix {
public:
    BlockHitMatrix(SimConfig config);

    const SimConfig& config() const { return config_; }
    bool hit(EventFamily f, int l, std::uint32_t path, std::uint64_t k) const;
    /// fraction of paths hitting block k
    double block_hit_rate(EventFamily f, int l, std::uint64_t k) const;
    const ProbBounds& block_probability(EventFamily f, int l, std::uint64_t k) const;
    /// total hits over k = 1..K for one path
    std::uint32_t total_hits(EventFamily f, int l, std::uint32_t path) const;
    double mean_total_hits(EventFamily f, int l) const;
    /// sample standard deviation of the per-path totals
    double sd_total_hits(EventFamily f, int l) const;

    friend BlockHitMatrix run_ensemble(const DiscreteDistribution& dist, const SimConfig& config);
    friend bool operator==(const BlockHitMatrix& a, const BlockHitMatrix& b);

private:
    std::size_t lane(EventFamily f, int l) const;
    SimConfig config_;
    int n_offsets_ = 1;
    // bits[lane][path * K + (k-1)], lane = family * n_offsets + (l - l_min)
    std::vector<std::vector<std::uint8_t>> bits_;
    std::vector<std::vector<ProbBounds>> probs_;  // probs_[lane][k-1]
};

/// Simulates config.paths independent record paths on reproducible
/// per-path substreams and fills all three event families for every
/// k <= K and l in [l_min, l_max]. Deterministic given the seed.
BlockHitMatrix run_ensemble(const DiscreteDistribution& dist, const SimConfig& config);

}  // namespace recmax

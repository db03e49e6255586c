#include "recmax/record_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "recmax/rng.hpp"

namespace recmax {
namespace {

// Exact geometric sampling is used while q >= 1e-8, i.e. R(m+1) <= ln 1e8.
constexpr double kExactWaitLogQ = -18.420680743952367;

// Integer counts are kept while they stay comfortably inside uint64.
constexpr double kMaxCountLog = 42.0;  // e^42 ~ 1.7e18

}  // namespace

Waiting waiting_from_uniform(double u, double log_q) {
    if (log_q > 0.0) throw std::invalid_argument("waiting_from_uniform: log_q must be <= 0");
    if (log_q == 0.0) return Waiting{true, 1, 0.0};  // q == 1: the next draw exceeds m surely
    if (log_q >= kExactWaitLogQ) {
        const double denom = log1mexp(-log_q);  // ln(1-q) < 0
        double w = std::ceil(std::log(u) / denom);
        if (w < 1.0) w = 1.0;
        const auto count = static_cast<std::uint64_t>(w);
        return Waiting{true, count, std::log(w)};
    }
    // q < 1e-8: geometric -> exponential, ln W = -log_q + ln(-ln u)
    double lw = -log_q + std::log(-std::log(u));
    if (lw < 0.0) lw = 0.0;
    if (lw <= kMaxCountLog) {
        const double w = std::ceil(std::exp(lw));
        return Waiting{true, static_cast<std::uint64_t>(w), std::log(w)};
    }
    return Waiting{false, 0, lw};
}

Waiting sample_record_waiting(std::mt19937_64& rng, double log_q) {
    return waiting_from_uniform(uniform_open01(rng), log_q);
}

std::int64_t conditional_value_from_uniform(const DiscreteDistribution& dist, std::int64_t m,
                                            double u) {
    if (m < -1) throw std::invalid_argument("conditional_value_from_uniform: m must be >= -1");
    const double base = m < 0 ? 0.0 : dist.log_tail(static_cast<std::uint64_t>(m) + 1);
    const double target = base - std::log1p(-u);  // R(m+1) - ln(1-u)
    auto tail = [&](std::int64_t i) { return dist.log_tail(static_cast<std::uint64_t>(i) + 1); };
    std::int64_t i = m + 1;
    for (int step = 0; step < 48; ++step) {
        if (tail(i) >= target) return i;
        ++i;
    }
    // long conditional overshoot: exponential search then bisection on R
    std::int64_t lo = i;  // tail(lo - 1) < target not yet known for lo itself
    std::int64_t span = 48;
    while (tail(lo + span) < target) {
        lo += span;
        span *= 2;
    }
    std::int64_t hi = lo + span;  // tail(hi) >= target, tail(lo) may or may not
    while (hi > lo) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (tail(mid) >= target)
            hi = mid;
        else
            lo = mid + 1;
    }
    return hi;
}

std::int64_t sample_conditional_value(const DiscreteDistribution& dist, std::mt19937_64& rng,
                                      std::int64_t m) {
    return conditional_value_from_uniform(dist, m, uniform_open01(rng));
}

LogTime advance(LogTime t, const Waiting& w) {
    if (t.has_count() && w.has_count && t.count <= ~std::uint64_t{0} - w.count) {
        const std::uint64_t n = t.count + w.count;
        if (n <= (std::uint64_t{1} << 62)) return LogTime::from_count(n);
    }
    return LogTime::from_log(log_add_exp(t.log_value, w.log_value));
}

std::int64_t RecordPath::value_at(LogTime t) const {
    if (records.empty() || t < records.front().time)
        throw std::out_of_range("RecordPath::value_at: time before the first record");
    // last record with time <= t
    std::size_t lo = 0, hi = records.size();
    while (hi - lo > 1) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (records[mid].time <= t)
            lo = mid;
        else
            hi = mid;
    }
    return records[lo].value;
}

RecordPath simulate_record_path(const DiscreteDistribution& dist, std::uint64_t K,
                                std::mt19937_64& rng) {
    RecordPath path;
    path.horizon = dist.block_start(K + 1);
    LogTime t = LogTime::one();
    std::int64_t v = sample_conditional_value(dist, rng, -1);
    path.records.push_back({t, v});
    for (;;) {
        const double log_q = -dist.log_tail(static_cast<std::uint64_t>(v) + 1);
        const Waiting w = sample_record_waiting(rng, log_q);
        const LogTime t2 = advance(t, w);
        if (!(t2 < path.horizon)) break;
        v = sample_conditional_value(dist, rng, v);
        path.records.push_back({t2, v});
        t = t2;
    }
    return path;
}

BlockBoundaries BlockBoundaries::compute(const DiscreteDistribution& dist, std::uint64_t K) {
    BlockBoundaries b;
    b.K = K;
    b.start.resize(K + 2);
    for (std::uint64_t k = 1; k <= K + 1; ++k) b.start[k] = dist.block_start(k);
    return b;
}

namespace {

// occupancy interval of a record value: [record time, next record time), the
// last record extending to the horizon
bool occupancy_intersects(const RecordPath& path, std::size_t idx, LogTime s, LogTime e) {
    const LogTime tv = path.records[idx].time;
    if (!(tv < e)) return false;
    if (idx + 1 == path.records.size()) return true;  // occupied through the horizon >= e > s
    const LogTime succ = path.records[idx + 1].time;
    return succ > s;
}

// index of the record holding value v, if v was ever a record value
std::ptrdiff_t find_record_by_value(const RecordPath& path, std::int64_t v) {
    std::size_t lo = 0, hi = path.records.size();
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (path.records[mid].value < v)
            lo = mid + 1;
        else
            hi = mid;
    }
    if (lo < path.records.size() && path.records[lo].value == v)
        return static_cast<std::ptrdiff_t>(lo);
    return -1;
}

}  // namespace

bool level_visited_in_block(const RecordPath& path, const BlockBoundaries& blocks,
                            std::uint64_t k, std::int64_t v) {
    if (k < 1 || k > blocks.K) throw std::out_of_range("level_visited_in_block: block index");
    if (!(blocks.start[k + 1] <= path.horizon))
        throw std::out_of_range("level_visited_in_block: path horizon below block end");
    if (v < 0) return false;
    const std::ptrdiff_t idx = find_record_by_value(path, v);
    if (idx < 0) return false;
    return occupancy_intersects(path, static_cast<std::size_t>(idx), blocks.start[k],
                                blocks.start[k + 1]);
}

BlockHits block_hits(const RecordPath& path, const BlockBoundaries& blocks, std::uint64_t k,
                     int l) {
    if (k < 1 || k > blocks.K) throw std::out_of_range("block_hits: block index");
    if (!(blocks.start[k + 1] <= path.horizon))
        throw std::out_of_range("block_hits: path horizon below block end");
    BlockHits hits;
    const std::int64_t ki = static_cast<std::int64_t>(k);
    const std::int64_t m_at_start = path.value_at(blocks.start[k]);
    hits.lower_at_most = m_at_start <= ki - l;
    hits.lower_equal = m_at_start == ki - l;
    hits.upper = level_visited_in_block(path, blocks, k, ki + l);
    return hits;
}

BlockHits block_hits(const RecordPath& path, const DiscreteDistribution& dist, std::uint64_t k,
                     int l) {
    return block_hits(path, BlockBoundaries::compute(dist, k), k, l);
}

BlockHitMatrix::BlockHitMatrix(SimConfig config) : config_(config) {
    if (config_.K < 1 || config_.paths < 1 || config_.l_min > config_.l_max)
        throw std::invalid_argument("BlockHitMatrix: invalid configuration");
    n_offsets_ = config_.l_max - config_.l_min + 1;
    const std::size_t lanes =
        config_.families().size() * static_cast<std::size_t>(n_offsets_);
    bits_.assign(lanes, std::vector<std::uint8_t>(
                            static_cast<std::size_t>(config_.paths) * config_.K, 0));
    probs_.assign(lanes, {});
}

std::size_t BlockHitMatrix::lane(EventFamily f, int l) const {
    if (l < config_.l_min || l > config_.l_max)
        throw std::out_of_range("BlockHitMatrix: offset outside configured range");
    if (f == EventFamily::lower_equal_anywhere && !config_.lower_equal_anywhere)
        throw std::out_of_range("BlockHitMatrix: lower_equal_anywhere not recorded");
    return static_cast<std::size_t>(f) * static_cast<std::size_t>(n_offsets_) +
           static_cast<std::size_t>(l - config_.l_min);
}

bool BlockHitMatrix::hit(EventFamily f, int l, std::uint32_t path, std::uint64_t k) const {
    if (path >= config_.paths || k < 1 || k > config_.K)
        throw std::out_of_range("BlockHitMatrix: path or block index");
    return bits_[lane(f, l)][static_cast<std::size_t>(path) * config_.K + (k - 1)] != 0;
}

double BlockHitMatrix::block_hit_rate(EventFamily f, int l, std::uint64_t k) const {
    std::uint64_t n = 0;
    for (std::uint32_t p = 0; p < config_.paths; ++p) n += hit(f, l, p, k) ? 1 : 0;
    return static_cast<double>(n) / static_cast<double>(config_.paths);
}

const ProbBounds& BlockHitMatrix::block_probability(EventFamily f, int l, std::uint64_t k) const {
    if (k < 1 || k > config_.K) throw std::out_of_range("BlockHitMatrix: block index");
    return probs_[lane(f, l)][k - 1];
}

std::uint32_t BlockHitMatrix::total_hits(EventFamily f, int l, std::uint32_t path) const {
    const auto& lane_bits = bits_[lane(f, l)];
    const std::size_t base = static_cast<std::size_t>(path) * config_.K;
    std::uint32_t n = 0;
    for (std::uint64_t k = 0; k < config_.K; ++k) n += lane_bits[base + k];
    return n;
}

double BlockHitMatrix::mean_total_hits(EventFamily f, int l) const {
    double s = 0.0;
    for (std::uint32_t p = 0; p < config_.paths; ++p) s += total_hits(f, l, p);
    return s / config_.paths;
}

double BlockHitMatrix::sd_total_hits(EventFamily f, int l) const {
    if (config_.paths < 2) return 0.0;
    const double mean = mean_total_hits(f, l);
    double ss = 0.0;
    for (std::uint32_t p = 0; p < config_.paths; ++p) {
        const double d = total_hits(f, l, p) - mean;
        ss += d * d;
    }
    return std::sqrt(ss / (config_.paths - 1));
}

bool operator==(const BlockHitMatrix& a, const BlockHitMatrix& b) {
    return a.config_.K == b.config_.K && a.config_.paths == b.config_.paths &&
           a.config_.l_min == b.config_.l_min && a.config_.l_max == b.config_.l_max &&
           a.config_.lower_equal_anywhere == b.config_.lower_equal_anywhere &&
           a.bits_ == b.bits_;
}

BlockHitMatrix run_ensemble(const DiscreteDistribution& dist, const SimConfig& config) {
    BlockHitMatrix matrix(config);
    // warm the tail cache past the horizon so workers only ever read
    dist.warm_up(config.K + 64);
    const BlockBoundaries blocks = BlockBoundaries::compute(dist, config.K);

    for (int l = config.l_min; l <= config.l_max; ++l)
        for (const EventFamily f : config.families())
            matrix.probs_[matrix.lane(f, l)] = expected_hits(dist, config.K, l, f).per_block;

    auto worker = [&](std::uint32_t p_begin, std::uint32_t p_end) {
        for (std::uint32_t p = p_begin; p < p_end; ++p) {
            std::mt19937_64 rng = make_stream(config.seed, p);
            const RecordPath path = simulate_record_path(dist, config.K, rng);
            std::size_t rec = 0;  // last record with time <= n_k, advanced with k
            for (std::uint64_t k = 1; k <= config.K; ++k) {
                while (rec + 1 < path.records.size() &&
                       path.records[rec + 1].time <= blocks.start[k])
                    ++rec;
                const std::int64_t m_at_start = path.records[rec].value;
                for (int l = config.l_min; l <= config.l_max; ++l) {
                    const std::int64_t ki = static_cast<std::int64_t>(k);
                    const std::size_t cell = static_cast<std::size_t>(p) * config.K + (k - 1);
                    matrix.bits_[matrix.lane(EventFamily::lower_at_most, l)][cell] =
                        m_at_start <= ki - l;
                    matrix.bits_[matrix.lane(EventFamily::lower_equal, l)][cell] =
                        m_at_start == ki - l;
                    matrix.bits_[matrix.lane(EventFamily::upper, l)][cell] =
                        level_visited_in_block(path, blocks, k, ki + l);
                    if (config.lower_equal_anywhere)
                        matrix.bits_[matrix.lane(EventFamily::lower_equal_anywhere, l)][cell] =
                            level_visited_in_block(path, blocks, k, ki - l);
                }
            }
        }
    };

    unsigned n_threads = config.threads ? config.threads : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    n_threads = std::min<unsigned>(n_threads, config.paths);
    if (n_threads <= 1) {
        worker(0, config.paths);
    } else {
        std::vector<std::thread> pool;
        const std::uint32_t chunk = (config.paths + n_threads - 1) / n_threads;
        for (unsigned t = 0; t < n_threads; ++t) {
            const std::uint32_t lo = t * chunk;
            const std::uint32_t hi = std::min(config.paths, lo + chunk);
            if (lo >= hi) break;
            pool.emplace_back(worker, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    return matrix;
}

}  // namespace recmax

#include "iini/annealer.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <string>
#include <thread>

#include "iini/error.hpp"
#include "iini/rng.hpp"

namespace iini {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t fnv1a_pixels(const PixelGrid& g,
                           const std::vector<std::size_t>& pixels) {
    std::uint64_t h = 14695981039346656037ULL;
    for (std::size_t i : pixels) {
        std::uint64_t bits;
        std::memcpy(&bits, &g.values[i], sizeof bits);
        for (int b = 0; b < 8; ++b) {
            h ^= (bits >> (8 * b)) & 0xFFu;
            h *= 1099511628211ULL;
        }
    }
    return h;
}

struct ChainResult {
    CheckpointLog log;
    bool stopped = false;
    std::uint64_t iterations = 0;
};

/// One Metropolis chain over the given pixels of a shared grid. Distinct
/// chains write disjoint pixels and read only their own pixels plus
/// training walls, so concurrent chains over distinct segments are
/// race-free.
ChainResult anneal_pixels(PixelGrid& grid,
                          const std::vector<std::size_t>& pixels,
                          const MetricSpec& m, const AnnealSchedule& s,
                          std::uint64_t seed, std::uint64_t max_checkpoints,
                          const CheckpointObserver& observer) {
    ValueSet vs = ValueSet::make(s.epsilon_p);
    double stop_threshold = s.epsilon_p / 2.0;
    if (m.kind == MetricKind::Cosine) {
        vs = vs.scaled(kTwoPi);  // candidates span the full circle
        stop_threshold *= kTwoPi;
    }
    const std::uint64_t n_c = checkpoint_spacing(pixels.size(), s.epsilon_p);

    ChainResult res;
    CounterRng rng(seed);
    std::vector<double> prev(pixels.size());
    for (std::size_t k = 0; k < pixels.size(); ++k)
        prev[k] = grid.values[pixels[k]];

    for (std::uint64_t n = 0; n < max_checkpoints; ++n) {
        const double t = s.temperature(n);
        std::uint64_t accepted = 0;
        for (std::uint64_t it = 0; it < n_c; ++it) {
            // Draw order per iteration: pixel, candidate, then the coin
            // (only when the move worsens the dissimilarity).
            const std::size_t at = pixels[rng.next_index(pixels.size())];
            const double cand = vs.values[rng.next_index(vs.values.size())];
            const int r =
                static_cast<int>(at / static_cast<std::size_t>(grid.cols));
            const int c =
                static_cast<int>(at % static_cast<std::size_t>(grid.cols));
            const NeighbourView nv = gather_neighbours(grid, r, c, m);
            if (nv.count == 0)
                throw Error("IsolatedPixel",
                            "pixel " + std::to_string(at) +
                                " has no neighbours");
            const double dd = dissimilarity_at(nv, cand, m.kind) -
                              dissimilarity_at(nv, nv.center, m.kind);
            bool accept;
            if (dd <= 0.0)
                accept = true;
            else if (t <= 0.0)
                accept = false;
            else
                accept = rng.next_double() < std::exp(-dd / t);
            if (accept) {
                grid.values[at] = cand;
                ++accepted;
            }
        }
        res.iterations += n_c;

        double sum = 0.0;
        for (std::size_t k = 0; k < pixels.size(); ++k) {
            const double d = grid.values[pixels[k]] - prev[k];
            sum += d * d;
            prev[k] = grid.values[pixels[k]];
        }
        const double rm = std::sqrt(sum / static_cast<double>(pixels.size()));

        CheckpointEntry entry;
        entry.checkpoint = n;
        entry.iterations = res.iterations;
        entry.temperature = t;
        entry.rmse_vs_previous = rm;
        entry.acceptance_rate =
            static_cast<double>(accepted) / static_cast<double>(n_c);
        entry.digest = fnv1a_pixels(grid, pixels);
        res.log.push_back(entry);
        if (observer) observer(entry, grid);

        if (rm < stop_threshold) {
            res.stopped = true;
            break;
        }
    }
    return res;
}

unsigned env_thread_cap() {
    const char* env = std::getenv("IINI_THREADS");
    if (!env) return 0;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || v < 1) return 0;
    return static_cast<unsigned>(v);
}

}  // namespace

double AnnealSchedule::temperature(std::uint64_t checkpoint) const {
    return t_start / std::pow(decay_a, static_cast<double>(checkpoint));
}

void AnnealSchedule::validate() const {
    if (!(t_start > 0.0))
        throw Error("ConfigError", "t_start must be positive");
    if (!(decay_a > 1.0))
        throw Error("ConfigError", "decay_a must be greater than 1");
    if (!(epsilon_p > 0.0) || !(epsilon_p < 1.0))
        throw Error("ConfigError", "epsilon_p must lie in (0, 1)");
}

double accept_probability(double delta_d, double t) {
    if (delta_d <= 0.0) return 1.0;
    if (t <= 0.0) return 0.0;
    return std::exp(-delta_d / t);
}

std::uint64_t checkpoint_spacing(std::size_t n_infer, double epsilon_p) {
    if (n_infer == 0)
        throw Error("ConfigError", "checkpoint spacing needs n_infer >= 1");
    if (!(epsilon_p > 0.0) || !(epsilon_p < 1.0))
        throw Error("ConfigError", "epsilon_p must lie in (0, 1)");
    const double q = static_cast<double>(n_infer) / epsilon_p;
    const double r = std::nearbyint(q);
    // Quotients like 3 / (1/3) land a hair above the true integer; snap
    // instead of letting ceil overshoot by one.
    if (std::fabs(q - r) < 1e-6 * std::max(1.0, r))
        return static_cast<std::uint64_t>(r);
    return static_cast<std::uint64_t>(std::ceil(q));
}

double rmse_between(const PixelGrid& g1, const PixelGrid& g2) {
    if (g1.rows != g2.rows || g1.cols != g2.cols)
        throw Error("ShapeError", "grid shapes differ: " +
                                      std::to_string(g1.rows) + "x" +
                                      std::to_string(g1.cols) + " vs " +
                                      std::to_string(g2.rows) + "x" +
                                      std::to_string(g2.cols));
    if (g1.roles != g2.roles)
        throw Error("ShapeError", "grid role masks differ");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < g1.cell_count(); ++i) {
        if (g1.roles[i] != PixelRole::Inference) continue;
        const double d = g1.values[i] - g2.values[i];
        sum += d * d;
        ++n;
    }
    if (n == 0) return 0.0;
    return std::sqrt(sum / static_cast<double>(n));
}

AnnealResult run_annealing(const PixelGrid& g, const MetricSpec& m,
                           const AnnealSchedule& s, std::uint64_t seed,
                           std::uint64_t max_checkpoints,
                           const CheckpointObserver& observer) {
    m.validate();
    s.validate();
    const std::vector<std::size_t> pixels = g.inference_indices();
    if (pixels.empty())
        throw Error("NothingToInfer", "grid has no inference pixels");

    AnnealResult res;
    res.grid = g;
    ChainResult cr =
        anneal_pixels(res.grid, pixels, m, s, seed, max_checkpoints, observer);
    res.log = std::move(cr.log);
    res.stopped_by_rmse = cr.stopped;
    res.total_iterations = cr.iterations;
    return res;
}

SegmentedAnnealResult run_annealing_segmented(
    const PixelGrid& g, const SegmentMap& segments, const MetricSpec& m,
    const AnnealSchedule& s, std::uint64_t base_seed,
    std::uint64_t max_checkpoints, unsigned max_threads) {
    m.validate();
    s.validate();
    if (segments.segment_count <= 0)
        throw Error("NothingToInfer", "grid has no inference segments");

    std::vector<std::vector<std::size_t>> members(
        static_cast<std::size_t>(segments.segment_count));
    for (std::size_t i = 0; i < segments.labels.size(); ++i)
        if (segments.labels[i] != SegmentMap::kTrainingLabel)
            members[static_cast<std::size_t>(segments.labels[i])].push_back(i);

    SegmentedAnnealResult res;
    res.grid = g;
    res.segment_logs.resize(members.size());
    res.stopped_by_rmse.assign(members.size(), false);

    unsigned threads = max_threads;
    if (threads == 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        threads = hw ? hw : 1;
    }
    if (const unsigned cap = env_thread_cap(); cap > 0)
        threads = std::min(threads, cap);
    threads = static_cast<unsigned>(
        std::min<std::size_t>(threads, members.size()));

    std::atomic<std::size_t> next{0};
    std::atomic<std::uint64_t> iterations{0};
    auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= members.size()) break;
            ChainResult cr = anneal_pixels(
                res.grid, members[k], m, s,
                derive_seed(base_seed, static_cast<std::uint64_t>(k)),
                max_checkpoints, nullptr);
            res.segment_logs[k] = std::move(cr.log);
            res.stopped_by_rmse[k] = cr.stopped;
            iterations.fetch_add(cr.iterations);
        }
    };

    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    res.total_iterations = iterations.load();
    return res;
}

}  // namespace iini

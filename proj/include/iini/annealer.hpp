#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "iini/grid.hpp"
#include "iini/metric.hpp"

namespace iini {

/// Exponential cooling schedule T(n) = t_start / pow(decay_a, n), held
/// constant within each checkpoint interval (n counts checkpoints from 0).
/// The default start temperature 1/ln(2) makes exp(-1/T(0)) = 0.5: at the
/// outset, a candidate that worsens the dissimilarity by the full unit
/// range is still accepted half the time.
struct AnnealSchedule {
    double t_start = 1.4426950408889634;  // 1 / ln 2
    double decay_a = 1.15;
    double epsilon_p = 0.02;  // candidate spacing, 1/50

    double temperature(std::uint64_t checkpoint) const;

    /// Throws ConfigError when t_start <= 0, decay_a <= 1, or epsilon_p
    /// lies outside (0, 1).
    void validate() const;
};

/// Probability of accepting a proposal that changes the local dissimilarity
/// by delta_d at temperature t: 1 when delta_d <= 0, else exp(-delta_d/t).
/// t == 0 is handled as the limit (accept only improvements).
double accept_probability(double delta_d, double t);

/// Iterations between consecutive checkpoints: ceil(n_infer / epsilon_p).
std::uint64_t checkpoint_spacing(std::size_t n_infer, double epsilon_p);

/// RMSE over inference pixels only; training pixels cannot change between
/// snapshots so they would only dilute the signal. Throws ShapeError when
/// dimensions or role masks differ.
double rmse_between(const PixelGrid& g1, const PixelGrid& g2);

struct CheckpointEntry {
    std::uint64_t checkpoint = 0;   // index n, counted from 0
    std::uint64_t iterations = 0;   // cumulative iterations when logged
    double temperature = 0.0;       // T(n) used during the interval
    double rmse_vs_previous = 0.0;  // vs the previous snapshot
    double acceptance_rate = 0.0;   // accepted / attempted in the interval
    std::uint64_t digest = 0;       // FNV-1a over inference-pixel bytes
};

using CheckpointLog = std::vector<CheckpointEntry>;

struct AnnealResult {
    PixelGrid grid;
    CheckpointLog log;
    bool stopped_by_rmse = false;  // false: max_checkpoints was exhausted
    std::uint64_t total_iterations = 0;
};

using CheckpointObserver =
    std::function<void(const CheckpointEntry&, const PixelGrid&)>;

/// Metropolis annealing of the inference pixels of g (g normalized and
/// initialized). Per iteration: pick a uniformly random inference pixel,
/// draw a uniformly random candidate from the value set implied by
/// s.epsilon_p (scaled by 2*pi in cosine mode), accept per
/// accept_probability at the current checkpoint's temperature. Snapshots
/// every checkpoint_spacing iterations; stops when rmse_between the last
/// two snapshots drops below epsilon_p / 2 (scaled likewise in cosine
/// mode) or after max_checkpoints intervals. Training pixels are never
/// modified; the same seed reproduces the run bit for bit.
/// Throws NothingToInfer when g has no inference pixels.
AnnealResult run_annealing(const PixelGrid& g, const MetricSpec& m,
                           const AnnealSchedule& s, std::uint64_t seed,
                           std::uint64_t max_checkpoints = 500,
                           const CheckpointObserver& observer = nullptr);

/// Anneals every connected inference segment as an independent chain with
/// a seed derived from (base_seed, segment label). Segments read only
/// their own pixels plus training walls, so the merged result does not
/// depend on execution order; max_threads = 0 picks the hardware count
/// (capped by the IINI_THREADS environment variable when set).
struct SegmentedAnnealResult {
    PixelGrid grid;
    std::vector<CheckpointLog> segment_logs;  // indexed by segment label
    std::vector<bool> stopped_by_rmse;
    std::uint64_t total_iterations = 0;
};

SegmentedAnnealResult run_annealing_segmented(const PixelGrid& g,
                                              const SegmentMap& segments,
                                              const MetricSpec& m,
                                              const AnnealSchedule& s,
                                              std::uint64_t base_seed,
                                              std::uint64_t max_checkpoints = 500,
                                              unsigned max_threads = 0);

}  // namespace iini

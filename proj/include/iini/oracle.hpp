#pragma once

#include <cstdint>
#include <vector>

#include "iini/grid.hpp"
#include "iini/metric.hpp"
#include "iini/scatter.hpp"

namespace iini {

/// Independent reference solver for the square-difference metric: one
/// linear equation per inference pixel stating sum(b_i) * p = sum(b_i *
/// p_i), assembled sparse and solved by direct Cholesky factorization. No
/// sweeps, no randomness; the unique global minimizer of the total
/// square-difference energy with training pixels fixed.
/// Throws ConfigError for a cosine metric, UnconstrainedSegment when some
/// inference segment touches no training pixel (its system is singular),
/// and SolverFailure when the factorization fails.
PixelGrid solve_harmonic(const PixelGrid& g, const MetricSpec& m);

struct BruteForceLimits {
    std::size_t max_inference_pixels = 12;
    std::uint64_t max_states = 100000000;  // 1e8
};

struct BruteForceResult {
    PixelGrid grid;
    double energy = 0.0;  // sum of per-pixel dissimilarities at the optimum
    std::uint64_t states_examined = 0;
};

/// Exhaustive minimizer of total dissimilarity over all assignments of
/// value-set members to the inference pixels (candidates scaled by 2*pi in
/// cosine mode). Ties within 1e-12 resolve to the lexicographically
/// smallest assignment in flat-index order. Throws TooLarge when the
/// limits are exceeded.
BruteForceResult brute_force_discrete(const PixelGrid& g,
                                      const MetricSpec& m, const ValueSet& vs,
                                      const BruteForceLimits& limits = {});

/// Total energy: sum of dissimilarity(own NeighbourView) over all
/// inference pixels.
double total_energy(const PixelGrid& g, const MetricSpec& m);

/// Inverse-distance-weighted prediction at (x, y) from all scatter points
/// (no search radius). A coincident point returns that sample's value.
/// Throws ConfigError when power <= 0 or points is empty.
double idw_predict(const std::vector<Point>& points, double x, double y,
                   double power = 2.0);

/// Comparison baseline: fills every inference pixel of g with the IDW
/// prediction at its centroid; training pixels are kept.
PixelGrid idw_baseline(const ScatterSet& s, const PixelGrid& g,
                       double power = 2.0);

struct HoldoutStats {
    double rmse = 0.0;
    std::size_t n_points = 0;  // points actually compared
    std::size_t skipped = 0;   // points outside the grid extent
};

/// Bins withheld points to their nearest cell and returns the RMSE against
/// the gridded surface in the surface's units. Points outside the extent
/// are skipped and counted. Throws EmptyHoldout when nothing lands on the
/// grid.
HoldoutStats holdout_rmse(const PixelGrid& predicted,
                          const std::vector<Point>& withheld);

/// RMSE between two equally sized value vectors.
/// Throws ShapeError when sizes differ or both are empty.
double rmse(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace iini

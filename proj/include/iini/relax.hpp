#pragma once

#include <cstdint>

#include "iini/grid.hpp"
#include "iini/metric.hpp"

namespace iini {

/// The closed-form minimizer of the square-difference dissimilarity: the
/// bias-weighted mean of the neighbour values. Continuous, never snapped
/// back to the discrete candidate set. Throws IsolatedPixel when the view
/// has no neighbours.
double optimal_value_sq(const NeighbourView& nv);

/// The closed-form minimizer of the cosine dissimilarity: the circular
/// mean atan2(sum b*sin, sum b*cos) of the neighbour angles, folded into
/// [0, 2*pi). Throws IsolatedPixel on an empty view and
/// DegenerateCircularMean when the weighted resultant vector is shorter
/// than 1e-12 (antipodal neighbours cancel and every angle is equally
/// optimal).
double optimal_value_cos(const NeighbourView& nv);

enum class RelaxMode { Conditional, Unconditional };

struct RelaxConfig {
    RelaxMode mode = RelaxMode::Conditional;
    double tolerance = 1e-9;  // max per-pixel update magnitude to stop at
    std::uint64_t max_sweeps = 10000;
    /// Sweep count for the unconditional pass; 0 means iterate to
    /// tolerance, 1 reproduces a single-application variant.
    std::uint64_t unconditional_passes = 0;

    /// Throws ConfigError when tolerance <= 0 or max_sweeps == 0.
    void validate() const;
};

struct RelaxOutcome {
    PixelGrid grid;
    std::uint64_t sweeps_used = 0;
    double final_max_update = 0.0;
    bool converged = false;
};

/// Conditional pass: row-major Gauss-Seidel sweeps replacing every
/// inference pixel in place with its closed-form optimum (freshest
/// neighbour values) until no pixel moves by more than cfg.tolerance or
/// max_sweeps elapse. Cosine mode measures update magnitudes as circular
/// distances. Training pixels are never modified.
RelaxOutcome relax(const PixelGrid& g, const MetricSpec& m,
                   const RelaxConfig& cfg);

/// Unconditional pass, to run only on a conditionally relaxed grid: with
/// every inference pixel frozen, each training pixel is re-approximated
/// from its own neighbourhood, swept to the same tolerance (or for exactly
/// cfg.unconditional_passes sweeps when positive). Tends to contract the
/// value range at local extrema.
RelaxOutcome relax_unconditional(const PixelGrid& g, const MetricSpec& m,
                                 const RelaxConfig& cfg);

}  // namespace iini

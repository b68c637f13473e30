#include "iini/relax.hpp"

#include <cmath>

#include "iini/error.hpp"

namespace iini {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double update_distance(double a, double b, MetricKind kind) {
    if (kind == MetricKind::SquareDifference) return std::fabs(a - b);
    double d = std::fabs(canonical_angle(a) - canonical_angle(b));
    return std::min(d, kTwoPi - d);
}

double optimal_value(const NeighbourView& nv, MetricKind kind) {
    return kind == MetricKind::SquareDifference ? optimal_value_sq(nv)
                                                : optimal_value_cos(nv);
}

RelaxOutcome sweep_role(const PixelGrid& g, const MetricSpec& m,
                        const RelaxConfig& cfg, PixelRole target,
                        std::uint64_t fixed_passes) {
    m.validate();
    cfg.validate();

    RelaxOutcome out;
    out.grid = g;
    const std::uint64_t limit = fixed_passes > 0
                                    ? std::min(fixed_passes, cfg.max_sweeps)
                                    : cfg.max_sweeps;
    for (std::uint64_t sweep = 0; sweep < limit; ++sweep) {
        double max_update = 0.0;
        for (int r = 0; r < out.grid.rows; ++r) {
            for (int c = 0; c < out.grid.cols; ++c) {
                if (out.grid.role(r, c) != target) continue;
                const NeighbourView nv = gather_neighbours(out.grid, r, c, m);
                const double opt = optimal_value(nv, m.kind);
                max_update = std::max(
                    max_update, update_distance(opt, nv.center, m.kind));
                out.grid.value(r, c) = opt;
            }
        }
        ++out.sweeps_used;
        out.final_max_update = max_update;
        if (fixed_passes == 0 && max_update < cfg.tolerance) {
            out.converged = true;
            break;
        }
    }
    if (fixed_passes > 0) out.converged = out.final_max_update < cfg.tolerance;
    return out;
}

}  // namespace

double optimal_value_sq(const NeighbourView& nv) {
    if (nv.count == 0)
        throw Error("IsolatedPixel",
                    "pixel has no neighbours; no optimal value exists");
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < nv.count; ++i) {
        const auto& s = nv.items[static_cast<std::size_t>(i)];
        num += s.bias * s.value;
        den += s.bias;
    }
    return num / den;
}

double optimal_value_cos(const NeighbourView& nv) {
    if (nv.count == 0)
        throw Error("IsolatedPixel",
                    "pixel has no neighbours; no optimal value exists");
    double sin_sum = 0.0;
    double cos_sum = 0.0;
    for (int i = 0; i < nv.count; ++i) {
        const auto& s = nv.items[static_cast<std::size_t>(i)];
        sin_sum += s.bias * std::sin(s.value);
        cos_sum += s.bias * std::cos(s.value);
    }
    if (std::hypot(sin_sum, cos_sum) < 1e-12)
        throw Error("DegenerateCircularMean",
                    "neighbour angles cancel; the circular mean is "
                    "undefined");
    return canonical_angle(std::atan2(sin_sum, cos_sum));
}

void RelaxConfig::validate() const {
    if (!(tolerance > 0.0))
        throw Error("ConfigError", "relax tolerance must be positive");
    if (max_sweeps == 0)
        throw Error("ConfigError", "max_sweeps must be at least 1");
}

RelaxOutcome relax(const PixelGrid& g, const MetricSpec& m,
                   const RelaxConfig& cfg) {
    return sweep_role(g, m, cfg, PixelRole::Inference, 0);
}

RelaxOutcome relax_unconditional(const PixelGrid& g, const MetricSpec& m,
                                 const RelaxConfig& cfg) {
    return sweep_role(g, m, cfg, PixelRole::Training,
                      cfg.unconditional_passes);
}

}  // namespace iini

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>

#include "iini/error.hpp"
#include "iini/grid.hpp"

namespace iini {

enum class MetricKind { SquareDifference, Cosine };
enum class BiasPolicy { Unbiased, TrainingBoost };

/// Which dissimilarity to evaluate and how training neighbours are weighted.
/// Cosine mode treats pixel values as angles in radians instead of
/// unit-interval scalars.
struct MetricSpec {
    MetricKind kind = MetricKind::SquareDifference;
    BiasPolicy bias_policy = BiasPolicy::Unbiased;
    double beta = 3.0;  // weight of training neighbours under TrainingBoost

    double bias_for(PixelRole role) const {
        return (bias_policy == BiasPolicy::TrainingBoost &&
                role == PixelRole::Training)
                   ? beta
                   : 1.0;
    }

    /// Throws ConfigError when beta < 1.
    void validate() const;
};

struct NeighbourSample {
    double value;
    PixelRole role;
    double bias;
};

/// A pixel value with its 2-4 edge-adjacent neighbours: 4 in the interior,
/// 3 on edges, 2 in corners. Diagonal cells are never neighbours.
struct NeighbourView {
    double center = 0.0;
    int count = 0;
    std::array<NeighbourSample, 4> items{};

    void add(double value, PixelRole role, double bias) {
        items[static_cast<std::size_t>(count++)] = {value, role, bias};
    }
    std::span<const NeighbourSample> neighbours() const {
        return {items.data(), static_cast<std::size_t>(count)};
    }
};

inline NeighbourView gather_neighbours(const PixelGrid& g, int r, int c,
                                       const MetricSpec& m) {
    NeighbourView nv;
    nv.center = g.value(r, c);
    constexpr int dr[4] = {-1, 1, 0, 0};
    constexpr int dc[4] = {0, 0, -1, 1};
    for (int k = 0; k < 4; ++k) {
        const int rr = r + dr[k];
        const int cc = c + dc[k];
        if (!g.in_bounds(rr, cc)) continue;
        const PixelRole role = g.role(rr, cc);
        nv.add(g.value(rr, cc), role, m.bias_for(role));
    }
    return nv;
}

/// Bias-weighted square difference between p and the neighbours in nv,
/// normalized by the total bias.
inline double square_difference_at(const NeighbourView& nv, double p) {
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < nv.count; ++i) {
        const auto& s = nv.items[static_cast<std::size_t>(i)];
        const double d = p - s.value;
        num += s.bias * d * d;
        den += s.bias;
    }
    return num / den;
}

/// Negated bias-weighted cosine similarity between angle p and the
/// neighbour angles; lies in [-1, 1].
inline double cosine_dissimilarity_at(const NeighbourView& nv, double p) {
    double num = 0.0;
    double den = 0.0;
    for (int i = 0; i < nv.count; ++i) {
        const auto& s = nv.items[static_cast<std::size_t>(i)];
        num += s.bias * std::cos(p - s.value);
        den += s.bias;
    }
    return -num / den;
}

inline double dissimilarity_at(const NeighbourView& nv, double p,
                               MetricKind kind) {
    return kind == MetricKind::SquareDifference
               ? square_difference_at(nv, p)
               : cosine_dissimilarity_at(nv, p);
}

/// Per-pixel dissimilarity of the view's own center value.
/// Throws IsolatedPixel when the neighbour list is empty.
double square_difference(const NeighbourView& nv);
double cosine_dissimilarity(const NeighbourView& nv);
double dissimilarity(const NeighbourView& nv, MetricKind kind);

/// D(candidate) - D(current) for the inference pixel at flat index `at`,
/// holding all neighbours fixed. Throws RoleViolation when the pixel is a
/// training pixel.
double delta_d(const PixelGrid& g, std::size_t at, double candidate,
               const MetricSpec& m);

/// Folds an angle into [0, 2*pi). The metric itself is periodic, so this is
/// purely a canonical representation for storage and comparison.
inline double canonical_angle(double a) {
    constexpr double two_pi = 6.283185307179586476925286766559;
    double r = std::fmod(a, two_pi);
    if (r < 0.0) r += two_pi;
    return r;
}

}  // namespace iini

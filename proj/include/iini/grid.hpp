#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "iini/scatter.hpp"

namespace iini {

enum class PixelRole : std::uint8_t { Training, Inference };

/// Training-value extrema backing the affine map onto the unit interval.
struct NormParams {
    double v_min_train;
    double v_max_train;
};

/// Dense raster of pixel values plus a per-pixel role mask. Storage is
/// row-major with row 0 as the southernmost row; origin is the lower-left
/// corner of cell (0, 0). Cells that have never been assigned hold NaN
/// (rasterize leaves inference cells unset until initialization).
struct PixelGrid {
    int rows = 0;
    int cols = 0;
    double cell_size = 1.0;
    double origin_x = 0.0;
    double origin_y = 0.0;
    std::vector<double> values;
    std::vector<PixelRole> roles;
    std::optional<NormParams> norm;

    std::size_t idx(int r, int c) const {
        return static_cast<std::size_t>(r) * static_cast<std::size_t>(cols) + c;
    }
    double value(int r, int c) const { return values[idx(r, c)]; }
    double& value(int r, int c) { return values[idx(r, c)]; }
    PixelRole role(int r, int c) const { return roles[idx(r, c)]; }
    bool in_bounds(int r, int c) const {
        return r >= 0 && r < rows && c >= 0 && c < cols;
    }
    std::size_t cell_count() const { return values.size(); }
    std::size_t inference_count() const;
    std::vector<std::size_t> inference_indices() const;  // raster order
    double centroid_x(int c) const { return origin_x + (c + 0.5) * cell_size; }
    double centroid_y(int r) const { return origin_y + (r + 0.5) * cell_size; }
};

/// The discrete candidate values {(n + 1/2) * eps | n = 0, 1, ...} strictly
/// below 1. Cardinality is floor(1/eps - 1/2) + 1, roughly 1/eps.
struct ValueSet {
    double epsilon_p = 0.0;
    std::vector<double> values;

    /// Throws ConfigError unless epsilon_p lies in (0, 1).
    static ValueSet make(double epsilon_p);

    /// Same set stretched by a constant factor (e.g. 2*pi for angular grids).
    ValueSet scaled(double factor) const;
};

/// Connected components of inference pixels under 4-adjacency; training
/// pixels are walls and carry the sentinel label.
struct SegmentMap {
    static constexpr std::int32_t kTrainingLabel = -1;

    std::vector<std::int32_t> labels;  // same shape as the grid
    std::int32_t segment_count = 0;
};

inline constexpr std::size_t kDefaultCellCap = 100'000'000;

/// Bins points into a raster. Cells holding at least one point become
/// Training with the arithmetic mean of their points' values; empty cells
/// become Inference (value NaN). Without an explicit extent the grid covers
/// the points' bounding box, expanded symmetrically so extreme points sit in
/// the outer ring of cells; with one, the extent is the grid footprint and
/// points falling outside it are ignored.
/// Throws GridTooLarge when rows*cols would exceed cell_cap.
PixelGrid rasterize(const ScatterSet& s, double cell_size,
                    std::optional<Extent> extent = std::nullopt,
                    std::size_t cell_cap = kDefaultCellCap);

/// Maps every populated value through (v - v_min_train) / (v_max_train -
/// v_min_train) and records the params. Throws DegenerateRange unless there
/// are two distinct training values.
PixelGrid normalize(const PixelGrid& g);

/// Inverse map back to measurement units. Throws ConfigError when the grid
/// carries no normalization params.
PixelGrid denormalize(const PixelGrid& g);

/// Assigns every inference pixel an independent uniform draw from vs.
/// Training pixels are untouched; the same seed reproduces the same grid.
PixelGrid initialize_inference(const PixelGrid& g, const ValueSet& vs,
                               std::uint64_t seed);

/// Labels connected components of inference pixels (4-adjacency).
SegmentMap segment(const PixelGrid& g);

}  // namespace iini

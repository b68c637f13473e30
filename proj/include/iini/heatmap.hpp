#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "iini/grid.hpp"

namespace iini {

struct HeatmapOptions {
    int scale = 1;           // integer pixel replication factor
    bool mark_training = false;  // overlay training cells as dark outlines
};

/// Maps a grid cell value in [lo, hi] to a perceptually ordered RGB colour
/// (dark violet through teal to bright yellow). NaN maps to mid grey.
void colormap(double value, double lo, double hi, std::uint8_t out[3]);

/// Renders g as a PNG heatmap with north up: grid row 0 is the southern
/// edge and becomes the bottom image row. The colour range spans the finite
/// values present; a grid with no finite values throws EmptyGrid. Throws
/// ConfigError when opts.scale < 1.
void write_heatmap(const PixelGrid& g, const std::string& path,
                   const HeatmapOptions& opts = {});

}  // namespace iini

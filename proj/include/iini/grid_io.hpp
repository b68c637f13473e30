#pragma once

#include <string>

#include "iini/grid.hpp"

namespace iini {

/// Writes g as an ESRI ASCII grid (ncols/nrows/xllcorner/yllcorner/cellsize
/// header, NODATA_value -9999, rows north to south). Values are printed
/// with shortest round-trip formatting so re-reading reproduces every
/// double bit for bit. Alongside the grid a role sidecar `<path>.roles`
/// stores one character per cell, T for training and I for inference, in
/// the same row order. Throws IoFailure on any write error.
void write_esri_grid(const PixelGrid& g, const std::string& path);

/// Reads an ESRI ASCII grid written by write_esri_grid. When the role
/// sidecar is missing every cell is treated as training. NODATA cells come
/// back as NaN inference pixels. Throws IoFailure when the file cannot be
/// opened and ParseError on malformed content.
PixelGrid read_esri_grid(const std::string& path);

}  // namespace iini

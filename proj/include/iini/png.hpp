#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace iini {

/// Minimal PNG writer: 8-bit RGB, zlib-compressed, no interlacing.
/// `rgb` is row-major top to bottom, 3 bytes per pixel, so its size must be
/// exactly width * height * 3. Throws ShapeError on a size mismatch and
/// IoFailure on write or compression errors.
void write_png_rgb(const std::string& path, int width, int height,
                   const std::vector<std::uint8_t>& rgb);

}  // namespace iini

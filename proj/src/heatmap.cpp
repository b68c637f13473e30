#include "iini/heatmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "iini/error.hpp"
#include "iini/png.hpp"

namespace iini {

namespace {

// Anchor colours of a perceptually ordered ramp (dark violet to yellow),
// interpolated linearly between stops.
constexpr std::uint8_t kStops[][3] = {
    {68, 1, 84},    {72, 40, 120},  {62, 74, 137},  {49, 104, 142},
    {38, 130, 142}, {31, 158, 137}, {53, 183, 121}, {109, 205, 89},
    {180, 222, 44}, {253, 231, 37},
};
constexpr int kStopCount = static_cast<int>(sizeof(kStops) / sizeof(kStops[0]));

}  // namespace

void colormap(double value, double lo, double hi, std::uint8_t out[3]) {
    if (!std::isfinite(value)) {
        out[0] = out[1] = out[2] = 128;
        return;
    }
    double t = hi > lo ? (value - lo) / (hi - lo) : 0.5;
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * (kStopCount - 1);
    const int i = std::min(static_cast<int>(pos), kStopCount - 2);
    const double f = pos - i;
    for (int ch = 0; ch < 3; ++ch)
        out[ch] = static_cast<std::uint8_t>(
            std::lround(kStops[i][ch] + f * (kStops[i + 1][ch] -
                                             kStops[i][ch])));
}

void write_heatmap(const PixelGrid& g, const std::string& path,
                   const HeatmapOptions& opts) {
    if (opts.scale < 1)
        throw Error("ConfigError", "heatmap scale must be at least 1");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double v : g.values) {
        if (!std::isfinite(v)) continue;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    if (!(lo <= hi))
        throw Error("EmptyGrid", "grid holds no finite values to render");

    const int w = g.cols * opts.scale;
    const int h = g.rows * opts.scale;
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) *
                                  static_cast<std::size_t>(h) * 3);
    for (int y = 0; y < h; ++y) {
        const int r = g.rows - 1 - y / opts.scale;  // north up
        for (int x = 0; x < w; ++x) {
            const int c = x / opts.scale;
            std::uint8_t px[3];
            colormap(g.value(r, c), lo, hi, px);
            if (opts.mark_training && g.role(r, c) == PixelRole::Training)
                for (auto& ch : px)
                    ch = static_cast<std::uint8_t>(ch * 55 / 100);
            const std::size_t at =
                (static_cast<std::size_t>(y) * static_cast<std::size_t>(w) +
                 static_cast<std::size_t>(x)) *
                3;
            rgb[at] = px[0];
            rgb[at + 1] = px[1];
            rgb[at + 2] = px[2];
        }
    }
    write_png_rgb(path, w, h, rgb);
}

}  // namespace iini

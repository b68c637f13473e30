#include "iini/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "iini/error.hpp"
#include "iini/rng.hpp"

namespace iini {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int column_of(double coord, double origin, double cell, int count) {
    int c = static_cast<int>(std::floor((coord - origin) / cell));
    // Boundary points land exactly on the outer cell edge; fold them in.
    return std::clamp(c, 0, count - 1);
}

}  // namespace

std::size_t PixelGrid::inference_count() const {
    std::size_t n = 0;
    for (PixelRole r : roles)
        if (r == PixelRole::Inference) ++n;
    return n;
}

std::vector<std::size_t> PixelGrid::inference_indices() const {
    std::vector<std::size_t> out;
    out.reserve(roles.size());
    for (std::size_t i = 0; i < roles.size(); ++i)
        if (roles[i] == PixelRole::Inference) out.push_back(i);
    return out;
}

ValueSet ValueSet::make(double epsilon_p) {
    if (!(epsilon_p > 0.0) || !(epsilon_p < 1.0))
        throw Error("ConfigError", "epsilon_p must lie in (0, 1)");
    ValueSet vs;
    vs.epsilon_p = epsilon_p;
    for (std::size_t n = 0;; ++n) {
        const double v = (static_cast<double>(n) + 0.5) * epsilon_p;
        if (!(v < 1.0)) break;
        vs.values.push_back(v);
    }
    return vs;
}

ValueSet ValueSet::scaled(double factor) const {
    ValueSet out;
    out.epsilon_p = epsilon_p * factor;
    out.values.reserve(values.size());
    for (double v : values) out.values.push_back(v * factor);
    return out;
}

PixelGrid rasterize(const ScatterSet& s, double cell_size,
                    std::optional<Extent> extent, std::size_t cell_cap) {
    // A single point is enough to rasterize (into an explicit extent);
    // the two-point minimum only matters for the pixel-size rule.
    if (s.points.empty())
        throw Error("ConfigError", "no points to rasterize");
    for (const Point& p : s.points)
        if (!std::isfinite(p.x) || !std::isfinite(p.y) ||
            !std::isfinite(p.value))
            throw Error("ConfigError", "non-finite point in scatter set");
    if (!(cell_size > 0.0))
        throw Error("ConfigError", "cell_size must be positive");

    PixelGrid g;
    g.cell_size = cell_size;

    if (extent) {
        if (!(extent->width() > 0.0) || !(extent->height() > 0.0))
            throw Error("DegenerateExtent", "explicit extent has zero or "
                                            "negative span");
        // Explicit footprint: the extent is the grid outline, points
        // outside it are dropped.
        g.cols = std::max(
            1, static_cast<int>(std::ceil(extent->width() / cell_size - 1e-9)));
        g.rows = std::max(
            1,
            static_cast<int>(std::ceil(extent->height() / cell_size - 1e-9)));
        g.origin_x = extent->min_x;
        g.origin_y = extent->min_y;
    } else {
        // Bounding-box footprint, expanded symmetrically to a whole number
        // of cells so the extreme points sit inside the outer cell ring.
        const Extent bb = s.bounding_box();
        const int spans_x =
            static_cast<int>(std::floor(bb.width() / cell_size + 1e-9));
        const int spans_y =
            static_cast<int>(std::floor(bb.height() / cell_size + 1e-9));
        g.cols = spans_x + 1;
        g.rows = spans_y + 1;
        g.origin_x = bb.min_x - (g.cols * cell_size - bb.width()) / 2.0;
        g.origin_y = bb.min_y - (g.rows * cell_size - bb.height()) / 2.0;
    }

    const auto total = static_cast<std::uint64_t>(g.rows) *
                       static_cast<std::uint64_t>(g.cols);
    if (total > cell_cap)
        throw Error("GridTooLarge",
                    std::to_string(g.rows) + "x" + std::to_string(g.cols) +
                        " = " + std::to_string(total) + " cells exceeds cap " +
                        std::to_string(cell_cap));

    g.values.assign(total, kNaN);
    g.roles.assign(total, PixelRole::Inference);

    // Bin values per cell, then aggregate each cell's multiset in sorted
    // order: the mean becomes independent of the input point order despite
    // floating-point non-associativity.
    std::unordered_map<std::size_t, std::vector<double>> bins;
    for (const Point& p : s.points) {
        if (extent && (p.x < extent->min_x || p.x > extent->max_x ||
                       p.y < extent->min_y || p.y > extent->max_y))
            continue;
        const int c = column_of(p.x, g.origin_x, cell_size, g.cols);
        const int r = column_of(p.y, g.origin_y, cell_size, g.rows);
        bins[g.idx(r, c)].push_back(p.value);
    }
    for (auto& [cell, vals] : bins) {
        std::sort(vals.begin(), vals.end());
        double sum = 0.0;
        for (double v : vals) sum += v;
        g.values[cell] = sum / static_cast<double>(vals.size());
        g.roles[cell] = PixelRole::Training;
    }
    return g;
}

PixelGrid normalize(const PixelGrid& g) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        if (g.roles[i] != PixelRole::Training) continue;
        lo = std::min(lo, g.values[i]);
        hi = std::max(hi, g.values[i]);
    }
    if (!(hi > lo))
        throw Error("DegenerateRange",
                    "normalization needs two distinct training values");

    PixelGrid out = g;
    const double span = hi - lo;
    for (double& v : out.values)
        if (std::isfinite(v)) v = (v - lo) / span;
    out.norm = NormParams{lo, hi};
    return out;
}

PixelGrid denormalize(const PixelGrid& g) {
    if (!g.norm)
        throw Error("ConfigError",
                    "grid carries no normalization parameters");
    PixelGrid out = g;
    const double lo = g.norm->v_min_train;
    const double span = g.norm->v_max_train - lo;
    for (double& v : out.values)
        if (std::isfinite(v)) v = v * span + lo;
    out.norm.reset();
    return out;
}

PixelGrid initialize_inference(const PixelGrid& g, const ValueSet& vs,
                               std::uint64_t seed) {
    if (vs.values.empty())
        throw Error("ConfigError", "value set is empty");
    PixelGrid out = g;
    CounterRng rng(seed);
    for (std::size_t i = 0; i < out.cell_count(); ++i)
        if (out.roles[i] == PixelRole::Inference)
            out.values[i] = vs.values[rng.next_index(vs.values.size())];
    return out;
}

SegmentMap segment(const PixelGrid& g) {
    SegmentMap map;
    map.labels.assign(g.cell_count(), SegmentMap::kTrainingLabel);

    std::vector<std::size_t> stack;
    std::int32_t next = 0;
    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            const std::size_t start = g.idx(r, c);
            if (g.roles[start] != PixelRole::Inference ||
                map.labels[start] != SegmentMap::kTrainingLabel)
                continue;
            map.labels[start] = next;
            stack.push_back(start);
            while (!stack.empty()) {
                const std::size_t at = stack.back();
                stack.pop_back();
                const int ar =
                    static_cast<int>(at / static_cast<std::size_t>(g.cols));
                const int ac =
                    static_cast<int>(at % static_cast<std::size_t>(g.cols));
                constexpr int dr[4] = {-1, 1, 0, 0};
                constexpr int dc[4] = {0, 0, -1, 1};
                for (int k = 0; k < 4; ++k) {
                    const int nr = ar + dr[k];
                    const int nc = ac + dc[k];
                    if (!g.in_bounds(nr, nc)) continue;
                    const std::size_t ni = g.idx(nr, nc);
                    if (g.roles[ni] != PixelRole::Inference ||
                        map.labels[ni] != SegmentMap::kTrainingLabel)
                        continue;
                    map.labels[ni] = next;
                    stack.push_back(ni);
                }
            }
            ++next;
        }
    }
    map.segment_count = next;
    return map;
}

}  // namespace iini

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace iini {

struct Point {
    double x;
    double y;
    double value;
};

enum class Regularity { Regular, Irregular };

struct Extent {
    double min_x = 0.0;
    double min_y = 0.0;
    double max_x = 0.0;
    double max_y = 0.0;

    double width() const { return max_x - min_x; }
    double height() const { return max_y - min_y; }
    double area() const { return width() * height(); }
};

/// Raw scattered measurements plus the survey hints consumed by the
/// pixel-size rule. area_hint overrides the bounding-box area when the
/// surveyed region is larger than the point hull.
struct ScatterSet {
    std::vector<Point> points;
    std::optional<double> area_hint;
    Regularity regularity = Regularity::Irregular;

    Extent bounding_box() const;
    double area() const;    // area_hint if present, else bounding-box area
    void validate() const;  // >= 2 points, all coordinates and values finite
};

/// Pixel-size rule p = c * sqrt(A / N): c = 0.5 for regular point
/// distributions, 0.25 for irregular ones.
/// Throws DegenerateExtent when the area is zero or negative.
double recommend_pixel_size(const ScatterSet& s);

/// Reads scattered data from CSV with header row "x,y,value".
ScatterSet read_scatter_csv(const std::string& path);

void write_scatter_csv(const std::string& path, const std::vector<Point>& points);

}  // namespace iini

#include "iini/scatter.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <string>

#include "iini/error.hpp"
#include "text_util.hpp"

namespace iini {

Extent ScatterSet::bounding_box() const {
    Extent e{std::numeric_limits<double>::infinity(),
             std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity(),
             -std::numeric_limits<double>::infinity()};
    for (const Point& p : points) {
        e.min_x = std::min(e.min_x, p.x);
        e.min_y = std::min(e.min_y, p.y);
        e.max_x = std::max(e.max_x, p.x);
        e.max_y = std::max(e.max_y, p.y);
    }
    return e;
}

double ScatterSet::area() const {
    if (area_hint) return *area_hint;
    return bounding_box().area();
}

void ScatterSet::validate() const {
    if (points.size() < 2)
        throw Error("ConfigError", "scatter set needs at least 2 points, got " +
                                       std::to_string(points.size()));
    for (std::size_t i = 0; i < points.size(); ++i) {
        const Point& p = points[i];
        if (!std::isfinite(p.x) || !std::isfinite(p.y) ||
            !std::isfinite(p.value))
            throw Error("ConfigError", "non-finite point at row " +
                                           std::to_string(i + 1));
    }
    if (area_hint && !(*area_hint > 0.0))
        throw Error("ConfigError", "area_hint must be positive");
}

double recommend_pixel_size(const ScatterSet& s) {
    s.validate();
    const double a = s.area();
    if (!(a > 0.0))
        throw Error("DegenerateExtent",
                    "survey area is zero or negative; supply area_hint or "
                    "non-collinear points");
    const double c = s.regularity == Regularity::Regular ? 0.5 : 0.25;
    return c * std::sqrt(a / static_cast<double>(s.points.size()));
}

ScatterSet read_scatter_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error("IoFailure", "cannot open scatter file '" + path + "'");

    ScatterSet s;
    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        auto t = detail::trim(line);
        if (t.empty()) continue;
        if (!saw_header) {
            auto cols = detail::split(t, ',');
            if (cols.size() != 3 ||
                detail::to_lower(detail::trim(cols[0])) != "x" ||
                detail::to_lower(detail::trim(cols[1])) != "y" ||
                detail::to_lower(detail::trim(cols[2])) != "value")
                throw Error("ParseError",
                            path + ":" + std::to_string(line_no) +
                                ": expected header 'x,y,value'");
            saw_header = true;
            continue;
        }
        auto cols = detail::split(t, ',');
        if (cols.size() != 3)
            throw Error("ParseError", path + ":" + std::to_string(line_no) +
                                          ": expected 3 comma-separated "
                                          "fields");
        Point p;
        if (!detail::parse_double(cols[0], p.x) ||
            !detail::parse_double(cols[1], p.y) ||
            !detail::parse_double(cols[2], p.value))
            throw Error("ParseError", path + ":" + std::to_string(line_no) +
                                          ": malformed number");
        s.points.push_back(p);
    }
    if (!saw_header)
        throw Error("ParseError", path + ": empty file, expected header "
                                         "'x,y,value'");
    return s;
}

void write_scatter_csv(const std::string& path,
                       const std::vector<Point>& points) {
    std::ofstream out(path);
    if (!out)
        throw Error("IoFailure", "cannot open '" + path + "' for writing");
    out << "x,y,value\n";
    for (const Point& p : points)
        out << detail::format_double(p.x) << ',' << detail::format_double(p.y)
            << ',' << detail::format_double(p.value) << '\n';
    if (!out)
        throw Error("IoFailure", "write failed for '" + path + "'");
}

}  // namespace iini

#include "iini/grid_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "iini/error.hpp"
#include "text_util.hpp"

namespace iini {

namespace {

constexpr double kNoData = -9999.0;

}  // namespace

void write_esri_grid(const PixelGrid& g, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw Error("IoFailure", "cannot open '" + path + "' for writing");

    out << "ncols " << g.cols << '\n';
    out << "nrows " << g.rows << '\n';
    out << "xllcorner " << detail::format_double(g.origin_x) << '\n';
    out << "yllcorner " << detail::format_double(g.origin_y) << '\n';
    out << "cellsize " << detail::format_double(g.cell_size) << '\n';
    out << "NODATA_value -9999\n";
    for (int r = g.rows - 1; r >= 0; --r) {
        for (int c = 0; c < g.cols; ++c) {
            if (c > 0) out << ' ';
            const double v = g.value(r, c);
            out << (std::isfinite(v) ? detail::format_double(v) : "-9999");
        }
        out << '\n';
    }
    if (!out) throw Error("IoFailure", "write failed for '" + path + "'");
    out.close();

    const std::string roles_path = path + ".roles";
    std::ofstream roles(roles_path);
    if (!roles)
        throw Error("IoFailure",
                    "cannot open '" + roles_path + "' for writing");
    for (int r = g.rows - 1; r >= 0; --r) {
        for (int c = 0; c < g.cols; ++c)
            roles << (g.role(r, c) == PixelRole::Training ? 'T' : 'I');
        roles << '\n';
    }
    if (!roles)
        throw Error("IoFailure", "write failed for '" + roles_path + "'");
}

PixelGrid read_esri_grid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("IoFailure", "cannot open grid file '" + path + "'");

    PixelGrid g;
    double nodata = kNoData;
    bool have_nodata_key = false;
    long long ncols = -1;
    long long nrows = -1;

    // Header: key value lines until the first purely numeric row.
    std::string key;
    while (true) {
        const auto pos = in.tellg();
        if (!(in >> key)) throw Error("ParseError", path + ": empty grid");
        double probe;
        if (detail::parse_double(key, probe)) {
            in.seekg(pos);
            break;
        }
        const std::string lk = detail::to_lower(key);
        double v;
        if (!(in >> v))
            throw Error("ParseError",
                        path + ": header key '" + key + "' has no value");
        if (lk == "ncols")
            ncols = static_cast<long long>(v);
        else if (lk == "nrows")
            nrows = static_cast<long long>(v);
        else if (lk == "xllcorner")
            g.origin_x = v;
        else if (lk == "yllcorner")
            g.origin_y = v;
        else if (lk == "cellsize")
            g.cell_size = v;
        else if (lk == "nodata_value") {
            nodata = v;
            have_nodata_key = true;
        } else {
            throw Error("ParseError",
                        path + ": unknown header key '" + key + "'");
        }
    }
    if (ncols < 1 || nrows < 1)
        throw Error("ParseError", path + ": missing or invalid ncols/nrows");
    if (!(g.cell_size > 0.0))
        throw Error("ParseError", path + ": missing or invalid cellsize");
    (void)have_nodata_key;

    g.cols = static_cast<int>(ncols);
    g.rows = static_cast<int>(nrows);
    const auto cells =
        static_cast<std::size_t>(ncols) * static_cast<std::size_t>(nrows);
    g.values.assign(cells, std::numeric_limits<double>::quiet_NaN());
    g.roles.assign(cells, PixelRole::Training);

    for (long long nr = 0; nr < nrows; ++nr) {
        const int r = g.rows - 1 - static_cast<int>(nr);
        for (long long c = 0; c < ncols; ++c) {
            double v;
            if (!(in >> v))
                throw Error("ParseError",
                            path + ": grid body ended early at row " +
                                std::to_string(nr) + ", col " +
                                std::to_string(c));
            if (v == nodata) {
                g.roles[g.idx(r, static_cast<int>(c))] = PixelRole::Inference;
            } else {
                g.values[g.idx(r, static_cast<int>(c))] = v;
            }
        }
    }

    const std::string roles_path = path + ".roles";
    std::ifstream roles(roles_path);
    if (roles) {
        std::string line;
        long long nr = 0;
        while (std::getline(roles, line)) {
            const auto t = detail::trim(line);
            if (t.empty()) continue;
            if (nr >= nrows)
                throw Error("ParseError",
                            roles_path + ": more rows than the grid");
            if (static_cast<long long>(t.size()) != ncols)
                throw Error("ParseError",
                            roles_path + ": row " + std::to_string(nr) +
                                " has " + std::to_string(t.size()) +
                                " cells, expected " + std::to_string(ncols));
            const int r = g.rows - 1 - static_cast<int>(nr);
            for (long long c = 0; c < ncols; ++c) {
                const char ch = t[static_cast<std::size_t>(c)];
                if (ch == 'T')
                    g.roles[g.idx(r, static_cast<int>(c))] =
                        PixelRole::Training;
                else if (ch == 'I')
                    g.roles[g.idx(r, static_cast<int>(c))] =
                        PixelRole::Inference;
                else
                    throw Error("ParseError",
                                roles_path + ": unexpected role character '" +
                                    std::string(1, ch) + "'");
            }
            ++nr;
        }
        if (nr != nrows)
            throw Error("ParseError", roles_path + ": fewer rows than the "
                                                   "grid");
    }
    return g;
}

}  // namespace iini

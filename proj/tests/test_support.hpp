#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "iini/error.hpp"
#include "iini/grid.hpp"
#include "iini/metric.hpp"

namespace iini::test {

/// Builds a grid from row-major values (row 0 = southernmost row) and a
/// role string of 'T'/'I' characters in the same order. Any other
/// character in the role string is ignored so fixtures can be laid out
/// with spaces and newlines.
inline PixelGrid make_grid(int rows, int cols, std::vector<double> values,
                           const std::string& roles,
                           double cell_size = 1.0) {
    PixelGrid g;
    g.rows = rows;
    g.cols = cols;
    g.cell_size = cell_size;
    g.values = std::move(values);
    for (char ch : roles) {
        if (ch == 'T')
            g.roles.push_back(PixelRole::Training);
        else if (ch == 'I')
            g.roles.push_back(PixelRole::Inference);
    }
    return g;
}

/// Runs fn and returns the name of the Error it throws, "" when it
/// returns normally.
inline std::string error_name(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.name();
    }
    return {};
}

struct Nb {
    double value;
    PixelRole role = PixelRole::Inference;
    double bias = 1.0;
};

inline NeighbourView view_of(double center, std::initializer_list<Nb> nbs) {
    NeighbourView nv;
    nv.center = center;
    for (const auto& n : nbs) nv.add(n.value, n.role, n.bias);
    return nv;
}

inline bool same_values(const PixelGrid& a, const PixelGrid& b) {
    if (a.values.size() != b.values.size()) return false;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        const bool na = std::isnan(a.values[i]);
        const bool nb = std::isnan(b.values[i]);
        if (na != nb) return false;
        if (!na && a.values[i] != b.values[i]) return false;
    }
    return true;
}

inline double max_inference_delta(const PixelGrid& a, const PixelGrid& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        if (a.roles[i] != PixelRole::Inference) continue;
        worst = std::max(worst, std::fabs(a.values[i] - b.values[i]));
    }
    return worst;
}

}  // namespace iini::test

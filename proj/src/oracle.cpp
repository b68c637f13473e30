#include "iini/oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <limits>
#include <string>

#include "iini/error.hpp"

namespace iini {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr int kDr[4] = {-1, 1, 0, 0};
constexpr int kDc[4] = {0, 0, -1, 1};

}  // namespace

PixelGrid solve_harmonic(const PixelGrid& g, const MetricSpec& m) {
    m.validate();
    if (m.kind != MetricKind::SquareDifference)
        throw Error("ConfigError", "the harmonic oracle is defined for the "
                                   "square-difference metric only");

    std::vector<std::int64_t> unknown(g.cell_count(), -1);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < g.cell_count(); ++i) {
        if (g.roles[i] != PixelRole::Inference) continue;
        unknown[i] = static_cast<std::int64_t>(order.size());
        order.push_back(i);
    }
    if (order.empty()) return g;

    // A segment with no training neighbour anywhere has a singular block:
    // its equations fix only differences, not the level.
    const SegmentMap segs = segment(g);
    std::vector<char> constrained(
        static_cast<std::size_t>(segs.segment_count), 0);
    for (std::size_t i : order) {
        const int r = static_cast<int>(i / static_cast<std::size_t>(g.cols));
        const int c = static_cast<int>(i % static_cast<std::size_t>(g.cols));
        for (int k = 0; k < 4; ++k) {
            const int nr = r + kDr[k];
            const int nc = c + kDc[k];
            if (g.in_bounds(nr, nc) && g.role(nr, nc) == PixelRole::Training)
                constrained[static_cast<std::size_t>(segs.labels[i])] = 1;
        }
    }
    for (std::size_t k = 0; k < constrained.size(); ++k)
        if (!constrained[k])
            throw Error("UnconstrainedSegment",
                        "inference segment " + std::to_string(k) +
                            " touches no training pixel");

    const auto n = static_cast<Eigen::Index>(order.size());
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(order.size() * 5);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (std::size_t u = 0; u < order.size(); ++u) {
        const std::size_t at = order[u];
        const int r = static_cast<int>(at / static_cast<std::size_t>(g.cols));
        const int c = static_cast<int>(at % static_cast<std::size_t>(g.cols));
        double diag = 0.0;
        for (int k = 0; k < 4; ++k) {
            const int nr = r + kDr[k];
            const int nc = c + kDc[k];
            if (!g.in_bounds(nr, nc)) continue;
            const PixelRole role = g.role(nr, nc);
            const double b = m.bias_for(role);
            diag += b;
            if (role == PixelRole::Training) {
                rhs[static_cast<Eigen::Index>(u)] += b * g.value(nr, nc);
            } else {
                trips.emplace_back(
                    static_cast<int>(u),
                    static_cast<int>(unknown[g.idx(nr, nc)]), -b);
            }
        }
        if (diag == 0.0)
            throw Error("IsolatedPixel",
                        "inference pixel " + std::to_string(at) +
                            " has no neighbours");
        trips.emplace_back(static_cast<int>(u), static_cast<int>(u), diag);
    }

    Eigen::SparseMatrix<double> a(n, n);
    a.setFromTriplets(trips.begin(), trips.end());
    a.makeCompressed();

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(a);
    if (solver.info() != Eigen::Success)
        throw Error("SolverFailure", "sparse factorization failed");
    const Eigen::VectorXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
        throw Error("SolverFailure", "sparse back-substitution failed");

    const double residual = (a * x - rhs).norm();
    if (residual > 1e-10 * std::max(1.0, rhs.norm()))
        throw Error("SolverFailure",
                    "solution residual " + std::to_string(residual) +
                        " exceeds tolerance");

    PixelGrid out = g;
    for (std::size_t u = 0; u < order.size(); ++u)
        out.values[order[u]] = x[static_cast<Eigen::Index>(u)];
    return out;
}

double total_energy(const PixelGrid& g, const MetricSpec& m) {
    double sum = 0.0;
    for (int r = 0; r < g.rows; ++r)
        for (int c = 0; c < g.cols; ++c)
            if (g.role(r, c) == PixelRole::Inference)
                sum += dissimilarity(gather_neighbours(g, r, c, m), m.kind);
    return sum;
}

BruteForceResult brute_force_discrete(const PixelGrid& g, const MetricSpec& m,
                                      const ValueSet& vs,
                                      const BruteForceLimits& limits) {
    m.validate();
    if (vs.values.empty())
        throw Error("ConfigError", "value set is empty");

    const std::vector<std::size_t> infer = g.inference_indices();
    const std::size_t k = infer.size();

    BruteForceResult res;
    res.grid = g;
    if (k == 0) {
        res.energy = 0.0;
        res.states_examined = 1;
        return res;
    }
    if (k > limits.max_inference_pixels)
        throw Error("TooLarge", std::to_string(k) +
                                    " inference pixels exceed the "
                                    "brute-force cap of " +
                                    std::to_string(
                                        limits.max_inference_pixels));
    {
        unsigned __int128 states = 1;
        for (std::size_t i = 0; i < k; ++i) {
            states *= vs.values.size();
            if (states > limits.max_states)
                throw Error("TooLarge",
                            "search space exceeds " +
                                std::to_string(limits.max_states) +
                                " states");
        }
    }

    std::vector<double> cands = vs.values;
    if (m.kind == MetricKind::Cosine)
        for (double& v : cands) v *= kTwoPi;

    std::vector<std::int64_t> depth_of(g.cell_count(), -1);
    for (std::size_t d = 0; d < k; ++d)
        depth_of[infer[d]] = static_cast<std::int64_t>(d);

    // Energy decomposes into ordered viewer->neighbour terms, each weighted
    // by bias / viewer denominator. A term becomes computable once both of
    // its pixels are assigned, i.e. at the deeper pixel's depth.
    struct Term {
        double coeff;
        bool is_const;
        double cval;
        std::size_t var;
    };
    std::vector<std::vector<Term>> terms(k);
    std::vector<double> den(k, 0.0);
    for (std::size_t d = 0; d < k; ++d) {
        const std::size_t at = infer[d];
        const int r = static_cast<int>(at / static_cast<std::size_t>(g.cols));
        const int c = static_cast<int>(at % static_cast<std::size_t>(g.cols));
        for (int t = 0; t < 4; ++t) {
            const int nr = r + kDr[t];
            const int nc = c + kDc[t];
            if (g.in_bounds(nr, nc)) den[d] += m.bias_for(g.role(nr, nc));
        }
        if (den[d] == 0.0)
            throw Error("IsolatedPixel",
                        "inference pixel " + std::to_string(at) +
                            " has no neighbours");
    }
    for (std::size_t d = 0; d < k; ++d) {
        const std::size_t at = infer[d];
        const int r = static_cast<int>(at / static_cast<std::size_t>(g.cols));
        const int c = static_cast<int>(at % static_cast<std::size_t>(g.cols));
        for (int t = 0; t < 4; ++t) {
            const int nr = r + kDr[t];
            const int nc = c + kDc[t];
            if (!g.in_bounds(nr, nc)) continue;
            const PixelRole role = g.role(nr, nc);
            if (role == PixelRole::Training) {
                terms[d].push_back({m.bias_for(role) / den[d], true,
                                    g.value(nr, nc), 0});
            } else {
                const auto e = depth_of[g.idx(nr, nc)];
                if (e < static_cast<std::int64_t>(d)) {
                    // Both viewpoints of the pair share |diff|; fold them.
                    const double coeff =
                        m.bias_for(role) / den[d] +
                        m.bias_for(role) / den[static_cast<std::size_t>(e)];
                    terms[d].push_back(
                        {coeff, false, 0.0, static_cast<std::size_t>(e)});
                }
            }
        }
    }

    // Minimum possible contribution of everything at depth >= d: 0 for the
    // square difference, -sum of coefficients for the cosine.
    std::vector<double> suffix(k + 1, 0.0);
    if (m.kind == MetricKind::Cosine)
        for (std::size_t d = k; d-- > 0;) {
            double s = 0.0;
            for (const Term& t : terms[d]) s -= t.coeff;
            suffix[d] = suffix[d + 1] + s;
        }

    const bool sq = m.kind == MetricKind::SquareDifference;
    std::vector<double> assign(k, 0.0);
    std::vector<double> partial(k + 1, 0.0);
    std::vector<std::size_t> choice(k, 0);
    std::vector<double> best_assign;
    double best = std::numeric_limits<double>::infinity();
    std::uint64_t examined = 0;

    // Depth-first in ascending candidate order with strict improvement:
    // the first optimum found is the lexicographically smallest, so later
    // assignments within the 1e-12 tie band never displace it.
    std::size_t d = 0;
    while (true) {
        if (choice[d] == cands.size()) {
            if (d == 0) break;
            --d;
            ++choice[d];
            continue;
        }
        const double x = cands[choice[d]];
        ++examined;
        double contrib = 0.0;
        for (const Term& t : terms[d]) {
            const double diff = x - (t.is_const ? t.cval : assign[t.var]);
            contrib += sq ? t.coeff * diff * diff
                          : t.coeff * -std::cos(diff);
        }
        const double total = partial[d] + contrib;
        if (total + suffix[d + 1] >= best - 1e-12) {
            ++choice[d];
            continue;
        }
        assign[d] = x;
        if (d + 1 == k) {
            best = total;
            best_assign = assign;
            ++choice[d];
        } else {
            partial[d + 1] = total;
            ++d;
            choice[d] = 0;
        }
    }

    for (std::size_t i = 0; i < k; ++i)
        res.grid.values[infer[i]] = best_assign[i];
    res.energy = total_energy(res.grid, m);
    res.states_examined = examined;
    return res;
}

double idw_predict(const std::vector<Point>& points, double x, double y,
                   double power) {
    if (points.empty())
        throw Error("ConfigError", "IDW needs at least one point");
    if (!(power > 0.0))
        throw Error("ConfigError", "IDW power must be positive");
    double num = 0.0;
    double den = 0.0;
    for (const Point& p : points) {
        const double dx = x - p.x;
        const double dy = y - p.y;
        const double d2 = dx * dx + dy * dy;
        if (d2 == 0.0) return p.value;
        const double w = std::pow(d2, -power / 2.0);
        num += w * p.value;
        den += w;
    }
    return num / den;
}

PixelGrid idw_baseline(const ScatterSet& s, const PixelGrid& g,
                       double power) {
    PixelGrid out = g;
    for (int r = 0; r < out.rows; ++r)
        for (int c = 0; c < out.cols; ++c)
            if (out.role(r, c) == PixelRole::Inference)
                out.value(r, c) = idw_predict(s.points, out.centroid_x(c),
                                              out.centroid_y(r), power);
    return out;
}

HoldoutStats holdout_rmse(const PixelGrid& predicted,
                          const std::vector<Point>& withheld) {
    HoldoutStats stats;
    double sum = 0.0;
    for (const Point& p : withheld) {
        int c = static_cast<int>(
            std::floor((p.x - predicted.origin_x) / predicted.cell_size));
        int r = static_cast<int>(
            std::floor((p.y - predicted.origin_y) / predicted.cell_size));
        // Points exactly on the far edge still belong to the grid.
        if (c == predicted.cols &&
            p.x <= predicted.origin_x +
                       predicted.cols * predicted.cell_size)
            c = predicted.cols - 1;
        if (r == predicted.rows &&
            p.y <= predicted.origin_y +
                       predicted.rows * predicted.cell_size)
            r = predicted.rows - 1;
        if (!predicted.in_bounds(r, c) ||
            !std::isfinite(predicted.value(r, c))) {
            ++stats.skipped;
            continue;
        }
        const double e = predicted.value(r, c) - p.value;
        sum += e * e;
        ++stats.n_points;
    }
    if (stats.n_points == 0)
        throw Error("EmptyHoldout", "no holdout point lands on the grid");
    stats.rmse = std::sqrt(sum / static_cast<double>(stats.n_points));
    return stats;
}

double rmse(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.empty() || a.size() != b.size())
        throw Error("ShapeError",
                    "rmse needs equally sized non-empty vectors, got " +
                        std::to_string(a.size()) + " and " +
                        std::to_string(b.size()));
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum / static_cast<double>(a.size()));
}

}  // namespace iini

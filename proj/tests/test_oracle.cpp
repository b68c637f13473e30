#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "iini/oracle.hpp"
#include "iini/relax.hpp"
#include "iini/rng.hpp"
#include "test_support.hpp"

using namespace iini;
using test::error_name;
using test::make_grid;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

PixelGrid random_training_grid(int rows, int cols, double coverage,
                               std::uint64_t seed) {
    CounterRng rng(seed);
    PixelGrid g;
    g.rows = rows;
    g.cols = cols;
    for (int i = 0; i < rows * cols; ++i) {
        const bool training = rng.next_double() < coverage;
        g.roles.push_back(training ? PixelRole::Training
                                   : PixelRole::Inference);
        g.values.push_back(training ? rng.next_double() : 0.5);
    }
    return g;
}

}  // namespace

TEST_CASE("harmonic solver fills chains with linear ramps") {
    PixelGrid g1 = make_grid(1, 3, {0.0, 0.9, 1.0}, "TIT");
    const PixelGrid s1 = solve_harmonic(g1, MetricSpec{});
    CHECK(s1.value(0, 1) == doctest::Approx(0.5).epsilon(1e-12));

    PixelGrid g2 = make_grid(1, 4, {0.0, 0.1, 0.9, 1.0}, "TIIT");
    const PixelGrid s2 = solve_harmonic(g2, MetricSpec{});
    CHECK(s2.value(0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-12));
    CHECK(s2.value(0, 2) == doctest::Approx(2.0 / 3).epsilon(1e-12));
}

TEST_CASE("harmonic solver satisfies the mean-value property") {
    PixelGrid g = random_training_grid(15, 17, 0.3, 321);
    const MetricSpec m;
    const PixelGrid sol = solve_harmonic(g, m);

    double lo = 1e300;
    double hi = -1e300;
    for (std::size_t i = 0; i < g.values.size(); ++i)
        if (g.roles[i] == PixelRole::Training) {
            lo = std::min(lo, g.values[i]);
            hi = std::max(hi, g.values[i]);
        }

    for (int r = 0; r < g.rows; ++r) {
        for (int c = 0; c < g.cols; ++c) {
            if (sol.role(r, c) != PixelRole::Inference) continue;
            const NeighbourView nv = gather_neighbours(sol, r, c, m);
            CHECK(std::fabs(sol.value(r, c) - optimal_value_sq(nv)) < 1e-9);
            CHECK(sol.value(r, c) >= lo - 1e-12);
            CHECK(sol.value(r, c) <= hi + 1e-12);
        }
    }

    // Training pixels pass through untouched.
    for (std::size_t i = 0; i < g.values.size(); ++i)
        if (g.roles[i] == PixelRole::Training)
            CHECK(sol.values[i] == g.values[i]);
}

TEST_CASE("harmonic solver honours bias weights") {
    // 3x3 boundary-training grid: the center equation has one unknown, so
    // its solution is the bias-weighted mean of the 4 edge neighbours.
    PixelGrid g = make_grid(3, 3,
                            {0.1, 0.9, 0.2,
                             0.3, 0.0, 0.7,
                             0.2, 0.1, 0.4},
                            "TTT"
                            "TIT"
                            "TTT");
    const PixelGrid plain = solve_harmonic(g, MetricSpec{});
    CHECK(plain.value(1, 1) ==
          doctest::Approx((0.1 + 0.9 + 0.3 + 0.7) / 4).epsilon(1e-12));

    MetricSpec boosted;
    boosted.bias_policy = BiasPolicy::TrainingBoost;
    boosted.beta = 3.0;
    const PixelGrid heavy = solve_harmonic(g, boosted);
    // All four neighbours are training here, so the boost cancels.
    CHECK(heavy.value(1, 1) ==
          doctest::Approx(plain.value(1, 1)).epsilon(1e-12));

    // On a grid with mixed neighbour roles the two independent optimizers
    // (direct solve vs relaxation) must land on the same biased optimum.
    PixelGrid mixed = random_training_grid(12, 12, 0.35, 77);
    RelaxConfig cfg;
    cfg.tolerance = 1e-12;
    const PixelGrid direct = solve_harmonic(mixed, boosted);
    const RelaxOutcome swept = relax(mixed, boosted, cfg);
    CHECK(test::max_inference_delta(direct, swept.grid) < 1e-7);
}

TEST_CASE("harmonic solver rejects unusable inputs") {
    PixelGrid island = make_grid(2, 2, {0.5, 0.5, 0.5, 0.5}, "IIII");
    CHECK(error_name([&] { solve_harmonic(island, MetricSpec{}); }) ==
          "UnconstrainedSegment");

    PixelGrid g = make_grid(1, 3, {0.0, 0.5, 1.0}, "TIT");
    MetricSpec angular;
    angular.kind = MetricKind::Cosine;
    CHECK(error_name([&] { solve_harmonic(g, angular); }) == "ConfigError");
}

TEST_CASE("total energy sums per-pixel dissimilarities") {
    PixelGrid g = make_grid(1, 3, {0.0, 0.5, 1.0}, "TIT");
    // The middle pixel sees (0.5-0)^2 and (0.5-1)^2 averaged: 0.25.
    CHECK(total_energy(g, MetricSpec{}) ==
          doctest::Approx(0.25).epsilon(1e-15));
    PixelGrid none = make_grid(1, 2, {0.0, 1.0}, "TT");
    CHECK(total_energy(none, MetricSpec{}) == 0.0);
}

TEST_CASE("brute force finds the discrete optimum") {
    SUBCASE("single pixel amid 0.5 training: ties break low") {
        PixelGrid g = make_grid(3, 3, std::vector<double>(9, 0.5),
                                "TTT"
                                "TIT"
                                "TTT");
        const BruteForceResult res =
            brute_force_discrete(g, MetricSpec{}, ValueSet::make(1.0 / 50));
        CHECK(std::fabs(res.grid.value(1, 1) - 0.49) < 1e-12);
    }

    SUBCASE("single pixel matching one candidate exactly") {
        PixelGrid g = make_grid(1, 2, {0.125, 0.5}, "TI");
        const BruteForceResult res =
            brute_force_discrete(g, MetricSpec{}, ValueSet::make(0.25));
        CHECK(res.grid.value(0, 1) == 0.125);
        CHECK(res.energy == doctest::Approx(0.0).epsilon(1e-15));
    }

    SUBCASE("zero inference pixels returns the input") {
        PixelGrid g = make_grid(1, 2, {0.2, 0.8}, "TT");
        const BruteForceResult res =
            brute_force_discrete(g, MetricSpec{}, ValueSet::make(0.25));
        CHECK(test::same_values(res.grid, g));
        CHECK(res.energy == 0.0);
    }

    SUBCASE("search space caps") {
        PixelGrid wide = make_grid(4, 4, std::vector<double>(16, 0.5),
                                   "TTT" + std::string(13, 'I'));
        CHECK(error_name([&] {
                  brute_force_discrete(wide, MetricSpec{},
                                       ValueSet::make(0.25));
              }) == "TooLarge");

        PixelGrid eight = make_grid(3, 4,
                                    std::vector<double>(12, 0.5),
                                    "TTTT"
                                    "IIII"
                                    "IIII");
        CHECK(error_name([&] {
                  brute_force_discrete(eight, MetricSpec{},
                                       ValueSet::make(1.0 / 50));
              }) == "TooLarge");
    }

    SUBCASE("beats random assignments") {
        PixelGrid g = random_training_grid(3, 4, 0.5, 63);
        const ValueSet vs = ValueSet::make(0.25);
        const MetricSpec m;
        const BruteForceResult res = brute_force_discrete(g, m, vs);
        CHECK(res.energy ==
              doctest::Approx(total_energy(res.grid, m)).epsilon(1e-12));

        CounterRng rng(15);
        PixelGrid probe = g;
        const auto infer = g.inference_indices();
        for (int trial = 0; trial < 200; ++trial) {
            for (std::size_t i : infer)
                probe.values[i] = vs.values[rng.next_index(vs.values.size())];
            CHECK(total_energy(probe, m) >= res.energy - 1e-12);
        }
    }

    SUBCASE("agrees with the snapped harmonic answer on one unknown") {
        CounterRng rng(8);
        for (int trial = 0; trial < 20; ++trial) {
            PixelGrid g = make_grid(3, 3,
                                    {rng.next_double(), rng.next_double(),
                                     rng.next_double(), rng.next_double(),
                                     0.5, rng.next_double(),
                                     rng.next_double(), rng.next_double(),
                                     rng.next_double()},
                                    "TTT"
                                    "TIT"
                                    "TTT");
            const ValueSet vs = ValueSet::make(0.1);
            const double exact =
                solve_harmonic(g, MetricSpec{}).value(1, 1);
            const BruteForceResult res =
                brute_force_discrete(g, MetricSpec{}, vs);
            // The discrete optimum is a nearest set member to the
            // continuous one (either of the two adjacent members).
            const double got = res.grid.value(1, 1);
            double best_gap = 1e300;
            for (double v : vs.values)
                best_gap = std::min(best_gap, std::fabs(v - exact));
            CHECK(std::fabs(got - exact) <= best_gap + 1e-9);
        }
    }

    SUBCASE("angular grids scale the candidate set to the circle") {
        PixelGrid g = make_grid(1, 2, {1.3, 0.0}, "TI");
        MetricSpec m;
        m.kind = MetricKind::Cosine;
        const ValueSet vs = ValueSet::make(1.0 / 8);
        const BruteForceResult res = brute_force_discrete(g, m, vs);
        // Candidates are (n+1/2)/8 * 2*pi; the closest to 1.3 rad wins.
        double best = 0.0;
        double best_cost = 1e300;
        for (double v : vs.values) {
            const double cand = v * kTwoPi;
            const double cost = -std::cos(cand - 1.3);
            if (cost < best_cost) {
                best_cost = cost;
                best = cand;
            }
        }
        CHECK(res.grid.value(0, 1) == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("inverse distance weighting baseline") {
    SUBCASE("point predictions") {
        const std::vector<Point> two = {{0.0, 0.0, 0.0}, {3.0, 0.0, 1.0}};
        // Equidistant: symmetric mean.
        CHECK(idw_predict(two, 1.5, 0.0) ==
              doctest::Approx(0.5).epsilon(1e-12));
        // Distances 1 and 2 at power 2: (0*1 + 1*0.25)/1.25.
        const std::vector<Point> pair = {{0.0, 0.0, 0.0}, {3.0, 0.0, 1.0}};
        CHECK(idw_predict(pair, 1.0, 0.0, 2.0) ==
              doctest::Approx(0.2).epsilon(1e-12));
        // Coincident point short-circuits to the sample value.
        CHECK(idw_predict(two, 3.0, 0.0) == 1.0);

        CHECK(error_name([&] { idw_predict({}, 0.0, 0.0); }) ==
              "ConfigError");
        CHECK(error_name([&] { idw_predict(two, 0.0, 0.0, 0.0); }) ==
              "ConfigError");
    }

    SUBCASE("single scatter point paints a constant surface") {
        ScatterSet s;
        s.points = {{1.0, 1.0, 7.5}};
        PixelGrid g = make_grid(2, 2, {7.5, std::nan(""), std::nan(""),
                                       std::nan("")},
                                "TIII");
        const PixelGrid out = idw_baseline(s, g);
        for (double v : out.values) CHECK(v == 7.5);
    }

    SUBCASE("training cells are preserved") {
        ScatterSet s;
        s.points = {{0.5, 0.5, 2.0}, {1.5, 1.5, 4.0}};
        PixelGrid g = make_grid(2, 2,
                                {2.0, std::nan(""), std::nan(""), 4.0},
                                "TIIT");
        const PixelGrid out = idw_baseline(s, g);
        CHECK(out.value(0, 0) == 2.0);
        CHECK(out.value(1, 1) == 4.0);
        CHECK(std::isfinite(out.value(0, 1)));
        CHECK(out.value(0, 1) > 2.0);
        CHECK(out.value(0, 1) < 4.0);
    }
}

TEST_CASE("holdout scoring bins points onto the surface") {
    PixelGrid g = make_grid(2, 2, {1.0, 2.0, 3.0, 4.0}, "TTTT");

    SUBCASE("identical predictions score zero") {
        const std::vector<Point> pts = {{0.5, 0.5, 1.0}, {1.5, 1.5, 4.0}};
        const HoldoutStats st = holdout_rmse(g, pts);
        CHECK(st.rmse == 0.0);
        CHECK(st.n_points == 2);
        CHECK(st.skipped == 0);
    }

    SUBCASE("errors of 3 and 4 blend to the rms mean") {
        const std::vector<Point> pts = {{0.5, 0.5, 4.0}, {1.5, 1.5, 8.0}};
        const HoldoutStats st = holdout_rmse(g, pts);
        CHECK(st.rmse ==
              doctest::Approx(3.5355339059327378).epsilon(1e-12));
    }

    SUBCASE("points off the grid are counted, not scored") {
        const std::vector<Point> pts = {{0.5, 0.5, 1.0}, {19.0, 0.5, 9.0}};
        const HoldoutStats st = holdout_rmse(g, pts);
        CHECK(st.n_points == 1);
        CHECK(st.skipped == 1);
        CHECK(st.rmse == 0.0);
    }

    SUBCASE("points on the far edge still bin to the last cell") {
        const std::vector<Point> pts = {{2.0, 2.0, 4.0}};
        const HoldoutStats st = holdout_rmse(g, pts);
        CHECK(st.n_points == 1);
        CHECK(st.rmse == 0.0);
    }

    SUBCASE("unpopulated surface cells are skipped") {
        PixelGrid holey = make_grid(1, 2, {1.0, std::nan("")}, "TI");
        const std::vector<Point> pts = {{0.5, 0.5, 1.0}, {1.5, 0.5, 2.0}};
        const HoldoutStats st = holdout_rmse(holey, pts);
        CHECK(st.n_points == 1);
        CHECK(st.skipped == 1);
    }

    SUBCASE("nothing comparable is an error") {
        const std::vector<Point> pts = {{-5.0, -5.0, 1.0}};
        CHECK(error_name([&] { holdout_rmse(g, pts); }) == "EmptyHoldout");
        CHECK(error_name([&] { holdout_rmse(g, {}); }) == "EmptyHoldout");
    }

    SUBCASE("order and duplication invariance") {
        std::vector<Point> pts = {{0.5, 0.5, 2.5}, {1.5, 0.5, 1.0},
                                  {0.5, 1.5, 3.5}};
        const double base = holdout_rmse(g, pts).rmse;
        std::reverse(pts.begin(), pts.end());
        CHECK(holdout_rmse(g, pts).rmse ==
              doctest::Approx(base).epsilon(1e-12));
        // Duplicating the whole set leaves the mean square unchanged.
        std::vector<Point> doubled = pts;
        doubled.insert(doubled.end(), pts.begin(), pts.end());
        CHECK(holdout_rmse(g, doubled).rmse ==
              doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("vector rmse") {
    CHECK(rmse({1.0, 2.0}, {1.0, 2.0}) == 0.0);
    CHECK(rmse({0.0, 0.0}, {3.0, 4.0}) ==
          doctest::Approx(3.5355339059327378).epsilon(1e-12));
    CHECK(error_name([&] { rmse({1.0}, {1.0, 2.0}); }) == "ShapeError");
    CHECK(error_name([&] { rmse({}, {}); }) == "ShapeError");
}

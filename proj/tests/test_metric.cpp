#include <cmath>
#include <vector>

#include "doctest.h"
#include "iini/metric.hpp"
#include "iini/rng.hpp"
#include "test_support.hpp"

using namespace iini;
using test::error_name;
using test::make_grid;
using test::view_of;

namespace {

constexpr double kPi = 3.14159265358979323846;

NeighbourView random_view(CounterRng& rng, int n) {
    NeighbourView nv;
    nv.center = rng.next_double();
    for (int i = 0; i < n; ++i)
        nv.add(rng.next_double(), PixelRole::Inference, 1.0);
    return nv;
}

}  // namespace

TEST_CASE("square difference measures local disagreement") {
    // Most similar: everything equal.
    CHECK(square_difference(view_of(0.5, {{0.5}, {0.5}, {0.5}, {0.5}})) ==
          0.0);
    // Maximum difference over the unit interval.
    CHECK(square_difference(view_of(1.0, {{0.0}, {0.0}, {0.0}, {0.0}})) ==
          1.0);
    // Corner pixel with two neighbours.
    CHECK(square_difference(view_of(0.5, {{0.0}, {1.0}})) ==
          doctest::Approx(0.25).epsilon(1e-15));
    // A boosted training neighbour outweighs three quiet ones: 3/6.
    CHECK(square_difference(view_of(
              0.0, {{1.0, PixelRole::Training, 3.0}, {0.0}, {0.0}, {0.0}})) ==
          doctest::Approx(0.5).epsilon(1e-15));

    NeighbourView lonely;
    lonely.center = 0.5;
    CHECK(error_name([&] { square_difference(lonely); }) == "IsolatedPixel");
}

TEST_CASE("square difference properties") {
    CounterRng rng(17);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_index(3));
        NeighbourView nv = random_view(rng, n);

        // Bounded on unit-interval inputs.
        const double d = square_difference(nv);
        CHECK(d >= 0.0);
        CHECK(d <= 1.0);

        // Permuting the neighbour list is an exact no-op: reverse it.
        NeighbourView rev;
        rev.center = nv.center;
        for (int i = nv.count - 1; i >= 0; --i)
            rev.add(nv.items[static_cast<std::size_t>(i)].value,
                    nv.items[static_cast<std::size_t>(i)].role,
                    nv.items[static_cast<std::size_t>(i)].bias);
        CHECK(square_difference(rev) ==
              doctest::Approx(d).epsilon(1e-12));

        // Differences are translation invariant.
        NeighbourView shifted;
        shifted.center = nv.center + 3.25;
        for (int i = 0; i < nv.count; ++i)
            shifted.add(nv.items[static_cast<std::size_t>(i)].value + 3.25,
                        nv.items[static_cast<std::size_t>(i)].role, 1.0);
        CHECK(square_difference(shifted) ==
              doctest::Approx(d).epsilon(1e-9));

        // Strict convexity: the midpoint of two probes beats their average.
        const double p1 = rng.next_double();
        const double p2 = p1 + 0.5;
        const double mid = square_difference_at(nv, 0.5 * (p1 + p2));
        const double avg = 0.5 * (square_difference_at(nv, p1) +
                                  square_difference_at(nv, p2));
        CHECK(mid < avg);
    }
}

TEST_CASE("cosine dissimilarity measures angular disagreement") {
    CHECK(cosine_dissimilarity(view_of(0.0, {{0.0}, {0.0}, {0.0}, {0.0}})) ==
          -1.0);
    CHECK(cosine_dissimilarity(view_of(0.0, {{kPi}, {kPi}, {kPi}, {kPi}})) ==
          doctest::Approx(1.0).epsilon(1e-15));
    CHECK(cosine_dissimilarity(view_of(
              0.0, {{0.0}, {kPi / 2}, {kPi}, {3 * kPi / 2}})) ==
          doctest::Approx(0.0).epsilon(1e-15));

    NeighbourView lonely;
    CHECK(error_name([&] { cosine_dissimilarity(lonely); }) ==
          "IsolatedPixel");

    CounterRng rng(29);
    for (int trial = 0; trial < 100; ++trial) {
        NeighbourView nv;
        nv.center = rng.next_double() * 2 * kPi;
        const int n = 2 + static_cast<int>(rng.next_index(3));
        for (int i = 0; i < n; ++i)
            nv.add(rng.next_double() * 2 * kPi, PixelRole::Inference, 1.0);

        // Always inside [-1, 1].
        const double c = cosine_dissimilarity(nv);
        CHECK(c >= -1.0);
        CHECK(c <= 1.0);

        // 2*pi periodic in the center and in each neighbour.
        CHECK(cosine_dissimilarity_at(nv, nv.center + 2 * kPi) ==
              doctest::Approx(c).epsilon(1e-12));
        NeighbourView wrapped = nv;
        wrapped.items[0].value += 4 * kPi;
        CHECK(cosine_dissimilarity(wrapped) ==
              doctest::Approx(c).epsilon(1e-12));
    }
}

TEST_CASE("canonical angle folds into one period") {
    CHECK(canonical_angle(0.0) == 0.0);
    CHECK(canonical_angle(2 * kPi) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(canonical_angle(-kPi / 2) ==
          doctest::Approx(3 * kPi / 2).epsilon(1e-12));
    CounterRng rng(31);
    for (int i = 0; i < 50; ++i) {
        const double a = (rng.next_double() - 0.5) * 50.0;
        const double f = canonical_angle(a);
        CHECK(f >= 0.0);
        CHECK(f < 2 * kPi);
        CHECK(std::fabs(std::cos(f) - std::cos(a)) < 1e-9);
        CHECK(std::fabs(std::sin(f) - std::sin(a)) < 1e-9);
    }
}

TEST_CASE("delta_d compares a candidate against the current value") {
    // Center inference pixel of a 3x3 cross, all neighbours 0.5.
    PixelGrid g = make_grid(3, 3,
                            {0.0, 0.5, 0.0,
                             0.5, 0.0, 0.5,
                             0.0, 0.5, 0.0},
                            "ITI"
                            "TIT"
                            "ITI");
    const MetricSpec m;
    const std::size_t center = g.idx(1, 1);

    // Identity: proposing the current value changes nothing.
    CHECK(delta_d(g, center, g.values[center], m) == 0.0);

    // From 0 to 0.5 with neighbours at 0.5: 0 - 0.25.
    CHECK(delta_d(g, center, 0.5, m) ==
          doctest::Approx(-0.25).epsilon(1e-15));

    // From 0.5 to 1.0 with neighbours at 0.5: +0.25.
    g.values[center] = 0.5;
    CHECK(delta_d(g, center, 1.0, m) ==
          doctest::Approx(0.25).epsilon(1e-15));

    // Training pixels are not updatable.
    CHECK(error_name([&] { delta_d(g, g.idx(0, 1), 0.3, m); }) ==
          "RoleViolation");
}

TEST_CASE("bias policy boosts training neighbours only") {
    MetricSpec boosted;
    boosted.bias_policy = BiasPolicy::TrainingBoost;
    boosted.beta = 3.0;
    CHECK(boosted.bias_for(PixelRole::Training) == 3.0);
    CHECK(boosted.bias_for(PixelRole::Inference) == 1.0);

    const MetricSpec plain;
    CHECK(plain.bias_for(PixelRole::Training) == 1.0);

    MetricSpec bad;
    bad.beta = 0.5;
    bad.bias_policy = BiasPolicy::TrainingBoost;
    CHECK(error_name([&] { bad.validate(); }) == "ConfigError");

    // gather_neighbours stamps the policy onto roles.
    PixelGrid g = make_grid(2, 2, {1.0, 0.0, 0.0, 0.0},
                            "TI"
                            "II");
    const NeighbourView nv = gather_neighbours(g, 0, 1, boosted);
    REQUIRE(nv.count == 2);
    double training_bias = 0.0;
    double inference_bias = 0.0;
    for (const auto& s : nv.neighbours()) {
        if (s.role == PixelRole::Training) training_bias = s.bias;
        if (s.role == PixelRole::Inference) inference_bias = s.bias;
    }
    CHECK(training_bias == 3.0);
    CHECK(inference_bias == 1.0);
}

TEST_CASE("neighbour views have 2-4 members by position") {
    PixelGrid g = make_grid(3, 3, std::vector<double>(9, 0.1),
                            "III"
                            "III"
                            "III");
    const MetricSpec m;
    CHECK(gather_neighbours(g, 0, 0, m).count == 2);  // corner
    CHECK(gather_neighbours(g, 0, 1, m).count == 3);  // edge
    CHECK(gather_neighbours(g, 1, 1, m).count == 4);  // interior
    // Diagonals never contribute: the corner view sees only (0,1), (1,0).
    const NeighbourView nv = gather_neighbours(g, 0, 0, m);
    for (const auto& s : nv.neighbours()) CHECK(s.value == 0.1);
}

#include "iini/metric.hpp"

#include <string>

#include "iini/error.hpp"

namespace iini {

namespace {

void require_neighbours(const NeighbourView& nv) {
    if (nv.count == 0)
        throw Error("IsolatedPixel",
                    "pixel has no neighbours; dissimilarity is undefined");
}

}  // namespace

void MetricSpec::validate() const {
    if (!(beta >= 1.0))
        throw Error("ConfigError",
                    "beta must be >= 1, got " + std::to_string(beta));
}

double square_difference(const NeighbourView& nv) {
    require_neighbours(nv);
    return square_difference_at(nv, nv.center);
}

double cosine_dissimilarity(const NeighbourView& nv) {
    require_neighbours(nv);
    return cosine_dissimilarity_at(nv, nv.center);
}

double dissimilarity(const NeighbourView& nv, MetricKind kind) {
    require_neighbours(nv);
    return dissimilarity_at(nv, nv.center, kind);
}

double delta_d(const PixelGrid& g, std::size_t at, double candidate,
               const MetricSpec& m) {
    if (g.roles[at] != PixelRole::Inference)
        throw Error("RoleViolation",
                    "delta_d targets a training pixel at index " +
                        std::to_string(at));
    const int r = static_cast<int>(at / static_cast<std::size_t>(g.cols));
    const int c = static_cast<int>(at % static_cast<std::size_t>(g.cols));
    const NeighbourView nv = gather_neighbours(g, r, c, m);
    require_neighbours(nv);
    return dissimilarity_at(nv, candidate, m.kind) -
           dissimilarity_at(nv, nv.center, m.kind);
}

}  // namespace iini

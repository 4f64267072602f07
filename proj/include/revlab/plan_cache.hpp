#pragma once

#include <string>

#include "revlab/geometry.hpp"

namespace revlab {

struct PropagatorPlan;

// On-disk cache of propagator plans in a flat binary container with a version
// header, keyed by (profile hash, r1, R, eps', L, n_grid, capture width).
// Reload is bit-exact: payloads are raw little-endian doubles.
bool plan_cache_load(const std::string& dir, const Manifold& m, const PropagatorPlan& proto,
                     PropagatorPlan& out);
void plan_cache_store(const std::string& dir, const Manifold& m, const PropagatorPlan& plan);

std::string plan_cache_path(const std::string& dir, const Manifold& m,
                            const PropagatorPlan& proto);

}  // namespace revlab

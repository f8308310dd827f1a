#pragma once
// Certified reductions into b-grabbing. Both preserve the radius and always
// emit a valid grabbing output (no-error), whatever the input algorithm does.

#include "grablab/local_model.hpp"

namespace grablab {

// From a matching(b) algorithm: keep the claimed ports, dropping the
// largest-indexed extras beyond b, then top up to exactly b with distinct
// random ports derived from the center's (id, private bits). On a correct
// maximal b-matching this only adds ports, so badness <= b*alpha(g)/n; on an
// incorrect one it still outputs exactly b marks per node.
AlgorithmDescriptor matching_to_grabbing(const AlgorithmDescriptor& matching_alg);

// From an edge-coloring algorithm with palette `coloring_alg.bound`: sample a
// color class chi from the shared bits (64-bit hash mod palette; bias
// <= palette * 2^-64), grab the chi-colored incident half-edge (lowest port
// if several), or a random port if none. Produces 1-grabbing.
AlgorithmDescriptor coloring_to_grabbing(const AlgorithmDescriptor& coloring_alg);

// Same with the color class pinned; used to take exact expectations over chi.
AlgorithmDescriptor coloring_to_grabbing_fixed_color(const AlgorithmDescriptor& coloring_alg,
                                                     int chi);

}  // namespace grablab

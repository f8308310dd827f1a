#pragma once
// Shipped baseline algorithms. Rules consume randomness only as a
// deterministic function of view contents (own id, private bits, round
// index), expanded by a fixed 64-bit mixer, so they stay pure functions of
// the view and exact-mode enumeration over the declared input space is
// meaningful.

#include "grablab/local_model.hpp"

namespace grablab {

// 0 rounds, deterministic: grab the b lowest-indexed present ports.
AlgorithmDescriptor baseline_port_first(int b);

// 0 rounds: grab a pseudo-uniform b-subset of the present ports, derived
// from (id, private bits).
AlgorithmDescriptor baseline_uniform_grab(int b);

// T rounds, matching(b): every unsaturated node proposes to a random free
// port each round; mutual proposals match. The rule simulates the protocol
// inside the ball (node states at round t are computed only where the view
// determines them), so the two endpoints of an edge always agree; the result
// can fail maximality but never agreement. Boundary nodes are assumed to
// have all delta ports (the regular-graph setting).
AlgorithmDescriptor baseline_proposal_matching(int T, int b);

// Named lookup used by the CLI: "port1", "uniform", "proposal".
// For "proposal" the returned descriptor is already reduced to grabbing.
AlgorithmDescriptor baseline_by_name(const std::string& name, int T, int b);

}  // namespace grablab

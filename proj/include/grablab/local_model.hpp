#pragma once
// LOCAL-model simulation on ported graphs. A T-round algorithm is a pure
// function of the radius-T view; outputs are per-incident-half-edge labels.
// Randomness: per-node private bits, global shared bits, IDs drawn uniformly
// (and independently, collisions permitted) from [1, n^c], plus optional
// per-node random port re-labelling.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "grablab/graph.hpp"

namespace grablab {

enum class PortMode {
  fixed,   // visible ports == wiring ports (identity permutation)
  random,  // each node re-labels its ports with a random permutation
};

struct LocalModelParams {
  int id_exponent = 1;  // IDs uniform in [1, n^id_exponent]
  int R = 2;            // private bits per node
  int R_shared = 0;     // globally shared bits
  PortMode port_mode = PortMode::random;
  bool resample_ports_per_trial = true;  // only consulted by trial loops
  double budget_cap_bits = 24.0;         // exact-enumeration budget cap
};

// n^c with overflow guard.
uint64_t id_space_size(int n, int id_exponent);

struct NodeInputs {
  uint64_t id = 0;                    // in [1, id_space]
  std::vector<int> port_perm;         // visible port i -> wiring port port_perm[i]
  std::vector<uint8_t> private_bits;  // length R, each 0/1
};

struct InputAssignment {
  std::vector<NodeInputs> nodes;
  std::vector<uint8_t> shared_bits;  // length R_shared
  uint64_t id_space = 0;
};

// Substreams are keyed on (seed, node index, channel), so every node's ids,
// bits and permutation are independent and reproducible.
InputAssignment assign_inputs(const PortedGraph& g, uint64_t seed, const LocalModelParams& p);

// Graph with every node's adjacency re-expressed in its visible ports.
PortedGraph apply_port_permutations(const PortedGraph& g, const InputAssignment& in);

// Rewrites (g, in) so that all permutations are identity and the wiring of
// the returned graph equals the visible wiring. Views, labelings and edge
// sets are unchanged up to this re-labelling.
std::pair<PortedGraph, InputAssignment> normalize_to_visible(const PortedGraph& g,
                                                             const InputAssignment& in);

// Radius-T view of a node: the ball (in visible ports), every ball node's
// id and private bits, and the shared bits. Node order is BFS order from the
// center. source_node anchors the view in the graph it was extracted from;
// rules must not let outputs depend on it beyond the experiment's fixed
// topology.
struct View {
  PortedGraph ball;  // ball.center == 0
  int radius = 0;
  int source_node = -1;
  // Which visible ports of the center carry edges. A node always knows its
  // own half-edges, so this is distance-0 information; for radius >= 1 it
  // coincides with the ball's center adjacency, at radius 0 the ball alone
  // would not carry it.
  std::vector<uint8_t> center_ports;
  std::vector<uint64_t> ids;
  std::vector<std::vector<uint8_t>> private_bits;
  std::vector<uint8_t> shared_bits;

  int center_degree() const {
    int d = 0;
    for (uint8_t p : center_ports) d += p;
    return d;
  }
};

View extract_view(const PortedGraph& g, const InputAssignment& in, int v, int radius);

// Centered, port-preserving isomorphism that also matches ids, private bits,
// shared bits and radius. Ports pin the node mapping, so no search happens.
bool views_isomorphic(const View& a, const View& b);

enum class ProblemKind { grabbing, matching, edge_coloring };

inline constexpr int kLabelU = 0;
inline constexpr int kLabelM = 1;

// rule(view) returns one label per visible port of the center (size
// ball.delta; entries at unused ports are ignored). grabbing: exactly
// `bound` ports labelled M; matching: any subset of ports claimed (failures
// allowed, verified downstream); edge_coloring: a color in [1, bound].
struct AlgorithmDescriptor {
  std::string name;
  int radius = 0;
  ProblemKind kind = ProblemKind::grabbing;
  int bound = 1;  // b for grabbing/matching, palette size for coloring
  std::function<std::vector<int>(const View&)> rule;
};

// Same rule, evaluated on a larger view (a T-round algorithm is also a
// T'-round algorithm for T' > T).
AlgorithmDescriptor with_radius(AlgorithmDescriptor alg, int radius);

// Per-node, per-wiring-port labels; -1 at unused ports.
struct HalfEdgeLabeling {
  int n = 0, delta = 0;
  std::vector<std::vector<int>> labels;
};

// Simulates one run: every node's labels are its rule applied to its own
// radius-T view; visible-port outputs are translated back to wiring ports.
// Throws RuleViolation if a grabbing rule marks != b present ports.
HalfEdgeLabeling run_algorithm(const PortedGraph& g, const InputAssignment& in,
                               const AlgorithmDescriptor& alg);

// Sidecar format: header "shared: <bits|->", then per node
// "v: <id> <p0,p1,...> <bits|->". Round-trips bit-exactly.
std::string inputs_to_string(const InputAssignment& in);
InputAssignment inputs_from_string(const std::string& text);

std::string labeling_to_string(const HalfEdgeLabeling& lab, ProblemKind kind);
HalfEdgeLabeling labeling_from_string(const std::string& text, ProblemKind kind);

}  // namespace grablab

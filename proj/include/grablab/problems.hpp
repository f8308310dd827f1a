#pragma once
// Problem definitions and verifiers: b-grabbing, maximal b-matching,
// (Delta+k)-edge coloring, plus quality/badness scoring.
//
// b-grabbing: every node marks exactly b incident half-edges M; an edge is
// matched iff both halves are M. Quality q = #matched edges; badness
// p = 1 - 2q/(b*n); a node is saturated iff exactly b incident edges are
// matched.

#include <optional>
#include <string>
#include <vector>

#include "grablab/graph.hpp"
#include "grablab/local_model.hpp"

namespace grablab {

// nullopt = valid; otherwise the first offending node (node-index order).
std::optional<int> verify_b_grabbing(const PortedGraph& g, const HalfEdgeLabeling& lab, int b);

struct GrabbingScore {
  long long q = 0;
  double p = 0.0;
  std::vector<uint8_t> saturated;
  int saturated_count = 0;
};
GrabbingScore score_grabbing(const PortedGraph& g, const HalfEdgeLabeling& lab, int b);
std::string score_to_json(const GrabbingScore& s);

// A b-matching proposal: per node, the sorted list of claimed wiring ports.
using PortClaims = std::vector<std::vector<int>>;

enum class MatchingFailure { overfull, disagreement, not_maximal };

struct MatchingWitness {
  MatchingFailure mode;
  int node = -1;      // overfull: the node; disagreement/not_maximal: endpoint u
  int port = -1;      // disagreement/not_maximal: u's port on the offending edge
  std::string describe() const;
};

struct MatchingVerdict {
  bool ok = true;
  std::optional<MatchingWitness> witness;  // first failure in scan order
};

// Maximal b-matching: every node claims <= b ports (overfull otherwise), both
// endpoints of a claimed edge agree (disagreement), and no edge could still
// be added between two unsaturated endpoints (not_maximal).
MatchingVerdict verify_maximal_b_matching(const PortedGraph& g, const PortClaims& claims, int b);

// Edges claimed by both endpoints, as an M/U labeling.
HalfEdgeLabeling agreed_matching_labeling(const PortedGraph& g, const PortClaims& claims);

// Nodes with != b agreed matched edges.
std::vector<int> unsaturated_nodes(const PortedGraph& g, const PortClaims& claims, int b);

// Max degree of the subgraph induced by the unsaturated nodes; for a valid
// maximal b-matching this is <= b-1, so unsaturated count <= b * alpha(g).
int unsaturated_induced_max_degree(const PortedGraph& g, const PortClaims& claims, int b);

// Correct-by-construction maximal b-matching (central greedy edge scan).
PortClaims greedy_maximal_b_matching(const PortedGraph& g, int b);

enum class ColoringFailure { half_edge_disagreement, out_of_palette, not_proper };

struct ColoringWitness {
  ColoringFailure mode;
  int node = -1;
  int port = -1;
  std::string describe() const;
};

// Proper edge coloring with colors in [1, palette]: both halves of an edge
// carry the same color, colors are in range, and no node sees a color twice.
std::optional<ColoringWitness> verify_edge_coloring(const PortedGraph& g,
                                                    const HalfEdgeLabeling& lab, int palette);

}  // namespace grablab

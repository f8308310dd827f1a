#pragma once
// Ported graphs and instance machinery: uniform random regular generation,
// girth, independence number, radius-r balls and tree extensions.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace grablab {

struct PortEnd {
  int node = -1;  // -1: port unused (balls / trees may be sparse)
  int rev_port = -1;
  bool present() const { return node >= 0; }
  bool operator==(const PortEnd&) const = default;
};

// Simple graph whose edges carry a port number at each endpoint.
// Regular graphs use every port of every node; balls and trees keep the
// port numbering of their source graph and may leave ports unused.
struct PortedGraph {
  int n = 0;
  int delta = 0;  // size of each node's port space
  std::vector<std::vector<PortEnd>> adj;  // adj[v].size() == delta
  int center = -1;  // marked center for balls/trees, -1 otherwise

  int degree(int v) const {
    int d = 0;
    for (const PortEnd& e : adj[v]) d += e.present();
    return d;
  }
  bool has_center() const { return center >= 0; }
  // Each edge once, as (node, port) with the canonical (smaller) endpoint first.
  std::vector<std::pair<int, int>> edges() const;
  long long edge_count() const { return static_cast<long long>(edges().size()); }
};

PortedGraph make_empty_graph(int n, int delta);
void add_edge_at(PortedGraph& g, int u, int pu, int v, int pv);
void add_edge(PortedGraph& g, int u, int v);  // lowest free port at both ends

// Throws InvalidGraph unless every present port is mirrored by its reverse
// port, the graph is simple, and indices are in range. Full scan.
void validate_ports(const PortedGraph& g);
bool is_regular(const PortedGraph& g);

// Uniform random delta-regular simple graph via the pairing model with
// rejection. Throws ParityError (n*delta odd), DomainError (delta out of
// [2, n-1]), ExhaustedAttempts. The acceptance rate of a pairing decays
// roughly as exp(-(delta^2-1)/4), so the default attempt cap comfortably
// covers delta <= 6; larger degrees need an explicit cap.
PortedGraph generate_regular_graph(int n, int delta, uint64_t seed,
                                   int max_attempts = 50000);

struct GirthResult {
  std::optional<int> girth;  // nullopt: acyclic
  std::vector<int> cycle;    // witness cycle of length *girth, re-verified
};
GirthResult compute_girth(const PortedGraph& g);

// Greedy (min-degree) independent set: a lower bound on alpha(g).
int greedy_independence_lower(const PortedGraph& g);
// Exact alpha(g) by branch and bound over bitmasks. Throws SizeTooLarge if
// n > node_limit or n > 64.
int exact_independence_number(const PortedGraph& g, int node_limit = 40);

struct GraphDiagnostics {
  int n = 0;
  int delta = 0;
  std::optional<int> girth;
  std::vector<int> girth_cycle;
  int independence_lower = 0;
  std::optional<int> independence_exact;
  double girth_floor = 0.0;           // eps * log_delta(n); reference line only
  double independence_ceiling = 0.0;  // rho * n * ln(delta)/delta; reference only
};
GraphDiagnostics compute_diagnostics(const PortedGraph& g, int exact_threshold = 40,
                                     double rho = 2.0, double eps = 0.25);

// Radius-r ball around v: nodes at distance <= r; an edge {u,w} survives iff
// at least one endpoint lies at distance <= r-1. Ball nodes are re-indexed in
// BFS order (center first) but keep their original port numbers.
struct BallIndex {
  PortedGraph ball;        // ball.center == 0
  std::vector<int> nodes;  // ball index -> source index
  std::vector<int> dist;   // ball index -> distance from center
};
BallIndex extract_ball_index(const PortedGraph& g, int v, int radius);
PortedGraph extract_ball(const PortedGraph& g, int v, int radius);

// Pads an acyclic centered ball with fresh leaves until it has n_target
// nodes, attaching only at depth >= eccentricity(center) so the radius-r
// ball around the center is unchanged. Throws NotAcyclic, CannotReach,
// DomainError (n_target < ball size or delta < ball degrees).
PortedGraph extend_ball_to_tree(const PortedGraph& ball, long long n_target, int delta);

// Port-preserving centered isomorphism (topology + ports, no inputs).
// Ports pin the mapping, so this is a deterministic propagation, no search.
// Returns the node map a -> b, or nullopt.
std::optional<std::vector<int>> centered_port_isomorphism(const PortedGraph& a,
                                                          const PortedGraph& b);
bool balls_isomorphic(const PortedGraph& a, const PortedGraph& b);

// Text format: line 1 "n delta", then per node "v: u0/p0 u1/p1 ..." with one
// entry per port in order; unused ports serialize as "-". Round-trips
// bit-exactly.
std::string graph_to_string(const PortedGraph& g);
PortedGraph graph_from_string(const std::string& text);
void save_graph(const PortedGraph& g, const std::string& path);
PortedGraph load_graph(const std::string& path);

}  // namespace grablab

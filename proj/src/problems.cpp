#include "grablab/problems.hpp"

#include <algorithm>
#include <sstream>

#include "grablab/errors.hpp"

namespace grablab {

std::optional<int> verify_b_grabbing(const PortedGraph& g, const HalfEdgeLabeling& lab, int b) {
  if (lab.n != g.n || lab.delta != g.delta) throw DomainError("labeling shape != graph shape");
  for (int v = 0; v < g.n; ++v) {
    int marks = 0;
    for (int p = 0; p < g.delta; ++p) {
      if (!g.adj[v][p].present()) continue;
      int l = lab.labels[v][p];
      if (l != kLabelM && l != kLabelU) return v;  // missing/garbled label
      marks += (l == kLabelM);
    }
    if (marks != b) return v;
  }
  return std::nullopt;
}

GrabbingScore score_grabbing(const PortedGraph& g, const HalfEdgeLabeling& lab, int b) {
  if (lab.n != g.n || lab.delta != g.delta) throw DomainError("labeling shape != graph shape");
  if (b < 1) throw DomainError("b must be >= 1");
  GrabbingScore s;
  std::vector<int> matched_at(g.n, 0);
  for (auto [v, p] : g.edges()) {
    const PortEnd& e = g.adj[v][p];
    if (lab.labels[v][p] == kLabelM && lab.labels[e.node][e.rev_port] == kLabelM) {
      ++s.q;
      ++matched_at[v];
      ++matched_at[e.node];
    }
  }
  s.p = 1.0 - 2.0 * static_cast<double>(s.q) / (static_cast<double>(b) * g.n);
  s.saturated.resize(g.n);
  for (int v = 0; v < g.n; ++v) {
    s.saturated[v] = (matched_at[v] == b);
    s.saturated_count += s.saturated[v];
  }
  return s;
}

std::string score_to_json(const GrabbingScore& s) {
  std::ostringstream os;
  os.precision(17);
  os << "{\"q\": " << s.q << ", \"p\": " << s.p
     << ", \"saturated_count\": " << s.saturated_count << "}";
  return os.str();
}

std::string MatchingWitness::describe() const {
  switch (mode) {
    case MatchingFailure::overfull:
      return "node " + std::to_string(node) + " claims more than b ports";
    case MatchingFailure::disagreement:
      return "edge at node " + std::to_string(node) + " port " + std::to_string(port) +
             " claimed on one side only";
    case MatchingFailure::not_maximal:
      return "edge at node " + std::to_string(node) + " port " + std::to_string(port) +
             " joins two unsaturated nodes";
  }
  return "";
}

namespace {

std::vector<std::vector<char>> claim_table(const PortedGraph& g, const PortClaims& claims) {
  if (static_cast<int>(claims.size()) != g.n) throw DomainError("claims size != n");
  std::vector<std::vector<char>> t(g.n, std::vector<char>(g.delta, 0));
  for (int v = 0; v < g.n; ++v)
    for (int p : claims[v]) {
      if (p < 0 || p >= g.delta || !g.adj[v][p].present())
        throw DomainError("claim on missing port " + std::to_string(p) + " at node " +
                          std::to_string(v));
      t[v][p] = 1;
    }
  return t;
}

}  // namespace

MatchingVerdict verify_maximal_b_matching(const PortedGraph& g, const PortClaims& claims, int b) {
  MatchingVerdict verdict;
  std::vector<std::vector<char>> t = claim_table(g, claims);

  auto fail = [&](MatchingFailure mode, int node, int port) {
    verdict.ok = false;
    verdict.witness = MatchingWitness{mode, node, port};
  };

  for (int v = 0; v < g.n && verdict.ok; ++v) {
    int c = 0;
    for (int p = 0; p < g.delta; ++p) c += t[v][p];
    if (c > b) fail(MatchingFailure::overfull, v, -1);
  }
  if (!verdict.ok) return verdict;

  for (int v = 0; v < g.n && verdict.ok; ++v)
    for (int p = 0; p < g.delta && verdict.ok; ++p) {
      const PortEnd& e = g.adj[v][p];
      if (!e.present() || e.node < v) continue;
      if (t[v][p] != t[e.node][e.rev_port]) fail(MatchingFailure::disagreement, v, p);
    }
  if (!verdict.ok) return verdict;

  // Agreed matched degree per node; an unmatched edge between two nodes of
  // matched degree < b witnesses non-maximality.
  std::vector<int> deg(g.n, 0);
  for (auto [v, p] : g.edges())
    if (t[v][p]) { ++deg[v]; ++deg[g.adj[v][p].node]; }
  for (int v = 0; v < g.n && verdict.ok; ++v)
    for (int p = 0; p < g.delta && verdict.ok; ++p) {
      const PortEnd& e = g.adj[v][p];
      if (!e.present() || e.node < v || t[v][p]) continue;
      if (deg[v] < b && deg[e.node] < b) fail(MatchingFailure::not_maximal, v, p);
    }
  return verdict;
}

HalfEdgeLabeling agreed_matching_labeling(const PortedGraph& g, const PortClaims& claims) {
  std::vector<std::vector<char>> t = claim_table(g, claims);
  HalfEdgeLabeling lab;
  lab.n = g.n;
  lab.delta = g.delta;
  lab.labels.assign(g.n, std::vector<int>(g.delta, -1));
  for (int v = 0; v < g.n; ++v)
    for (int p = 0; p < g.delta; ++p) {
      const PortEnd& e = g.adj[v][p];
      if (!e.present()) continue;
      lab.labels[v][p] = (t[v][p] && t[e.node][e.rev_port]) ? kLabelM : kLabelU;
    }
  return lab;
}

std::vector<int> unsaturated_nodes(const PortedGraph& g, const PortClaims& claims, int b) {
  HalfEdgeLabeling lab = agreed_matching_labeling(g, claims);
  std::vector<int> deg(g.n, 0);
  for (auto [v, p] : g.edges())
    if (lab.labels[v][p] == kLabelM) { ++deg[v]; ++deg[g.adj[v][p].node]; }
  std::vector<int> out;
  for (int v = 0; v < g.n; ++v)
    if (deg[v] != b) out.push_back(v);
  return out;
}

int unsaturated_induced_max_degree(const PortedGraph& g, const PortClaims& claims, int b) {
  std::vector<int> uns = unsaturated_nodes(g, claims, b);
  std::vector<char> in_set(g.n, 0);
  for (int v : uns) in_set[v] = 1;
  int best = 0;
  for (int v : uns) {
    int d = 0;
    for (const PortEnd& e : g.adj[v]) d += (e.present() && in_set[e.node]);
    best = std::max(best, d);
  }
  return best;
}

PortClaims greedy_maximal_b_matching(const PortedGraph& g, int b) {
  if (b < 1) throw DomainError("b must be >= 1");
  PortClaims claims(g.n);
  std::vector<int> deg(g.n, 0);
  for (auto [v, p] : g.edges()) {
    const PortEnd& e = g.adj[v][p];
    if (deg[v] < b && deg[e.node] < b) {
      claims[v].push_back(p);
      claims[e.node].push_back(e.rev_port);
      ++deg[v];
      ++deg[e.node];
    }
  }
  for (std::vector<int>& c : claims) std::sort(c.begin(), c.end());
  return claims;
}

std::string ColoringWitness::describe() const {
  switch (mode) {
    case ColoringFailure::half_edge_disagreement:
      return "edge at node " + std::to_string(node) + " port " + std::to_string(port) +
             " colored differently on its two halves";
    case ColoringFailure::out_of_palette:
      return "color outside palette at node " + std::to_string(node) + " port " +
             std::to_string(port);
    case ColoringFailure::not_proper:
      return "node " + std::to_string(node) + " sees the color of port " + std::to_string(port) +
             " twice";
  }
  return "";
}

std::optional<ColoringWitness> verify_edge_coloring(const PortedGraph& g,
                                                    const HalfEdgeLabeling& lab, int palette) {
  if (lab.n != g.n || lab.delta != g.delta) throw DomainError("labeling shape != graph shape");
  for (int v = 0; v < g.n; ++v)
    for (int p = 0; p < g.delta; ++p) {
      if (!g.adj[v][p].present()) continue;
      int c = lab.labels[v][p];
      if (c < 1 || c > palette)
        return ColoringWitness{ColoringFailure::out_of_palette, v, p};
    }
  for (int v = 0; v < g.n; ++v)
    for (int p = 0; p < g.delta; ++p) {
      const PortEnd& e = g.adj[v][p];
      if (!e.present() || e.node < v) continue;
      if (lab.labels[v][p] != lab.labels[e.node][e.rev_port])
        return ColoringWitness{ColoringFailure::half_edge_disagreement, v, p};
    }
  for (int v = 0; v < g.n; ++v) {
    std::vector<char> seen(palette + 1, 0);
    for (int p = 0; p < g.delta; ++p) {
      if (!g.adj[v][p].present()) continue;
      int c = lab.labels[v][p];
      if (seen[c]) return ColoringWitness{ColoringFailure::not_proper, v, p};
      seen[c] = 1;
    }
  }
  return std::nullopt;
}

}  // namespace grablab

#pragma once
// Hand-built fixture graphs with pinned port numbers, so goldens and
// hand-simulations in the tests are stable.

#include <cstdint>

#include "grablab/graph.hpp"

namespace fixtures {

using grablab::PortedGraph;

// 3-cube: nodes are 3-bit strings, port i flips bit i. Girth 4, alpha 4.
inline PortedGraph cube_q3() {
  PortedGraph g = grablab::make_empty_graph(8, 3);
  for (int v = 0; v < 8; ++v)
    for (int i = 0; i < 3; ++i)
      if (v < (v ^ (1 << i))) grablab::add_edge_at(g, v, i, v ^ (1 << i), i);
  return g;
}

// Heawood graph, LCF [5,-5]^7: 14-cycle (ports 0 next / 1 prev) plus chords
// i -> i+5 for even i (port 2 at both ends). Girth 6, 3-regular, alpha 7.
inline PortedGraph heawood() {
  PortedGraph g = grablab::make_empty_graph(14, 3);
  for (int i = 0; i < 14; ++i) grablab::add_edge_at(g, i, 0, (i + 1) % 14, 1);
  for (int i = 0; i < 14; i += 2) grablab::add_edge_at(g, i, 2, (i + 5) % 14, 2);
  return g;
}

// Petersen graph: outer 5-cycle 0..4 (ports 0/1), inner pentagram 5..9
// (5+i -> 5+((i+2)%5), ports 0/1), spokes i <-> 5+i on port 2. Girth 5, alpha 4.
inline PortedGraph petersen() {
  PortedGraph g = grablab::make_empty_graph(10, 3);
  for (int i = 0; i < 5; ++i) grablab::add_edge_at(g, i, 0, (i + 1) % 5, 1);
  for (int i = 0; i < 5; ++i) grablab::add_edge_at(g, 5 + i, 0, 5 + (i + 2) % 5, 1);
  for (int i = 0; i < 5; ++i) grablab::add_edge_at(g, i, 2, 5 + i, 2);
  return g;
}

// n-cycle, port 0 toward the successor and port 1 toward the predecessor.
inline PortedGraph cycle_aligned(int n) {
  PortedGraph g = grablab::make_empty_graph(n, 2);
  for (int i = 0; i < n; ++i) grablab::add_edge_at(g, i, 0, (i + 1) % n, 1);
  return g;
}

// Even cycle whose edges use the same port number at both endpoints:
// (2k, 2k+1) on port 0, (2k+1, 2k+2) on port 1. port1 grabbing then matches
// the port-0 edges and leaves the port-1 edges unmatched.
inline PortedGraph cycle_paired(int n) {
  PortedGraph g = grablab::make_empty_graph(n, 2);
  for (int i = 0; i < n; i += 2) grablab::add_edge_at(g, i, 0, i + 1, 0);
  for (int i = 1; i < n; i += 2) grablab::add_edge_at(g, i, 1, (i + 1) % n, 1);
  return g;
}

// K4 with edges added in lexicographic order (lowest free ports).
inline PortedGraph k4() {
  PortedGraph g = grablab::make_empty_graph(4, 3);
  for (int u = 0; u < 4; ++u)
    for (int v = u + 1; v < 4; ++v) grablab::add_edge(g, u, v);
  return g;
}

// K_{a,b}: left i in [0,a), right a+j; edge (i, a+j) sits on left port j and
// right port i. Regular iff a == b.
inline PortedGraph complete_bipartite(int a, int b) {
  PortedGraph g = grablab::make_empty_graph(a + b, a > b ? a : b);
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) grablab::add_edge_at(g, i, j, a + j, i);
  return g;
}

// Star K_{1,k} inside port space delta >= k: center 0 port i -> leaf i+1 port 0.
inline PortedGraph star(int k, int delta) {
  PortedGraph g = grablab::make_empty_graph(k + 1, delta);
  for (int i = 0; i < k; ++i) grablab::add_edge_at(g, 0, i, i + 1, 0);
  return g;
}

// Path 0-1-...-n-1, port 0 forward / port 1 backward.
inline PortedGraph path(int n) {
  PortedGraph g = grablab::make_empty_graph(n, 2);
  for (int i = 0; i + 1 < n; ++i) grablab::add_edge_at(g, i, 0, i + 1, 1);
  return g;
}

}  // namespace fixtures

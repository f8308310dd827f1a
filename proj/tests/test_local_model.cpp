#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <numeric>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "grablab/baselines.hpp"
#include "grablab/errors.hpp"
#include "grablab/local_model.hpp"

using namespace grablab;

namespace {

LocalModelParams params(int R, int R_shared, PortMode mode, int id_exponent = 1) {
  LocalModelParams p;
  p.R = R;
  p.R_shared = R_shared;
  p.port_mode = mode;
  p.id_exponent = id_exponent;
  return p;
}

}  // namespace

TEST_CASE("id space size") {
  CHECK(id_space_size(10, 1) == 10);
  CHECK(id_space_size(10, 3) == 1000);
  CHECK_THROWS_AS(id_space_size(0, 1), DomainError);
  CHECK_THROWS_AS(id_space_size(10, 0), DomainError);
  CHECK_THROWS_AS(id_space_size(100000, 4), DomainError);  // 10^20 > 2^64
}

TEST_CASE("assign_inputs is deterministic and in range") {
  PortedGraph g = fixtures::petersen();
  LocalModelParams p = params(3, 2, PortMode::random, 2);
  InputAssignment a = assign_inputs(g, 11, p);
  InputAssignment b = assign_inputs(g, 11, p);
  CHECK(inputs_to_string(a) == inputs_to_string(b));
  CHECK(inputs_to_string(a) != inputs_to_string(assign_inputs(g, 12, p)));

  CHECK(a.id_space == 100);
  CHECK(a.shared_bits.size() == 2);
  std::set<uint64_t> ids;
  for (const NodeInputs& ni : a.nodes) {
    CHECK(ni.id >= 1);
    CHECK(ni.id <= 100);
    ids.insert(ni.id);
    CHECK(ni.private_bits.size() == 3);
    std::vector<int> sorted = ni.port_perm;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> identity(g.delta);
    std::iota(identity.begin(), identity.end(), 0);
    CHECK(sorted == identity);
  }
  CHECK(ids.size() > 1);  // nodes draw from independent substreams
}

TEST_CASE("fixed port mode keeps identity permutations") {
  PortedGraph g = fixtures::cube_q3();
  InputAssignment in = assign_inputs(g, 5, params(1, 0, PortMode::fixed));
  for (const NodeInputs& ni : in.nodes)
    for (int i = 0; i < g.delta; ++i) CHECK(ni.port_perm[i] == i);
}

TEST_CASE("apply_port_permutations rewires consistently") {
  PortedGraph g = fixtures::petersen();
  InputAssignment in = assign_inputs(g, 3, params(1, 0, PortMode::random));
  PortedGraph eff = apply_port_permutations(g, in);  // validates ports internally
  for (int v = 0; v < g.n; ++v)
    for (int i = 0; i < g.delta; ++i)
      CHECK(eff.adj[v][i].node == g.adj[v][in.nodes[v].port_perm[i]].node);
}

TEST_CASE("normalize_to_visible preserves views") {
  PortedGraph g = fixtures::heawood();
  LocalModelParams p = params(2, 1, PortMode::random);
  InputAssignment in = assign_inputs(g, 9, p);
  auto [eff, flat] = normalize_to_visible(g, in);
  for (const NodeInputs& ni : flat.nodes)
    for (size_t i = 0; i < ni.port_perm.size(); ++i) CHECK(ni.port_perm[i] == static_cast<int>(i));
  for (int v : {0, 3, 13})
    for (int r : {0, 1, 2}) CHECK(views_isomorphic(extract_view(g, in, v, r), extract_view(eff, flat, v, r)));
}

TEST_CASE("view extraction on the aligned 6-cycle") {
  PortedGraph g = fixtures::cycle_aligned(6);
  InputAssignment in = assign_inputs(g, 21, params(2, 1, PortMode::fixed));
  View v = extract_view(g, in, 0, 2);
  CHECK(v.radius == 2);
  CHECK(v.source_node == 0);
  CHECK(v.ball.n == 5);
  CHECK(v.center_ports == std::vector<uint8_t>{1, 1});
  // BFS from 0 in port order: 1 (port 0), 5 (port 1), then 2, 4.
  std::vector<int> bfs = {0, 1, 5, 2, 4};
  REQUIRE(v.ids.size() == 5);
  for (size_t k = 0; k < bfs.size(); ++k) {
    CHECK(v.ids[k] == in.nodes[bfs[k]].id);
    CHECK(v.private_bits[k] == in.nodes[bfs[k]].private_bits);
  }
  CHECK(v.shared_bits == in.shared_bits);

  View v0 = extract_view(g, in, 4, 0);
  CHECK(v0.ball.n == 1);
  CHECK(v0.ball.edge_count() == 0);
  CHECK(v0.center_ports == std::vector<uint8_t>{1, 1});  // degree is 0-round knowledge
  CHECK(v0.ids == std::vector<uint64_t>{in.nodes[4].id});
}

TEST_CASE("views_isomorphic matches content, not provenance") {
  PortedGraph g = fixtures::cube_q3();
  LocalModelParams p = params(2, 1, PortMode::fixed);
  InputAssignment in = assign_inputs(g, 2, p);
  // Hand-uniformized inputs: the cube is vertex-transitive with these ports,
  // so every node sees the same view.
  for (NodeInputs& ni : in.nodes) {
    ni.id = 7;
    ni.private_bits = {1, 0};
  }
  View a = extract_view(g, in, 0, 1);
  View b = extract_view(g, in, 6, 1);
  CHECK(views_isomorphic(a, b));

  View c = a;
  c.ids[2] ^= 1;
  CHECK_FALSE(views_isomorphic(a, c));
  View d = a;
  d.radius = 0;
  CHECK_FALSE(views_isomorphic(a, d));
  View e = a;
  e.shared_bits[0] ^= 1;
  CHECK_FALSE(views_isomorphic(a, e));
  View f = a;
  f.private_bits[1] = {0, 0};
  CHECK_FALSE(views_isomorphic(a, f));
}

TEST_CASE("with_radius grows but never shrinks") {
  AlgorithmDescriptor alg = baseline_port_first(1);
  AlgorithmDescriptor wide = with_radius(alg, 2);
  CHECK(wide.radius == 2);
  CHECK(wide.bound == 1);
  CHECK_THROWS_AS(with_radius(wide, 1), DomainError);
}

TEST_CASE("run_algorithm writes labels back through the permutation") {
  PortedGraph g = fixtures::petersen();
  LocalModelParams p = params(4, 0, PortMode::random);
  InputAssignment in = assign_inputs(g, 17, p);
  HalfEdgeLabeling lab = run_algorithm(g, in, baseline_uniform_grab(1));
  for (int v = 0; v < g.n; ++v) {
    int marks = 0;
    for (int wp = 0; wp < g.delta; ++wp) {
      CHECK((lab.labels[v][wp] >= 0) == g.adj[v][wp].present());
      marks += lab.labels[v][wp] == kLabelM;
    }
    CHECK(marks == 1);
  }
}

TEST_CASE("port-first grabbing on the two 6-cycle wirings") {
  LocalModelParams p = params(1, 0, PortMode::fixed);
  AlgorithmDescriptor alg = baseline_port_first(1);

  PortedGraph paired = fixtures::cycle_paired(6);
  HalfEdgeLabeling lab = run_algorithm(paired, assign_inputs(paired, 1, p), alg);
  for (int v = 0; v < 6; ++v) {
    CHECK(lab.labels[v][0] == kLabelM);  // port 0 edges form a perfect matching
    CHECK(lab.labels[v][1] == kLabelU);
  }

  PortedGraph aligned = fixtures::cycle_aligned(6);
  lab = run_algorithm(aligned, assign_inputs(aligned, 1, p), alg);
  for (int v = 0; v < 6; ++v) {
    CHECK(lab.labels[v][0] == kLabelM);  // everyone chases its successor
    CHECK(lab.labels[v][1] == kLabelU);
  }
}

TEST_CASE("run_algorithm enforces the grabbing contract") {
  PortedGraph g = fixtures::k4();
  InputAssignment in = assign_inputs(g, 1, params(1, 0, PortMode::fixed));

  AlgorithmDescriptor overmark{"overmark", 0, ProblemKind::grabbing, 1,
                               [](const View& v) { return std::vector<int>(v.ball.delta, kLabelM); }};
  CHECK_THROWS_AS(run_algorithm(g, in, overmark), RuleViolation);

  AlgorithmDescriptor short_out{"short", 0, ProblemKind::grabbing, 1,
                                [](const View&) { return std::vector<int>{kLabelM}; }};
  CHECK_THROWS_AS(run_algorithm(g, in, short_out), RuleViolation);

  AlgorithmDescriptor no_rule;
  CHECK_THROWS_AS(run_algorithm(g, in, no_rule), UsageError);
}

TEST_CASE("inputs serialization round-trips") {
  PortedGraph g = fixtures::heawood();
  InputAssignment in = assign_inputs(g, 33, params(3, 2, PortMode::random, 2));
  std::string text = inputs_to_string(in);
  InputAssignment back = inputs_from_string(text);
  CHECK(inputs_to_string(back) == text);
  CHECK(back.id_space == in.id_space);
  CHECK(back.shared_bits == in.shared_bits);
  CHECK(back.nodes[5].id == in.nodes[5].id);
  CHECK(back.nodes[5].port_perm == in.nodes[5].port_perm);

  CHECK_THROWS_AS(inputs_from_string(""), DomainError);
  CHECK_THROWS_AS(inputs_from_string("shared: -\nidspace: 10\n1: 3 0,1 -\n"), DomainError);
}

TEST_CASE("labeling serialization round-trips") {
  PortedGraph g = fixtures::cycle_paired(6);
  InputAssignment in = assign_inputs(g, 1, params(1, 0, PortMode::fixed));
  HalfEdgeLabeling lab = run_algorithm(g, in, baseline_port_first(1));
  std::string text = labeling_to_string(lab, ProblemKind::grabbing);
  HalfEdgeLabeling back = labeling_from_string(text, ProblemKind::grabbing);
  CHECK(labeling_to_string(back, ProblemKind::grabbing) == text);
  CHECK(back.labels == lab.labels);

  HalfEdgeLabeling colors;
  colors.n = 1;
  colors.delta = 3;
  colors.labels = {{2, -1, 5}};
  std::string ctext = labeling_to_string(colors, ProblemKind::edge_coloring);
  CHECK(labeling_from_string(ctext, ProblemKind::edge_coloring).labels == colors.labels);

  CHECK_THROWS_AS(labeling_from_string("0: M\n1: M U\n", ProblemKind::grabbing), DomainError);
  CHECK_THROWS_AS(labeling_from_string("0: X\n", ProblemKind::grabbing), DomainError);
}

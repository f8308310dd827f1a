#include "grablab/local_model.hpp"

#include <algorithm>
#include <numeric>
#include <optional>
#include <queue>
#include <sstream>
#include <unordered_map>

#include "grablab/errors.hpp"
#include "grablab/rng.hpp"

namespace grablab {

uint64_t id_space_size(int n, int id_exponent) {
  if (n < 1 || id_exponent < 1) throw DomainError("id space needs n >= 1, exponent >= 1");
  uint64_t r = 1;
  for (int i = 0; i < id_exponent; ++i) {
    if (r > UINT64_MAX / static_cast<uint64_t>(n)) throw DomainError("id space overflows 64 bits");
    r *= static_cast<uint64_t>(n);
  }
  return r;
}

InputAssignment assign_inputs(const PortedGraph& g, uint64_t seed, const LocalModelParams& p) {
  InputAssignment in;
  in.id_space = id_space_size(g.n, p.id_exponent);
  in.nodes.resize(g.n);
  for (int v = 0; v < g.n; ++v) {
    NodeInputs& ni = in.nodes[v];
    ni.id = substream(seed, {1, static_cast<uint64_t>(v)}).below(in.id_space) + 1;
    ni.port_perm.resize(g.delta);
    std::iota(ni.port_perm.begin(), ni.port_perm.end(), 0);
    if (p.port_mode == PortMode::random) {
      SplitRng rng = substream(seed, {2, static_cast<uint64_t>(v)});
      rng.shuffle(ni.port_perm);
    }
    SplitRng bits = substream(seed, {3, static_cast<uint64_t>(v)});
    ni.private_bits.resize(p.R);
    for (int i = 0; i < p.R; ++i) ni.private_bits[i] = static_cast<uint8_t>(bits.bit());
  }
  SplitRng sh = substream(seed, {4});
  in.shared_bits.resize(p.R_shared);
  for (int i = 0; i < p.R_shared; ++i) in.shared_bits[i] = static_cast<uint8_t>(sh.bit());
  return in;
}

PortedGraph apply_port_permutations(const PortedGraph& g, const InputAssignment& in) {
  if (static_cast<int>(in.nodes.size()) != g.n) throw DomainError("assignment size != n");
  std::vector<std::vector<int>> inv(g.n, std::vector<int>(g.delta));
  for (int v = 0; v < g.n; ++v) {
    const std::vector<int>& perm = in.nodes[v].port_perm;
    if (static_cast<int>(perm.size()) != g.delta) throw DomainError("port permutation size != delta");
    for (int i = 0; i < g.delta; ++i) inv[v][perm[i]] = i;
  }
  PortedGraph eff = make_empty_graph(g.n, g.delta);
  eff.center = g.center;
  for (int v = 0; v < g.n; ++v)
    for (int i = 0; i < g.delta; ++i) {
      const PortEnd& e = g.adj[v][in.nodes[v].port_perm[i]];
      if (e.present()) eff.adj[v][i] = {e.node, inv[e.node][e.rev_port]};
    }
  validate_ports(eff);
  return eff;
}

std::pair<PortedGraph, InputAssignment> normalize_to_visible(const PortedGraph& g,
                                                             const InputAssignment& in) {
  PortedGraph eff = apply_port_permutations(g, in);
  InputAssignment flat = in;
  for (NodeInputs& ni : flat.nodes) std::iota(ni.port_perm.begin(), ni.port_perm.end(), 0);
  return {std::move(eff), std::move(flat)};
}

View extract_view(const PortedGraph& g, const InputAssignment& in, int v, int radius) {
  if (static_cast<int>(in.nodes.size()) != g.n) throw DomainError("assignment size != n");
  PortedGraph eff = apply_port_permutations(g, in);
  BallIndex bi = extract_ball_index(eff, v, radius);
  View view;
  view.ball = std::move(bi.ball);
  view.radius = radius;
  view.source_node = v;
  view.center_ports.resize(g.delta);
  for (int i = 0; i < g.delta; ++i) view.center_ports[i] = eff.adj[v][i].present();
  view.shared_bits = in.shared_bits;
  view.ids.resize(view.ball.n);
  view.private_bits.resize(view.ball.n);
  for (int k = 0; k < view.ball.n; ++k) {
    view.ids[k] = in.nodes[bi.nodes[k]].id;
    view.private_bits[k] = in.nodes[bi.nodes[k]].private_bits;
  }
  return view;
}

bool views_isomorphic(const View& a, const View& b) {
  if (a.radius != b.radius) return false;
  if (a.shared_bits != b.shared_bits) return false;
  if (a.center_ports != b.center_ports) return false;  // center map is pinned to identity
  std::optional<std::vector<int>> map = centered_port_isomorphism(a.ball, b.ball);
  if (!map) return false;
  for (int u = 0; u < a.ball.n; ++u) {
    int v = (*map)[u];
    if (a.ids[u] != b.ids[v] || a.private_bits[u] != b.private_bits[v]) return false;
  }
  return true;
}

AlgorithmDescriptor with_radius(AlgorithmDescriptor alg, int radius) {
  if (radius < alg.radius) throw DomainError("cannot shrink an algorithm's radius");
  alg.radius = radius;
  return alg;
}

HalfEdgeLabeling run_algorithm(const PortedGraph& g, const InputAssignment& in,
                               const AlgorithmDescriptor& alg) {
  if (!alg.rule) throw UsageError("algorithm has no rule");
  HalfEdgeLabeling lab;
  lab.n = g.n;
  lab.delta = g.delta;
  lab.labels.assign(g.n, std::vector<int>(g.delta, -1));
  for (int v = 0; v < g.n; ++v) {
    View view = extract_view(g, in, v, alg.radius);
    std::vector<int> out = alg.rule(view);
    if (static_cast<int>(out.size()) != g.delta)
      throw RuleViolation("rule emitted " + std::to_string(out.size()) + " labels at node " +
                          std::to_string(v) + ", expected " + std::to_string(g.delta));
    if (alg.kind == ProblemKind::grabbing) {
      int marks = 0;
      for (int i = 0; i < g.delta; ++i)
        if (view.center_ports[i] && out[i] == kLabelM) ++marks;
      if (marks != alg.bound)
        throw RuleViolation("grabbing rule marked " + std::to_string(marks) + " ports at node " +
                            std::to_string(v) + ", expected b=" + std::to_string(alg.bound));
    }
    const std::vector<int>& perm = in.nodes[v].port_perm;
    for (int i = 0; i < g.delta; ++i)
      if (view.center_ports[i]) lab.labels[v][perm[i]] = out[i];
  }
  return lab;
}

namespace {

std::string bits_to_str(const std::vector<uint8_t>& bits) {
  if (bits.empty()) return "-";
  std::string s;
  for (uint8_t b : bits) s += (b ? '1' : '0');
  return s;
}

std::vector<uint8_t> bits_from_str(const std::string& s) {
  std::vector<uint8_t> out;
  if (s == "-") return out;
  for (char c : s) {
    if (c != '0' && c != '1') throw DomainError("bad bit string '" + s + "'");
    out.push_back(c == '1');
  }
  return out;
}

}  // namespace

std::string inputs_to_string(const InputAssignment& in) {
  std::ostringstream os;
  os << "shared: " << bits_to_str(in.shared_bits) << '\n';
  os << "idspace: " << in.id_space << '\n';
  for (size_t v = 0; v < in.nodes.size(); ++v) {
    const NodeInputs& ni = in.nodes[v];
    os << v << ": " << ni.id << ' ';
    if (ni.port_perm.empty()) {
      os << '-';
    } else {
      for (size_t i = 0; i < ni.port_perm.size(); ++i)
        os << (i ? "," : "") << ni.port_perm[i];
    }
    os << ' ' << bits_to_str(ni.private_bits) << '\n';
  }
  return os.str();
}

InputAssignment inputs_from_string(const std::string& text) {
  std::istringstream is(text);
  std::string line, tok;
  InputAssignment in;
  if (!std::getline(is, line)) throw DomainError("empty inputs text");
  {
    std::istringstream row(line);
    if (!(row >> tok) || tok != "shared:") throw DomainError("missing shared header");
    row >> tok;
    in.shared_bits = bits_from_str(tok);
  }
  if (!std::getline(is, line)) throw DomainError("missing idspace header");
  {
    std::istringstream row(line);
    if (!(row >> tok) || tok != "idspace:") throw DomainError("missing idspace header");
    if (!(row >> in.id_space)) throw DomainError("bad idspace header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    NodeInputs ni;
    std::string perm_str, bits_str;
    if (!(row >> tok >> ni.id >> perm_str >> bits_str))
      throw DomainError("bad inputs row '" + line + "'");
    if (tok != std::to_string(in.nodes.size()) + ":")
      throw DomainError("bad inputs row label '" + tok + "'");
    if (perm_str != "-") {
      std::istringstream ps(perm_str);
      std::string item;
      while (std::getline(ps, item, ',')) ni.port_perm.push_back(std::stoi(item));
    }
    ni.private_bits = bits_from_str(bits_str);
    in.nodes.push_back(std::move(ni));
  }
  return in;
}

std::string labeling_to_string(const HalfEdgeLabeling& lab, ProblemKind kind) {
  std::ostringstream os;
  for (int v = 0; v < lab.n; ++v) {
    os << v << ':';
    for (int p = 0; p < lab.delta; ++p) {
      int l = lab.labels[v][p];
      if (l < 0)
        os << " -";
      else if (kind == ProblemKind::edge_coloring)
        os << ' ' << l;
      else
        os << ' ' << (l == kLabelM ? 'M' : 'U');
    }
    os << '\n';
  }
  return os.str();
}

HalfEdgeLabeling labeling_from_string(const std::string& text, ProblemKind kind) {
  std::istringstream is(text);
  std::string line, tok;
  std::vector<std::vector<int>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    if (!(row >> tok) || tok != std::to_string(rows.size()) + ":")
      throw DomainError("bad labeling row '" + line + "'");
    std::vector<int> r;
    while (row >> tok) {
      if (tok == "-")
        r.push_back(-1);
      else if (kind == ProblemKind::edge_coloring)
        r.push_back(std::stoi(tok));
      else if (tok == "M")
        r.push_back(kLabelM);
      else if (tok == "U")
        r.push_back(kLabelU);
      else
        throw DomainError("bad label token '" + tok + "'");
    }
    rows.push_back(std::move(r));
  }
  HalfEdgeLabeling lab;
  lab.n = static_cast<int>(rows.size());
  lab.delta = rows.empty() ? 0 : static_cast<int>(rows[0].size());
  for (const std::vector<int>& r : rows)
    if (static_cast<int>(r.size()) != lab.delta) throw DomainError("ragged labeling rows");
  lab.labels = std::move(rows);
  return lab;
}

}  // namespace grablab

#include "grablab/graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <queue>
#include <sstream>
#include <unordered_set>

#include "grablab/errors.hpp"
#include "grablab/rng.hpp"

namespace grablab {

std::vector<std::pair<int, int>> PortedGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int v = 0; v < n; ++v)
    for (int p = 0; p < delta; ++p)
      if (adj[v][p].present() && v < adj[v][p].node) out.emplace_back(v, p);
  return out;
}

PortedGraph make_empty_graph(int n, int delta) {
  if (n < 0 || delta < 0) throw DomainError("graph dimensions must be non-negative");
  PortedGraph g;
  g.n = n;
  g.delta = delta;
  g.adj.assign(n, std::vector<PortEnd>(delta));
  return g;
}

void add_edge_at(PortedGraph& g, int u, int pu, int v, int pv) {
  if (u < 0 || u >= g.n || v < 0 || v >= g.n) throw DomainError("edge endpoint out of range");
  if (u == v) throw DomainError("self-loops not allowed");
  if (pu < 0 || pu >= g.delta || pv < 0 || pv >= g.delta) throw DomainError("port out of range");
  if (g.adj[u][pu].present() || g.adj[v][pv].present()) throw DomainError("port already used");
  g.adj[u][pu] = {v, pv};
  g.adj[v][pv] = {u, pu};
}

static int lowest_free_port(const PortedGraph& g, int v) {
  for (int p = 0; p < g.delta; ++p)
    if (!g.adj[v][p].present()) return p;
  return -1;
}

void add_edge(PortedGraph& g, int u, int v) {
  int pu = lowest_free_port(g, u), pv = lowest_free_port(g, v);
  if (pu < 0 || pv < 0) throw DomainError("no free port for edge");
  add_edge_at(g, u, pu, v, pv);
}

void validate_ports(const PortedGraph& g) {
  if (static_cast<int>(g.adj.size()) != g.n) throw InvalidGraph("adjacency size != n");
  for (int v = 0; v < g.n; ++v) {
    if (static_cast<int>(g.adj[v].size()) != g.delta)
      throw InvalidGraph("port row size != delta at node " + std::to_string(v));
    std::unordered_set<int> seen;
    for (int p = 0; p < g.delta; ++p) {
      const PortEnd& e = g.adj[v][p];
      if (!e.present()) continue;
      if (e.node < 0 || e.node >= g.n || e.rev_port < 0 || e.rev_port >= g.delta)
        throw InvalidGraph("port target out of range at node " + std::to_string(v));
      if (e.node == v) throw InvalidGraph("self-loop at node " + std::to_string(v));
      const PortEnd& back = g.adj[e.node][e.rev_port];
      if (back.node != v || back.rev_port != p)
        throw InvalidGraph("reverse port mismatch on edge " + std::to_string(v) + "-" +
                           std::to_string(e.node));
      if (!seen.insert(e.node).second)
        throw InvalidGraph("parallel edge at node " + std::to_string(v));
    }
  }
  if (g.center >= g.n) throw InvalidGraph("center out of range");
}

bool is_regular(const PortedGraph& g) {
  for (int v = 0; v < g.n; ++v)
    if (g.degree(v) != g.delta) return false;
  return true;
}

PortedGraph generate_regular_graph(int n, int delta, uint64_t seed, int max_attempts) {
  if (delta < 2 || delta > n - 1)
    throw DomainError("degree must satisfy 2 <= delta <= n-1");
  if ((static_cast<long long>(n) * delta) % 2 != 0)
    throw ParityError("n*delta is odd: no " + std::to_string(delta) + "-regular graph on " +
                      std::to_string(n) + " nodes");
  std::vector<int> stubs;
  stubs.reserve(static_cast<size_t>(n) * delta);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    stubs.clear();
    for (int v = 0; v < n; ++v)
      for (int k = 0; k < delta; ++k) stubs.push_back(v);
    SplitRng rng = substream(seed, {0x67656eULL, static_cast<uint64_t>(attempt)});
    rng.shuffle(stubs);

    PortedGraph g = make_empty_graph(n, delta);
    std::vector<int> next_port(n, 0);
    std::unordered_set<uint64_t> have;
    bool ok = true;
    for (size_t i = 0; i + 1 < stubs.size() && ok; i += 2) {
      int a = stubs[i], b = stubs[i + 1];
      if (a == b) { ok = false; break; }                      // loop
      uint64_t key = static_cast<uint64_t>(std::min(a, b)) * n + std::max(a, b);
      if (!have.insert(key).second) { ok = false; break; }    // parallel edge
      int pa = next_port[a]++, pb = next_port[b]++;
      g.adj[a][pa] = {b, pb};
      g.adj[b][pb] = {a, pa};
    }
    if (!ok) continue;
    validate_ports(g);
    return g;
  }
  throw ExhaustedAttempts("no simple pairing after " + std::to_string(max_attempts) +
                          " attempts (n=" + std::to_string(n) +
                          ", delta=" + std::to_string(delta) + ")");
}

namespace {

// One BFS girth probe from s. Returns the best (smallest) closed-walk length
// found and the edge (u,w) that closed it; every reported value is >= girth,
// and min over all sources equals girth.
struct GirthProbe {
  int len = INT32_MAX;
  int u = -1, w = -1;
};

GirthProbe girth_probe(const PortedGraph& g, int s, std::vector<int>& dist,
                       std::vector<int>& parent) {
  dist.assign(g.n, -1);
  parent.assign(g.n, -1);
  GirthProbe best;
  std::queue<int> q;
  dist[s] = 0;
  q.push(s);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (const PortEnd& e : g.adj[u]) {
      if (!e.present()) continue;
      int w = e.node;
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        parent[w] = u;
        q.push(w);
      } else if (w != parent[u] && parent[w] != u) {
        int len = dist[u] + dist[w] + 1;
        if (len < best.len) { best.len = len; best.u = u; best.w = w; }
      }
    }
  }
  return best;
}

}  // namespace

GirthResult compute_girth(const PortedGraph& g) {
  std::vector<int> dist, parent;
  int best_len = INT32_MAX, best_s = -1;
  for (int s = 0; s < g.n; ++s) {
    GirthProbe p = girth_probe(g, s, dist, parent);
    if (p.len < best_len) { best_len = p.len; best_s = s; }
    if (best_len == 3) break;
  }
  GirthResult out;
  if (best_s < 0) return out;  // acyclic

  // Rebuild the witness cycle from the winning source.
  GirthProbe p = girth_probe(g, best_s, dist, parent);
  std::vector<int> a, b;
  for (int x = p.u; x >= 0; x = parent[x]) a.push_back(x);
  for (int x = p.w; x >= 0; x = parent[x]) b.push_back(x);
  std::reverse(a.begin(), a.end());  // s .. u
  std::reverse(b.begin(), b.end());  // s .. w
  std::vector<int> cycle(a.begin(), a.end());
  for (size_t i = b.size(); i > 1; --i) cycle.push_back(b[i - 1]);

  // Re-verify: distinct nodes, consecutive edges present, closing edge present.
  if (static_cast<int>(cycle.size()) != best_len) throw InvalidGraph("girth witness length mismatch");
  std::unordered_set<int> uniq(cycle.begin(), cycle.end());
  if (uniq.size() != cycle.size()) throw InvalidGraph("girth witness not a simple cycle");
  for (size_t i = 0; i < cycle.size(); ++i) {
    int x = cycle[i], y = cycle[(i + 1) % cycle.size()];
    bool found = false;
    for (const PortEnd& e : g.adj[x]) found |= (e.present() && e.node == y);
    if (!found) throw InvalidGraph("girth witness uses a missing edge");
  }
  out.girth = best_len;
  out.cycle = cycle;
  return out;
}

int greedy_independence_lower(const PortedGraph& g) {
  std::vector<char> alive(g.n, 1);
  std::vector<int> deg(g.n, 0);
  for (int v = 0; v < g.n; ++v) deg[v] = g.degree(v);
  int count = 0, remaining = g.n;
  while (remaining > 0) {
    int pick = -1;
    for (int v = 0; v < g.n; ++v)
      if (alive[v] && (pick < 0 || deg[v] < deg[pick])) pick = v;
    ++count;
    alive[pick] = 0;
    --remaining;
    for (const PortEnd& e : g.adj[pick]) {
      if (!e.present() || !alive[e.node]) continue;
      alive[e.node] = 0;
      --remaining;
      for (const PortEnd& f : g.adj[e.node])
        if (f.present() && alive[f.node]) --deg[f.node];
    }
  }
  return count;
}

namespace {

struct MisSolver {
  const std::vector<uint64_t>& nb;
  int best = 0;

  void go(uint64_t pool, int cur) {
    int cnt = std::popcount(pool);
    if (cur + cnt <= best) return;
    if (pool == 0) { best = std::max(best, cur); return; }
    // Pivot on the max-degree vertex in the pool; isolated vertices are free.
    int pivot = -1, pivot_deg = -1;
    uint64_t scan = pool;
    while (scan) {
      int v = std::countr_zero(scan);
      scan &= scan - 1;
      int d = std::popcount(nb[v] & pool);
      if (d == 0) {  // take all isolated vertices at once
        go(pool & ~(uint64_t{1} << v), cur + 1);
        return;
      }
      if (d > pivot_deg) { pivot_deg = d; pivot = v; }
    }
    uint64_t bit = uint64_t{1} << pivot;
    go(pool & ~(nb[pivot] | bit), cur + 1);  // include pivot
    go(pool & ~bit, cur);                    // exclude pivot
  }
};

}  // namespace

int exact_independence_number(const PortedGraph& g, int node_limit) {
  if (g.n > node_limit || g.n > 64)
    throw SizeTooLarge("exact independence limited to n <= " +
                       std::to_string(std::min(node_limit, 64)) + ", got n=" +
                       std::to_string(g.n));
  std::vector<uint64_t> nb(g.n, 0);
  for (int v = 0; v < g.n; ++v)
    for (const PortEnd& e : g.adj[v])
      if (e.present()) nb[v] |= uint64_t{1} << e.node;
  MisSolver solver{nb};
  solver.best = greedy_independence_lower(g) - 1;  // greedy is feasible; BnB re-proves it
  uint64_t all = (g.n == 64) ? ~uint64_t{0} : ((uint64_t{1} << g.n) - 1);
  solver.go(all, 0);
  return solver.best;
}

GraphDiagnostics compute_diagnostics(const PortedGraph& g, int exact_threshold, double rho,
                                     double eps) {
  GraphDiagnostics d;
  d.n = g.n;
  d.delta = g.delta;
  GirthResult gr = compute_girth(g);
  d.girth = gr.girth;
  d.girth_cycle = gr.cycle;
  d.independence_lower = greedy_independence_lower(g);
  if (g.n <= exact_threshold && g.n <= 64)
    d.independence_exact = exact_independence_number(g, exact_threshold);
  if (g.n > 1 && g.delta > 1) {
    d.girth_floor = eps * std::log(static_cast<double>(g.n)) / std::log(static_cast<double>(g.delta));
    d.independence_ceiling = rho * g.n * std::log(static_cast<double>(g.delta)) / g.delta;
  }
  return d;
}

BallIndex extract_ball_index(const PortedGraph& g, int v, int radius) {
  if (v < 0 || v >= g.n) throw DomainError("ball center out of range");
  if (radius < 0) throw DomainError("ball radius must be >= 0");
  std::vector<int> dist(g.n, -1), idx(g.n, -1);
  BallIndex out;
  std::queue<int> q;
  dist[v] = 0;
  idx[v] = 0;
  out.nodes.push_back(v);
  out.dist.push_back(0);
  q.push(v);
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    if (dist[u] == radius) continue;
    for (const PortEnd& e : g.adj[u]) {
      if (!e.present() || dist[e.node] >= 0) continue;
      dist[e.node] = dist[u] + 1;
      idx[e.node] = static_cast<int>(out.nodes.size());
      out.nodes.push_back(e.node);
      out.dist.push_back(dist[e.node]);
      q.push(e.node);
    }
  }
  out.ball = make_empty_graph(static_cast<int>(out.nodes.size()), g.delta);
  out.ball.center = 0;
  for (int bi = 0; bi < out.ball.n; ++bi) {
    int u = out.nodes[bi];
    for (int p = 0; p < g.delta; ++p) {
      const PortEnd& e = g.adj[u][p];
      if (!e.present() || idx[e.node] < 0) continue;
      if (out.dist[bi] <= radius - 1 || dist[e.node] <= radius - 1)
        out.ball.adj[bi][p] = {idx[e.node], e.rev_port};
    }
  }
  return out;
}

PortedGraph extract_ball(const PortedGraph& g, int v, int radius) {
  return extract_ball_index(g, v, radius).ball;
}

PortedGraph extend_ball_to_tree(const PortedGraph& ball, long long n_target, int delta) {
  validate_ports(ball);
  if (!ball.has_center()) throw DomainError("tree extension needs a centered ball");
  if (n_target < ball.n) throw DomainError("n_target smaller than the ball");
  if (n_target > 2'000'000) throw DomainError("n_target too large");
  for (int v = 0; v < ball.n; ++v)
    if (ball.degree(v) > delta) throw DomainError("ball degree exceeds delta");

  // Tree check: connected from the center with exactly n-1 edges.
  std::vector<int> dist(ball.n, -1);
  std::queue<int> q;
  dist[ball.center] = 0;
  q.push(ball.center);
  int reached = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (const PortEnd& e : ball.adj[u])
      if (e.present() && dist[e.node] < 0) {
        dist[e.node] = dist[u] + 1;
        ++reached;
        q.push(e.node);
      }
  }
  if (reached != ball.n || ball.edge_count() != ball.n - 1)
    throw NotAcyclic("ball is not a tree (cycle or disconnected part)");
  int ecc = 0;
  for (int v = 0; v < ball.n; ++v) ecc = std::max(ecc, dist[v]);

  PortedGraph out = make_empty_graph(static_cast<int>(n_target), delta);
  out.center = ball.center;
  for (int v = 0; v < ball.n; ++v)
    for (int p = 0; p < ball.delta; ++p)
      if (ball.adj[v][p].present()) {
        if (p >= delta) throw DomainError("ball port index exceeds delta");
        out.adj[v][p] = ball.adj[v][p];
      }

  // Attach fresh leaves only at depth >= ecc so the radius-ecc ball around
  // the center never changes; FIFO growth keeps the tree layered.
  std::queue<int> attach;
  for (int v = 0; v < ball.n; ++v)
    if (dist[v] >= ecc && out.degree(v) < delta) attach.push(v);
  int next = ball.n;
  while (next < out.n) {
    while (!attach.empty() && out.degree(attach.front()) >= delta) attach.pop();
    if (attach.empty())
      throw CannotReach("no attachment point left before reaching n_target");
    int u = attach.front();
    int z = next++;
    add_edge_at(out, u, lowest_free_port(out, u), z, 0);
    if (delta > 1) attach.push(z);
  }
  validate_ports(out);
  return out;
}

std::optional<std::vector<int>> centered_port_isomorphism(const PortedGraph& a,
                                                          const PortedGraph& b) {
  if (!a.has_center() || !b.has_center())
    throw DomainError("isomorphism check needs centered balls");
  if (a.n != b.n || a.delta != b.delta) return std::nullopt;
  std::vector<int> map(a.n, -1);
  std::vector<char> used(b.n, 0);
  std::queue<int> q;
  map[a.center] = b.center;
  used[b.center] = 1;
  q.push(a.center);
  int mapped = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    int v = map[u];
    for (int p = 0; p < a.delta; ++p) {
      const PortEnd& ea = a.adj[u][p];
      const PortEnd& eb = b.adj[v][p];
      if (ea.present() != eb.present()) return std::nullopt;
      if (!ea.present()) continue;
      if (ea.rev_port != eb.rev_port) return std::nullopt;
      if (map[ea.node] < 0) {
        if (used[eb.node]) return std::nullopt;
        map[ea.node] = eb.node;
        used[eb.node] = 1;
        ++mapped;
        q.push(ea.node);
      } else if (map[ea.node] != eb.node) {
        return std::nullopt;
      }
    }
  }
  if (mapped != a.n) return std::nullopt;
  return map;
}

bool balls_isomorphic(const PortedGraph& a, const PortedGraph& b) {
  return centered_port_isomorphism(a, b).has_value();
}

std::string graph_to_string(const PortedGraph& g) {
  std::ostringstream os;
  os << g.n << ' ' << g.delta;
  if (g.has_center()) os << ' ' << g.center;
  os << '\n';
  for (int v = 0; v < g.n; ++v) {
    os << v << ':';
    for (int p = 0; p < g.delta; ++p) {
      const PortEnd& e = g.adj[v][p];
      if (e.present())
        os << ' ' << e.node << '/' << e.rev_port;
      else
        os << " -";
    }
    os << '\n';
  }
  return os.str();
}

PortedGraph graph_from_string(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line)) throw InvalidGraph("empty graph text");
  std::istringstream head(line);
  int n = -1, delta = -1, center = -1;
  if (!(head >> n >> delta)) throw InvalidGraph("bad graph header");
  head >> center;  // optional third token
  if (n < 0 || delta < 0) throw InvalidGraph("bad graph header");
  PortedGraph g = make_empty_graph(n, delta);
  g.center = center;
  for (int v = 0; v < n; ++v) {
    if (!std::getline(is, line)) throw InvalidGraph("missing row for node " + std::to_string(v));
    std::istringstream row(line);
    std::string tok;
    if (!(row >> tok) || tok != std::to_string(v) + ":")
      throw InvalidGraph("bad row label at node " + std::to_string(v));
    for (int p = 0; p < delta; ++p) {
      if (!(row >> tok)) throw InvalidGraph("missing port entry at node " + std::to_string(v));
      if (tok == "-") continue;
      size_t slash = tok.find('/');
      if (slash == std::string::npos)
        throw InvalidGraph("bad port entry '" + tok + "' at node " + std::to_string(v));
      try {
        g.adj[v][p].node = std::stoi(tok.substr(0, slash));
        g.adj[v][p].rev_port = std::stoi(tok.substr(slash + 1));
      } catch (const std::exception&) {
        throw InvalidGraph("bad port entry '" + tok + "' at node " + std::to_string(v));
      }
    }
    if (row >> tok) throw InvalidGraph("trailing tokens at node " + std::to_string(v));
  }
  validate_ports(g);
  return g;
}

void save_graph(const PortedGraph& g, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for write: " + path);
  f << graph_to_string(g);
  if (!f) throw IoError("write failed: " + path);
}

PortedGraph load_graph(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open for read: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return graph_from_string(ss.str());
}

}  // namespace grablab

#include "grablab/baselines.hpp"

#include <algorithm>
#include <queue>

#include "grablab/errors.hpp"
#include "grablab/reductions.hpp"
#include "grablab/rng.hpp"

namespace grablab {

namespace {

uint64_t node_entropy(const View& view, int ball_node, uint64_t salt) {
  uint64_t h = mix2(salt, view.ids[ball_node]);
  for (uint8_t b : view.private_bits[ball_node]) h = mix2(h, b + 2);
  return h;
}

std::vector<int> center_port_list(const View& view) {
  std::vector<int> out;
  for (int p = 0; p < view.ball.delta; ++p)
    if (view.center_ports[p]) out.push_back(p);
  return out;
}

// Distinct pseudo-random picks: partial Fisher-Yates over `pool`.
std::vector<int> pick_distinct(std::vector<int> pool, int count, SplitRng& rng) {
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
    out.push_back(pool[i]);
  }
  return out;
}

}  // namespace

AlgorithmDescriptor baseline_port_first(int b) {
  AlgorithmDescriptor alg;
  alg.name = "port1";
  alg.radius = 0;
  alg.kind = ProblemKind::grabbing;
  alg.bound = b;
  alg.rule = [b](const View& view) {
    std::vector<int> out(view.ball.delta, kLabelU);
    std::vector<int> ports = center_port_list(view);
    if (static_cast<int>(ports.size()) < b)
      throw RuleViolation("degree below b at the center");
    for (int i = 0; i < b; ++i) out[ports[i]] = kLabelM;
    return out;
  };
  return alg;
}

AlgorithmDescriptor baseline_uniform_grab(int b) {
  AlgorithmDescriptor alg;
  alg.name = "uniform";
  alg.radius = 0;
  alg.kind = ProblemKind::grabbing;
  alg.bound = b;
  alg.rule = [b](const View& view) {
    std::vector<int> out(view.ball.delta, kLabelU);
    std::vector<int> ports = center_port_list(view);
    if (static_cast<int>(ports.size()) < b)
      throw RuleViolation("degree below b at the center");
    SplitRng rng(node_entropy(view, 0, 0x756e69ULL), {});
    for (int p : pick_distinct(ports, b, rng)) out[p] = kLabelM;
    return out;
  };
  return alg;
}

AlgorithmDescriptor baseline_proposal_matching(int T, int b) {
  if (T < 0) throw DomainError("rounds must be >= 0");
  AlgorithmDescriptor alg;
  alg.name = "proposal" + std::to_string(T);
  alg.radius = T;
  alg.kind = ProblemKind::matching;
  alg.bound = b;
  alg.rule = [T, b](const View& view) {
    const PortedGraph& ball = view.ball;
    // BFS distances inside the ball; states at round t are computed only for
    // nodes at distance <= T - t, which is exactly where the view pins them.
    std::vector<int> dist(ball.n, -1);
    std::queue<int> q;
    dist[0] = 0;
    q.push(0);
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (const PortEnd& e : ball.adj[u])
        if (e.present() && dist[e.node] < 0) {
          dist[e.node] = dist[u] + 1;
          q.push(e.node);
        }
    }
    std::vector<std::vector<char>> matched(ball.n, std::vector<char>(ball.delta, 0));
    std::vector<int> m(ball.n, 0), propose(ball.n, -1);
    for (int t = 1; t <= T; ++t) {
      // Proposals need the proposer's state at round t-1.
      for (int u = 0; u < ball.n; ++u) {
        propose[u] = -1;
        if (dist[u] > T - t + 1 || m[u] >= b) continue;
        // Interior nodes see their true port list; boundary nodes are taken
        // to have all delta ports (regular-graph assumption).
        std::vector<int> free;
        for (int p = 0; p < ball.delta; ++p) {
          bool known = ball.adj[u][p].present() || dist[u] > view.radius - 1;
          if (known && !matched[u][p]) free.push_back(p);
        }
        if (free.empty()) continue;
        SplitRng rng(node_entropy(view, u, mix2(0x70726fULL, t)), {});
        propose[u] = free[rng.below(free.size())];
      }
      // Mutual proposals match; only states the view determines are updated.
      for (int u = 0; u < ball.n; ++u) {
        if (dist[u] > T - t || propose[u] < 0) continue;
        const PortEnd& e = ball.adj[u][propose[u]];
        if (!e.present()) continue;
        if (propose[e.node] == e.rev_port && !matched[u][propose[u]]) {
          matched[u][propose[u]] = 1;
          ++m[u];
        }
      }
    }
    std::vector<int> out(ball.delta, kLabelU);
    for (int p = 0; p < ball.delta; ++p)
      if (matched[0][p]) out[p] = kLabelM;
    return out;
  };
  return alg;
}

AlgorithmDescriptor baseline_by_name(const std::string& name, int T, int b) {
  if (name == "port1") return with_radius(baseline_port_first(b), T);
  if (name == "uniform") return with_radius(baseline_uniform_grab(b), T);
  if (name == "proposal") return matching_to_grabbing(baseline_proposal_matching(T, b));
  throw UsageError("unknown baseline '" + name + "' (expected port1|uniform|proposal)");
}

}  // namespace grablab

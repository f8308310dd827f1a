#include "grablab/self_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <optional>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "grablab/errors.hpp"
#include "grablab/problems.hpp"
#include "grablab/rng.hpp"

namespace grablab {

namespace {

constexpr double kZ99 = 2.5758293035489004;  // two-sided 99% normal quantile

// Odometer over the (id, private bits) combinations of a node set. Digit k
// encodes node k's bits in the low R bits and its id above them, so each
// advance rewrites exactly the nodes whose digits changed.
class NodeEnum {
 public:
  NodeEnum(std::vector<int> nodes, uint64_t id_space, int R)
      : nodes_(std::move(nodes)), top_((id_space << R) - 1), R_(R), digits_(nodes_.size(), 0) {}

  void reset(InputAssignment& a) {
    std::fill(digits_.begin(), digits_.end(), 0);
    for (size_t k = 0; k < nodes_.size(); ++k) write(a, k);
  }

  bool advance(InputAssignment& a) {
    for (size_t k = 0; k < nodes_.size(); ++k) {
      if (digits_[k] < top_) {
        ++digits_[k];
        write(a, k);
        return true;
      }
      digits_[k] = 0;
      write(a, k);
    }
    return false;
  }

 private:
  void write(InputAssignment& a, size_t k) const {
    NodeInputs& ni = a.nodes[nodes_[k]];
    uint64_t d = digits_[k];
    for (int j = 0; j < R_; ++j) ni.private_bits[j] = (d >> j) & 1u;
    ni.id = 1 + (d >> R_);
  }

  std::vector<int> nodes_;
  uint64_t top_;
  int R_;
  std::vector<uint64_t> digits_;
};

// Runs body once per combination; returns the combination count.
template <class F>
long long for_each_combo(NodeEnum& en, InputAssignment& a, F&& body) {
  en.reset(a);
  long long count = 0;
  do {
    body();
    ++count;
  } while (en.advance(a));
  return count;
}

template <class F>
long long for_each_shared(InputAssignment& a, F&& body) {
  const int rs = static_cast<int>(a.shared_bits.size());
  const uint64_t total = 1ull << rs;
  for (uint64_t s = 0; s < total; ++s) {
    for (int j = 0; j < rs; ++j) a.shared_bits[j] = (s >> j) & 1u;
    body();
  }
  return static_cast<long long>(total);
}

// Within one experiment (topology and ports frozen), a view's outputs are
// pinned by (source node, radius, contents); the key packs exactly that.
void pack_view_key(const View& v, std::vector<uint64_t>& key) {
  key.clear();
  key.reserve(2 + 2 * v.ids.size() + 1);
  key.push_back(static_cast<uint64_t>(v.source_node));
  key.push_back(static_cast<uint64_t>(v.radius));
  for (uint64_t id : v.ids) key.push_back(id);
  for (const std::vector<uint8_t>& bits : v.private_bits) {
    uint64_t w = 1;  // leading sentinel keeps different lengths distinct
    for (uint8_t b : bits) w = (w << 1) | b;
    key.push_back(w);
  }
  uint64_t w = 1;
  for (uint8_t b : v.shared_bits) w = (w << 1) | b;
  key.push_back(w);
}

struct KeyHash {
  size_t operator()(const std::vector<uint64_t>& k) const {
    uint64_t h = 0x9e3779b97f4a7c15ULL;
    for (uint64_t word : k) h = mix2(h, word);
    return static_cast<size_t>(h);
  }
};

uint64_t view_content_hash(const View& v) {
  std::vector<uint64_t> key;
  pack_view_key(v, key);
  return KeyHash{}(key);
}

std::vector<int> sorted_ball_nodes(ExperimentContext& ctx, int v, int radius) {
  std::vector<int> s = ctx.skeleton(v, radius).bi.nodes;
  std::sort(s.begin(), s.end());
  return s;
}

std::vector<int> set_inter(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> set_minus(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

struct PairTerms {
  double mm = 0, mu = 0;
};

// E[both grab] and E[exactly one grabs] for half-edges (u,pu) and (w,pw),
// over the inputs of O (jointly) and of A, B (independently: A and B are
// disjoint from each other's balls by construction). Conditioning on
// anything outside O/A/B is whatever `a` currently holds.
template <class EvalU, class EvalW>
PairTerms pair_core(ExperimentContext& ctx, InputAssignment& a, const std::vector<int>& O,
                    const std::vector<int>& A, const std::vector<int>& B, int u, int pu, int w,
                    int pw, EvalU&& eval_u, EvalW&& eval_w) {
  const uint64_t K = ctx.id_space();
  const int R = ctx.params().R;
  NodeEnum en_o(O, K, R), en_a(A, K, R), en_b(B, K, R);
  double mm = 0, mu = 0;
  long long outer = for_each_combo(en_o, a, [&] {
    long long ca = 0, cb = 0;
    long long na = for_each_combo(en_a, a, [&] { ca += eval_u(a, u, pu); });
    long long nb = for_each_combo(en_b, a, [&] { cb += eval_w(a, w, pw); });
    const double px = static_cast<double>(ca) / static_cast<double>(na);
    const double py = static_cast<double>(cb) / static_cast<double>(nb);
    mm += px * py;
    mu += px * (1 - py) + (1 - px) * py;
  });
  return {mm / static_cast<double>(outer), mu / static_cast<double>(outer)};
}

void require_grabbing(const AlgorithmDescriptor& alg, const char* what) {
  if (alg.kind != ProblemKind::grabbing)
    throw UsageError(std::string(what) + " requires a grabbing algorithm");
  if (!alg.rule) throw UsageError(std::string(what) + ": algorithm has no rule");
}

}  // namespace

std::vector<int> preferred_directions(const std::vector<double>& x, int b) {
  if (b < 0 || b > static_cast<int>(x.size()))
    throw UsageError("preferred_directions: b out of range");
  std::vector<int> idx(x.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int l, int r) { return x[l] > x[r]; });
  idx.resize(b);
  std::sort(idx.begin(), idx.end());
  return idx;
}

ExperimentContext::ExperimentContext(const PortedGraph& g, const InputAssignment& in,
                                     const LocalModelParams& params)
    : params_(params) {
  auto norm = normalize_to_visible(g, in);
  eff_ = std::move(norm.first);
  base_ = std::move(norm.second);
}

std::shared_ptr<ExperimentContext> ExperimentContext::create(const PortedGraph& g, uint64_t seed,
                                                             const LocalModelParams& params) {
  return std::make_shared<ExperimentContext>(g, assign_inputs(g, seed, params), params);
}

uint64_t ExperimentContext::node_combos() const { return base_.id_space << params_.R; }

double ExperimentContext::bits_per_node() const {
  return params_.R + std::log2(static_cast<double>(base_.id_space));
}

void ExperimentContext::check_budget(double bits, const std::string& what) const {
  if (bits > params_.budget_cap_bits + 1e-9) {
    std::ostringstream os;
    os << what << " would enumerate 2^" << bits << " input combinations; cap is 2^"
       << params_.budget_cap_bits << " (budget_cap_bits)";
    throw BudgetTooLarge(os.str());
  }
}

ExperimentContext::Skeleton& ExperimentContext::skeleton(int v, int radius) {
  auto it = skeletons_.find({v, radius});
  if (it != skeletons_.end()) return it->second;
  Skeleton sk;
  sk.bi = extract_ball_index(eff_, v, radius);
  sk.proto.ball = sk.bi.ball;
  sk.proto.radius = radius;
  sk.proto.source_node = v;
  sk.proto.center_ports.resize(eff_.delta);
  for (int i = 0; i < eff_.delta; ++i) sk.proto.center_ports[i] = eff_.adj[v][i].present();
  const size_t m = sk.bi.nodes.size();
  sk.proto.ids.resize(m);
  sk.proto.private_bits.assign(m, std::vector<uint8_t>(params_.R));
  sk.proto.shared_bits.resize(params_.R_shared);
  return skeletons_.emplace(std::pair<int, int>{v, radius}, std::move(sk)).first->second;
}

void ExperimentContext::load_proto(Skeleton& sk, const InputAssignment& a) {
  const size_t m = sk.bi.nodes.size();
  for (size_t k = 0; k < m; ++k) {
    const NodeInputs& ni = a.nodes[sk.bi.nodes[k]];
    sk.proto.ids[k] = ni.id;
    sk.proto.private_bits[k].assign(ni.private_bits.begin(), ni.private_bits.end());
  }
  sk.proto.shared_bits.assign(a.shared_bits.begin(), a.shared_bits.end());
}

ExperimentContext::ScratchLease::ScratchLease(ExperimentContext& ctx) : ctx_(ctx) {
  if (!ctx.pool_.empty()) {
    a_ = std::move(ctx.pool_.back());
    ctx.pool_.pop_back();
  } else {
    // Stale contents are fine: every enumeration writes the nodes it exposes.
    a_ = std::make_unique<InputAssignment>(ctx.base_);
  }
}

ExperimentContext::ScratchLease::~ScratchLease() { ctx_.pool_.push_back(std::move(a_)); }

DirectionStats profile_for_view(ExperimentContext& ctx, const View& view,
                                const AlgorithmDescriptor& alg, const ProfileOptions& opts) {
  require_grabbing(alg, "direction profile");
  const int T = alg.radius;
  if (T < 1) throw UsageError("direction profile: algorithm radius must be >= 1");
  if (view.radius != T - 1)
    throw UsageError("direction profile: conditioning view must have radius T-1");
  const int v = view.source_node;
  if (v < 0 || v >= ctx.graph().n)
    throw UsageError("direction profile: view is not anchored in the experiment graph");

  ExperimentContext::Skeleton& sk_t = ctx.skeleton(v, T);
  const size_t inner = ctx.skeleton(v, T - 1).bi.nodes.size();
  if (view.ids.size() != inner)
    throw UsageError("direction profile: view does not match the experiment topology");

  // Conditioning: the (T-1)-view pins the inputs of N_{T-1}[v] and the
  // shared bits; the frontier N_T[v] \ N_{T-1}[v] is marginalized.
  ExperimentContext::ScratchLease lease(ctx);
  InputAssignment& a = *lease;
  for (size_t k = 0; k < inner; ++k) {
    NodeInputs& ni = a.nodes[sk_t.bi.nodes[k]];
    ni.id = view.ids[k];
    ni.private_bits.assign(view.private_bits[k].begin(), view.private_bits[k].end());
  }
  a.shared_bits.assign(view.shared_bits.begin(), view.shared_bits.end());

  const std::vector<int> frontier(sk_t.bi.nodes.begin() + static_cast<long>(inner),
                                  sk_t.bi.nodes.end());
  const int delta = ctx.graph().delta;
  const int b = alg.bound;
  std::vector<int> present;
  for (int i = 0; i < delta; ++i)
    if (sk_t.proto.center_ports[i]) present.push_back(i);
  if (static_cast<int>(present.size()) < b)
    throw RuleViolation("direction profile: center degree below b");

  std::vector<double> counts(delta, 0.0);
  long long total = 0;
  auto tally = [&] {
    ctx.load_proto(sk_t, a);
    std::vector<int> out = alg.rule(sk_t.proto);
    if (static_cast<int>(out.size()) != delta)
      throw RuleViolation("rule emitted " + std::to_string(out.size()) + " labels, expected " +
                          std::to_string(delta));
    int marks = 0;
    for (int i : present)
      if (out[i] == kLabelM) {
        counts[i] += 1.0;
        ++marks;
      }
    if (marks != b)
      throw RuleViolation("rule marked " + std::to_string(marks) + " ports, expected b=" +
                          std::to_string(b));
  };

  if (opts.mode == EstimateMode::exact) {
    std::ostringstream what;
    what << "exact direction profile at node " << v << " (frontier of " << frontier.size()
         << " nodes)";
    ctx.check_budget(static_cast<double>(frontier.size()) * ctx.bits_per_node(), what.str());
    NodeEnum en(frontier, ctx.id_space(), ctx.params().R);
    total = for_each_combo(en, a, tally);
  } else {
    if (opts.samples < 1) throw UsageError("direction profile: samples must be >= 1");
    const uint64_t root = mix2(opts.seed, view_content_hash(view));
    const uint64_t K = ctx.id_space();
    const int R = ctx.params().R;
    for (long long s = 0; s < opts.samples; ++s) {
      for (size_t k = 0; k < frontier.size(); ++k) {
        SplitRng rng = substream(root, {static_cast<uint64_t>(s), static_cast<uint64_t>(k)});
        NodeInputs& ni = a.nodes[frontier[k]];
        ni.id = 1 + rng.below(K);
        for (int j = 0; j < R; ++j) ni.private_bits[j] = static_cast<uint8_t>(rng.bit());
      }
      tally();
    }
    total = opts.samples;
  }

  DirectionStats st;
  st.mode = opts.mode;
  st.x.assign(delta, 0.0);
  for (int i : present) st.x[i] = counts[i] / static_cast<double>(total);
  std::vector<int> cand = present;  // b largest, ties toward the smaller index
  std::stable_sort(cand.begin(), cand.end(), [&](int l, int r) { return st.x[l] > st.x[r]; });
  cand.resize(b);
  std::sort(cand.begin(), cand.end());
  st.preferred = std::move(cand);
  for (int i : present) st.S += st.x[i];
  for (int i : st.preferred) st.S_top += st.x[i];
  st.S_rest = st.S - st.S_top;
  if (opts.mode == EstimateMode::monte_carlo) {
    st.samples = total;
    st.stderrs.assign(delta, 0.0);
    for (int i : present)
      st.stderrs[i] =
          std::sqrt(std::max(0.0, st.x[i] * (1.0 - st.x[i]) / static_cast<double>(total)));
  }
  return st;
}

DirectionStats estimate_direction_profile(ExperimentContext& ctx, int v,
                                          const AlgorithmDescriptor& alg,
                                          const ProfileOptions& opts) {
  require_grabbing(alg, "direction profile");
  if (alg.radius < 1) throw UsageError("direction profile: algorithm radius must be >= 1");
  if (v < 0 || v >= ctx.graph().n) throw UsageError("direction profile: node out of range");
  ExperimentContext::Skeleton& sk = ctx.skeleton(v, alg.radius - 1);
  ctx.load_proto(sk, ctx.base());
  return profile_for_view(ctx, sk.proto, alg, opts);
}

AlgorithmDescriptor derive_one_round_faster(std::shared_ptr<ExperimentContext> ctx,
                                            const AlgorithmDescriptor& alg,
                                            const ProfileOptions& opts) {
  if (!ctx) throw UsageError("derive_one_round_faster: null experiment context");
  require_grabbing(alg, "derive_one_round_faster");
  if (alg.radius < 1) throw UsageError("cannot derive below radius 0");

  using Memo = std::unordered_map<std::vector<uint64_t>, std::vector<int>, KeyHash>;
  auto memo = std::make_shared<Memo>();
  auto parent = std::make_shared<AlgorithmDescriptor>(alg);

  AlgorithmDescriptor d;
  d.name = alg.name + "-1";
  d.radius = alg.radius - 1;
  d.kind = ProblemKind::grabbing;
  d.bound = alg.bound;
  d.rule = [ctx, parent, opts, memo](const View& view) {
    std::vector<uint64_t> key;
    pack_view_key(view, key);  // read fully before any nested enumeration
    auto it = memo->find(key);
    if (it != memo->end()) return it->second;
    DirectionStats st = profile_for_view(*ctx, view, *parent, opts);
    std::vector<int> out(view.ball.delta, kLabelU);
    for (int i : st.preferred) out[i] = kLabelM;
    memo->emplace(std::move(key), out);
    return out;
  };
  return d;
}

BadnessEstimate measure_badness(const PortedGraph& g, const LocalModelParams& params,
                                const AlgorithmDescriptor& alg, long long trials, uint64_t seed) {
  require_grabbing(alg, "measure_badness");
  if (trials < 1) throw UsageError("measure_badness: trials must be >= 1");
  std::optional<InputAssignment> frozen;
  double sum = 0, sumsq = 0;
  for (long long t = 0; t < trials; ++t) {
    InputAssignment a = assign_inputs(g, mix2(seed, 0x747269616cULL + static_cast<uint64_t>(t)),
                                      params);
    if (params.port_mode == PortMode::random && !params.resample_ports_per_trial) {
      if (!frozen) frozen = assign_inputs(g, seed, params);
      for (int v = 0; v < g.n; ++v) a.nodes[v].port_perm = frozen->nodes[v].port_perm;
    }
    HalfEdgeLabeling lab = run_algorithm(g, a, alg);
    GrabbingScore sc = score_grabbing(g, lab, alg.bound);
    sum += sc.p;
    sumsq += sc.p * sc.p;
  }
  BadnessEstimate e;
  e.trials = trials;
  e.mean = sum / static_cast<double>(trials);
  const double var =
      trials > 1 ? std::max(0.0, (sumsq - trials * e.mean * e.mean) / (trials - 1.0)) : 0.0;
  e.sd = std::sqrt(var);
  const double half = kZ99 * e.sd / std::sqrt(static_cast<double>(trials));
  e.ci_low = e.mean - half;
  e.ci_high = e.mean + half;
  return e;
}

WrongHalfEdgeAudit wrong_half_edge_audit(std::shared_ptr<ExperimentContext> ctx_sp,
                                         const AlgorithmDescriptor& alg0, double tol) {
  if (!ctx_sp) throw UsageError("wrong_half_edge_audit: null experiment context");
  ExperimentContext& ctx = *ctx_sp;
  require_grabbing(alg0, "wrong_half_edge_audit");
  const int T = alg0.radius;
  if (T < 1) throw UsageError("wrong_half_edge_audit: algorithm radius must be >= 1");
  const PortedGraph& g = ctx.graph();
  const int n = g.n;
  const int b = alg0.bound;
  const double bpn = ctx.bits_per_node();
  const int rs = ctx.params().R_shared;
  const double shared_norm = std::pow(2.0, rs);

  AlgorithmDescriptor alg1 = derive_one_round_faster(ctx_sp, alg0, ProfileOptions{});

  auto eval0 = [&ctx, &alg0](InputAssignment& a, int node, int port) -> int {
    ExperimentContext::Skeleton& sk = ctx.skeleton(node, alg0.radius);
    ctx.load_proto(sk, a);
    return alg0.rule(sk.proto)[port] == kLabelM ? 1 : 0;
  };
  auto eval1 = [&ctx, &alg1](InputAssignment& a, int node, int port) -> int {
    ExperimentContext::Skeleton& sk = ctx.skeleton(node, alg1.radius);
    ctx.load_proto(sk, a);
    return alg1.rule(sk.proto)[port] == kLabelM ? 1 : 0;
  };

  WrongHalfEdgeAudit r;
  r.T = T;
  r.b = b;
  r.tol = tol;

  // Pair expectations per edge: condition on the overlap of the endpoints'
  // balls, then the residual input sets are disjoint and factor exactly.
  for (auto [u, pu] : g.edges()) {
    const int w = g.adj[u][pu].node;
    const int pw = g.adj[u][pu].rev_port;
    for (int radius : {T, T - 1}) {
      const std::vector<int> nu = sorted_ball_nodes(ctx, u, radius);
      const std::vector<int> nw = sorted_ball_nodes(ctx, w, radius);
      const std::vector<int> O = set_inter(nu, nw);
      const std::vector<int> A = set_minus(nu, nw);
      const std::vector<int> B = set_minus(nw, nu);
      std::ostringstream what;
      what << "pair expectation for edge {" << u << "," << w << "} at radius " << radius;
      ctx.check_budget(rs + static_cast<double>(O.size() + std::max(A.size(), B.size())) * bpn,
                       what.str());
      ExperimentContext::ScratchLease lease(ctx);
      InputAssignment& a = *lease;
      double mm = 0, mu = 0;
      for_each_shared(a, [&] {
        PairTerms t = radius == T ? pair_core(ctx, a, O, A, B, u, pu, w, pw, eval0, eval0)
                                  : pair_core(ctx, a, O, A, B, u, pu, w, pw, eval1, eval1);
        mm += t.mm;
        mu += t.mu;
      });
      if (radius == T) {
        r.e_mm_0 += mm / shared_norm;
        r.e_mu_0 += mu / shared_norm;
      } else {
        r.e_mm_1 += mm / shared_norm;
      }
    }
  }

  // Wrong half-edges, by direct counting over the inputs of N_T[v].
  for (int v = 0; v < n; ++v) {
    ExperimentContext::Skeleton& sk_t = ctx.skeleton(v, T);
    const std::vector<int> ball_nodes = sk_t.bi.nodes;
    std::ostringstream what;
    what << "wrong-half-edge count at node " << v << " (ball of " << ball_nodes.size()
         << " nodes)";
    ctx.check_budget(rs + static_cast<double>(ball_nodes.size()) * bpn, what.str());
    std::vector<int> present;
    for (int i = 0; i < g.delta; ++i)
      if (g.adj[v][i].present()) present.push_back(i);
    ExperimentContext::ScratchLease lease(ctx);
    InputAssignment& a = *lease;
    NodeEnum en(ball_nodes, ctx.id_space(), ctx.params().R);
    long long cnt = 0, wrong = 0;
    for_each_shared(a, [&] {
      cnt += for_each_combo(en, a, [&] {
        ctx.load_proto(sk_t, a);
        const std::vector<int> out0 = alg0.rule(sk_t.proto);
        ExperimentContext::Skeleton& sk_i = ctx.skeleton(v, T - 1);
        ctx.load_proto(sk_i, a);
        const std::vector<int> out1 = alg1.rule(sk_i.proto);
        for (int i : present)
          if (out0[i] == kLabelM && out1[i] != kLabelM) ++wrong;
      });
    });
    r.h_wrong += static_cast<double>(wrong) / static_cast<double>(cnt);
  }

  // The same quantity through per-view profiles: E[S_rest(v)] summed over v.
  for (int v = 0; v < n; ++v) {
    ExperimentContext::Skeleton& sk_i = ctx.skeleton(v, T - 1);
    const std::vector<int> inner_nodes = sk_i.bi.nodes;
    const size_t ball_t = ctx.skeleton(v, T).bi.nodes.size();
    std::ostringstream what;
    what << "rest-mass expectation at node " << v << " (ball of " << ball_t << " nodes)";
    ctx.check_budget(rs + static_cast<double>(ball_t) * bpn, what.str());
    ExperimentContext::ScratchLease lease(ctx);
    InputAssignment& a = *lease;
    NodeEnum en(inner_nodes, ctx.id_space(), ctx.params().R);
    double acc = 0;
    long long cnt = 0;
    for_each_shared(a, [&] {
      cnt += for_each_combo(en, a, [&] {
        ctx.load_proto(sk_i, a);
        const DirectionStats st = profile_for_view(ctx, sk_i.proto, alg0, ProfileOptions{});
        acc += st.S_rest;
        r.max_s_dev = std::max(r.max_s_dev, std::abs(st.S - b));
      });
    });
    r.sum_s_rest += acc / static_cast<double>(cnt);
  }

  r.p0 = 1.0 - 2.0 * r.e_mm_0 / (static_cast<double>(b) * n);
  r.p1 = 1.0 - 2.0 * r.e_mm_1 / (static_cast<double>(b) * n);
  r.p1_bound_factor = 1.0 + 1000.0 * std::sqrt(static_cast<double>(b));
  r.s_check = r.max_s_dev <= 1e-12;
  r.h_wrong_eq = std::abs(r.h_wrong - r.sum_s_rest) <= tol;
  r.mm_chain = r.e_mm_1 >= r.e_mm_0 - r.h_wrong - tol &&
               std::abs(2.0 * r.e_mm_0 + r.e_mu_0 - static_cast<double>(b) * n) <= tol;
  return r;
}

double exact_conditional_mu(ExperimentContext& ctx, int v, const AlgorithmDescriptor& alg0) {
  require_grabbing(alg0, "exact_conditional_mu");
  const int T = alg0.radius;
  if (T < 1) throw UsageError("exact_conditional_mu: algorithm radius must be >= 1");
  const PortedGraph& g = ctx.graph();
  if (v < 0 || v >= g.n) throw UsageError("exact_conditional_mu: node out of range");
  const double bpn = ctx.bits_per_node();
  const std::vector<int> C = sorted_ball_nodes(ctx, v, T - 1);
  const std::vector<int> nv = sorted_ball_nodes(ctx, v, T);

  auto eval0 = [&ctx, &alg0](InputAssignment& a, int node, int port) -> int {
    ExperimentContext::Skeleton& sk = ctx.skeleton(node, alg0.radius);
    ctx.load_proto(sk, a);
    return alg0.rule(sk.proto)[port] == kLabelM ? 1 : 0;
  };

  double total_mu = 0;
  for (int i = 0; i < g.delta; ++i) {
    if (!g.adj[v][i].present()) continue;
    const int w = g.adj[v][i].node;
    const int pw = g.adj[v][i].rev_port;
    const std::vector<int> nw = sorted_ball_nodes(ctx, w, T);
    const std::vector<int> O = set_inter(nv, nw);
    // C lies in both balls, so it always sits inside O; it is conditioned,
    // not enumerated.
    const std::vector<int> oc = set_minus(O, C);
    const std::vector<int> A = set_minus(nv, O);
    const std::vector<int> B = set_minus(nw, O);
    std::ostringstream what;
    what << "conditional pair expectation for edge {" << v << "," << w << "}";
    ctx.check_budget(static_cast<double>(oc.size() + std::max(A.size(), B.size())) * bpn,
                     what.str());
    ExperimentContext::ScratchLease lease(ctx);
    InputAssignment& a = *lease;
    for (int c : C) {
      a.nodes[c].id = ctx.base().nodes[c].id;
      a.nodes[c].private_bits = ctx.base().nodes[c].private_bits;
    }
    a.shared_bits = ctx.base().shared_bits;
    total_mu += pair_core(ctx, a, oc, A, B, v, i, w, pw, eval0, eval0).mu;
  }
  return total_mu;
}

std::vector<TrajectoryRow> iterate_self_reduction(std::shared_ptr<ExperimentContext> ctx,
                                                  const AlgorithmDescriptor& alg0,
                                                  const ProfileOptions& opts, long long trials,
                                                  uint64_t seed, double c_const) {
  if (!ctx) throw UsageError("iterate_self_reduction: null experiment context");
  require_grabbing(alg0, "iterate_self_reduction");
  // The context graph already carries the experiment's frozen ports.
  LocalModelParams mp = ctx->params();
  mp.port_mode = PortMode::fixed;
  const double factor = c_const * std::sqrt(static_cast<double>(alg0.bound));
  std::vector<TrajectoryRow> rows;
  AlgorithmDescriptor alg = alg0;
  double p0 = 0;
  for (int stage = 0;; ++stage) {
    const BadnessEstimate e =
        measure_badness(ctx->graph(), mp, alg, trials, mix2(seed, static_cast<uint64_t>(stage)));
    if (stage == 0) p0 = e.mean;
    TrajectoryRow row;
    row.stage = stage;
    row.radius = alg.radius;
    row.badness_mean = e.mean;
    row.badness_ci_low = e.ci_low;
    row.badness_ci_high = e.ci_high;
    row.envelope = p0 * std::pow(factor, stage);
    rows.push_back(row);
    if (alg.radius == 0) break;
    ProfileOptions stage_opts = opts;
    stage_opts.seed = mix2(opts.seed, 0x7374616765ULL + static_cast<uint64_t>(stage));
    alg = derive_one_round_faster(ctx, alg, stage_opts);
  }
  return rows;
}

std::string trajectory_to_csv(const std::vector<TrajectoryRow>& rows) {
  std::ostringstream os;
  os << "stage,radius,badness_mean,badness_ci_low,badness_ci_high,envelope\n";
  char buf[160];
  for (const TrajectoryRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%d,%.10g,%.10g,%.10g,%.10g\n", r.stage, r.radius,
                  r.badness_mean, r.badness_ci_low, r.badness_ci_high, r.envelope);
    os << buf;
  }
  return os.str();
}

double round_bound(double p, int b, int delta, double n, double eps, double c_const) {
  if (!(p > 0.0) || !(p < 0.5))
    throw DomainError("round_bound requires badness 0 < p < 1/2");
  if (b < 1) throw DomainError("round_bound requires b >= 1");
  if (delta < 2) throw DomainError("round_bound requires delta >= 2");
  if (!(n >= 2.0)) throw DomainError("round_bound requires n >= 2");
  if (!(eps > 0.0)) throw DomainError("round_bound requires eps > 0");
  const double base = c_const * std::sqrt(static_cast<double>(b));
  if (!(base > 1.0)) throw DomainError("round_bound requires c_const*sqrt(b) > 1");
  const double t_girth = eps / 4.0 * std::log(n) / std::log(static_cast<double>(delta));
  const double t_prob = std::log(1.0 / (2.0 * p)) / std::log(base);
  return std::min(t_girth, t_prob);
}

}  // namespace grablab

#include "grablab/prob_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "grablab/errors.hpp"
#include "grablab/graph.hpp"

namespace grablab {

namespace {

constexpr double kSlack = 1e-12;  // roundoff slack on verdict comparisons

double abs_diff_sum(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw DomainError("probability vectors differ in length");
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) s += std::abs(x[i] - y[i]);
  return s;
}

}  // namespace

void validate_prob_vector(const std::vector<double>& x) {
  for (double v : x)
    if (!(v >= 0.0 && v <= 1.0)) throw DomainError("probability entry outside [0,1]");
}

void validate_tagged_vector(const std::vector<double>& x, double b) {
  validate_prob_vector(x);
  const double s = std::accumulate(x.begin(), x.end(), 0.0);
  if (std::abs(s - b) > 1e-12)
    throw DomainError("tagged vector sums to " + std::to_string(s) + ", expected " +
                      std::to_string(b));
}

std::vector<double> poisson_binomial_pmf(const std::vector<double>& y) {
  validate_prob_vector(y);
  std::vector<double> pmf(y.size() + 1, 0.0);
  pmf[0] = 1.0;
  size_t used = 0;
  for (double p : y) {
    ++used;
    for (size_t k = used; k >= 1; --k) pmf[k] = pmf[k] * (1.0 - p) + pmf[k - 1] * p;
    pmf[0] *= (1.0 - p);
  }
  return pmf;
}

double expected_abs_dev(const std::vector<double>& y, int b) {
  if (b < 0) throw DomainError("target must be >= 0");
  const std::vector<double> pmf = poisson_binomial_pmf(y);
  double e = 0;
  for (size_t k = 0; k < pmf.size(); ++k) e += std::abs(static_cast<double>(b) - k) * pmf[k];
  return e;
}

SQuantities s_quantities(const std::vector<double>& x, int b) {
  validate_prob_vector(x);
  if (b < 0 || b > static_cast<int>(x.size()))
    throw DomainError("b outside [0, delta] in s_quantities");
  std::vector<double> sorted = x;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  SQuantities s;
  s.S = std::accumulate(sorted.begin(), sorted.end(), 0.0);
  s.S_b = std::accumulate(sorted.begin(), sorted.begin() + b, 0.0);
  s.S_rest = s.S - s.S_b;
  return s;
}

LemmaVerdict check_deviation_lemma(const std::vector<double>& x, const std::vector<double>& y,
                                   int b) {
  if (b < 1) throw DomainError("deviation lemma needs b >= 1");
  validate_tagged_vector(x, b);
  validate_prob_vector(y);
  const double threshold =
      s_quantities(x, b).S_rest / (1000.0 * std::sqrt(static_cast<double>(b)));
  LemmaVerdict v;
  v.hyp_lhs = abs_diff_sum(x, y);
  v.hyp_rhs = threshold;
  v.hypothesis_holds = v.hyp_lhs < threshold;
  v.lhs = expected_abs_dev(y, b);
  v.rhs = threshold;
  v.margin = v.lhs - v.rhs;
  v.conclusion_holds = v.margin >= -kSlack;
  return v;
}

LemmaVerdict check_min_sum_bound(const std::vector<double>& x, int b) {
  if (b < 0) throw DomainError("min-sum bound needs b >= 0");
  validate_tagged_vector(x, b);
  LemmaVerdict v;
  v.lhs = 0;
  for (double e : x) v.lhs += std::min(e, 1.0 - e);
  v.rhs = s_quantities(x, b).S_rest;
  v.margin = v.lhs - v.rhs;
  v.conclusion_holds = v.margin >= -kSlack;
  return v;
}

LemmaVerdict check_khintchine(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  if (n > 20) throw SizeTooLarge("sign enumeration limited to 20 coordinates");
  if (n < 1) throw DomainError("khintchine needs at least one coordinate");
  double l2 = 0;
  for (double v : x) l2 += v * v;
  l2 = std::sqrt(l2);
  // Gray-code walk: exactly one sign flips between consecutive masks.
  std::vector<int> sign(n, 1);
  double s = std::accumulate(x.begin(), x.end(), 0.0);
  double acc = std::abs(s);
  const uint64_t total = 1ull << n;
  for (uint64_t i = 1; i < total; ++i) {
    const int j = std::countr_zero(i);
    s -= 2.0 * sign[j] * x[j];
    sign[j] = -sign[j];
    acc += std::abs(s);
  }
  LemmaVerdict v;
  v.lhs = acc / static_cast<double>(total);
  v.rhs = l2 / std::sqrt(2.0);
  v.aux = l2;
  v.margin = std::min(v.lhs - v.rhs, l2 - v.lhs);
  v.conclusion_holds = v.margin >= -kSlack;
  return v;
}

LemmaVerdict check_paley_zygmund(const std::vector<double>& values,
                                 const std::vector<double>& probs, double lambda) {
  if (values.size() != probs.size() || values.empty())
    throw DomainError("pmf needs matching nonempty values/probs");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw DomainError("lambda outside [0,1]");
  double mass = 0;
  for (size_t i = 0; i < values.size(); ++i) {
    if (values[i] < 0) throw DomainError("Z must be nonnegative");
    if (probs[i] < 0) throw DomainError("pmf entries must be nonnegative");
    mass += probs[i];
  }
  if (std::abs(mass - 1.0) > 1e-12) throw DomainError("pmf does not sum to 1");
  double ez = 0, ez2 = 0;
  for (size_t i = 0; i < values.size(); ++i) {
    ez += values[i] * probs[i];
    ez2 += values[i] * values[i] * probs[i];
  }
  LemmaVerdict v;
  v.lhs = 0;
  for (size_t i = 0; i < values.size(); ++i)
    if (values[i] >= lambda * ez - kSlack) v.lhs += probs[i];
  v.rhs = ez2 == 0.0 ? 0.0 : (1.0 - lambda) * (1.0 - lambda) * ez * ez / ez2;
  v.margin = v.lhs - v.rhs;
  v.conclusion_holds = v.margin >= -kSlack;
  return v;
}

LemmaVerdict check_b1_lemma(const std::vector<double>& x, const std::vector<double>& y) {
  validate_tagged_vector(x, 1.0);
  validate_prob_vector(y);
  if (x.empty()) throw DomainError("b=1 lemma needs at least one coordinate");
  const double m = 1.0 - *std::max_element(x.begin(), x.end());
  const double threshold = m / 1000.0;
  LemmaVerdict v;
  v.hyp_lhs = abs_diff_sum(x, y);
  v.hyp_rhs = threshold;
  v.hypothesis_holds = v.hyp_lhs < threshold;
  const std::vector<double> pmf = poisson_binomial_pmf(y);
  v.lhs = 0;
  for (size_t k = 0; k < pmf.size(); ++k) v.lhs += std::abs(static_cast<double>(k) - 1.0) * pmf[k];
  for (size_t k = 2; k < pmf.size(); ++k) v.aux += pmf[k];  // Pr[Y >= 2]
  v.rhs = threshold;
  v.margin = v.lhs - v.rhs;
  v.conclusion_holds = v.lhs >= threshold - kSlack && v.aux >= threshold - kSlack;
  return v;
}

std::vector<double> random_prob_vector(int delta, SplitRng& rng) {
  if (delta < 1) throw DomainError("delta must be >= 1");
  std::vector<double> x(delta);
  for (double& v : x) v = rng.uniform01();
  return x;
}

std::vector<double> random_tagged_vector(int delta, int b, SplitRng& rng) {
  if (delta < 1 || b < 0 || b > delta) throw DomainError("need 0 <= b <= delta");
  std::vector<double> x(delta);
  for (double& v : x) v = rng.uniform01() + 1e-9;  // keep the total positive
  // Rescale to total b; entries pushed past 1 are clamped and the remainder
  // is redistributed over the rest (terminates: each pass clamps >= 1 entry).
  std::vector<uint8_t> clamped(delta, 0);
  double remaining = b;
  for (;;) {
    double free_sum = 0;
    for (int i = 0; i < delta; ++i)
      if (!clamped[i]) free_sum += x[i];
    bool newly = false;
    for (int i = 0; i < delta; ++i) {
      if (clamped[i]) continue;
      const double scaled = x[i] * remaining / free_sum;
      if (scaled >= 1.0) {
        x[i] = 1.0;
        clamped[i] = 1;
        remaining -= 1.0;
        newly = true;
        break;  // rescale the rest against the reduced remainder
      }
    }
    if (!newly) {
      for (int i = 0; i < delta; ++i)
        if (!clamped[i]) x[i] = x[i] * remaining / free_sum;
      break;
    }
  }
  return x;
}

std::vector<double> perturb_within(const std::vector<double>& x, double eps, SplitRng& rng) {
  if (!(eps >= 0)) throw DomainError("perturbation radius must be >= 0");
  std::vector<double> d(x.size());
  double total = 0;
  for (double& v : d) {
    v = 2.0 * rng.uniform01() - 1.0;
    total += std::abs(v);
  }
  std::vector<double> y = x;
  if (total == 0) return y;
  const double scale = eps / (2.0 * total);  // sum |y - x| = eps/2 < eps
  for (size_t i = 0; i < y.size(); ++i)
    y[i] = std::clamp(y[i] + d[i] * scale, 0.0, 1.0);  // clipping only shrinks the distance
  return y;
}

std::vector<ZeroRoundStrategy> strategy_zoo() {
  std::vector<ZeroRoundStrategy> zoo;
  zoo.push_back({"uniform", [](int delta, int b, SplitRng& rng) {
                   std::vector<int> pool(delta);
                   std::iota(pool.begin(), pool.end(), 0);
                   for (int i = 0; i < b; ++i) {
                     const size_t j = i + rng.below(pool.size() - i);
                     std::swap(pool[i], pool[j]);
                   }
                   pool.resize(b);
                   return pool;
                 }});
  zoo.push_back({"constant", [](int /*delta*/, int b, SplitRng&) {
                   std::vector<int> out(b);
                   std::iota(out.begin(), out.end(), 0);
                   return out;
                 }});
  zoo.push_back({"bit_biased", [](int delta, int b, SplitRng& rng) {
                   // Prefers low ports: each draw is the min of two uniforms.
                   std::vector<uint8_t> taken(delta, 0);
                   std::vector<int> out;
                   while (static_cast<int>(out.size()) < b) {
                     const int p = static_cast<int>(
                         std::min(rng.below(delta), rng.below(delta)));
                     if (!taken[p]) {
                       taken[p] = 1;
                       out.push_back(p);
                     }
                   }
                   return out;
                 }});
  return zoo;
}

namespace {

// Random simple delta-regular bipartite arena: the union of delta random
// perfect matchings between two sides of size 2*delta, de-duplicated by
// random transpositions. (Pairing-model rejection stalls beyond delta ~ 6,
// and the game only needs some random simple regular graph: the per-trial
// port permutations below wash out any further structure.)
PortedGraph matching_union_arena(int delta, uint64_t seed) {
  const int m = 2 * delta;
  SplitRng rng(seed, {0x6172656eULL});
  std::vector<std::vector<int>> pi(delta, std::vector<int>(m));
  for (auto& p : pi) {
    std::iota(p.begin(), p.end(), 0);
    rng.shuffle(p);
  }
  for (int sweep = 0;; ++sweep) {
    if (sweep > 1000) throw ExhaustedAttempts("arena matching repair did not converge");
    bool collision = false;
    for (int i = 0; i < m; ++i)
      for (int k = 1; k < delta; ++k)
        for (int l = 0; l < k; ++l)
          if (pi[k][i] == pi[l][i]) {
            const int j = static_cast<int>(rng.below(static_cast<uint64_t>(m)));
            std::swap(pi[k][i], pi[k][j]);
            collision = true;
          }
    if (!collision) break;
  }
  PortedGraph g = make_empty_graph(2 * m, delta);
  for (int k = 0; k < delta; ++k)
    for (int i = 0; i < m; ++i) add_edge_at(g, i, k, m + pi[k][i], k);
  return g;
}

}  // namespace

double zero_round_badness(const ZeroRoundStrategy& strategy, int delta, int b, long long trials,
                          uint64_t seed) {
  if (!strategy.pick) throw UsageError("zero-round strategy has no pick function");
  if (b < 1 || b > delta) throw DomainError("need 1 <= b <= delta");
  if (trials < 1) throw DomainError("trials must be >= 1");
  const PortedGraph g = matching_union_arena(delta, seed);  // ports re-randomize per run
  const int n = g.n;
  const auto edge_list = g.edges();
  std::vector<std::vector<uint8_t>> marked(n, std::vector<uint8_t>(delta, 0));
  std::vector<int> perm(delta);
  double badness_sum = 0;
  for (long long t = 0; t < trials; ++t) {
    for (int v = 0; v < n; ++v) {
      std::fill(marked[v].begin(), marked[v].end(), 0);
      SplitRng perm_rng = substream(seed, {static_cast<uint64_t>(t), static_cast<uint64_t>(v), 0});
      std::iota(perm.begin(), perm.end(), 0);
      perm_rng.shuffle(perm);
      SplitRng pick_rng = substream(seed, {static_cast<uint64_t>(t), static_cast<uint64_t>(v), 1});
      std::vector<int> picks = strategy.pick(delta, b, pick_rng);
      if (static_cast<int>(picks.size()) != b) throw RuleViolation("strategy picked != b ports");
      for (int visible : picks) {
        if (visible < 0 || visible >= delta || marked[v][perm[visible]])
          throw RuleViolation("strategy picked an invalid or repeated port");
        marked[v][perm[visible]] = 1;
      }
    }
    long long q = 0;
    for (auto [u, pu] : edge_list) {
      const PortEnd& e = g.adj[u][pu];
      if (marked[u][pu] && marked[e.node][e.rev_port]) ++q;
    }
    badness_sum += 1.0 - 2.0 * static_cast<double>(q) / (static_cast<double>(b) * n);
  }
  return badness_sum / static_cast<double>(trials);
}

}  // namespace grablab

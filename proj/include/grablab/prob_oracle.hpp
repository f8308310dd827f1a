#pragma once
// Exact and enumerative verification of the probabilistic machinery: the
// Poisson-binomial deviation E[|b - Y|], the deviation lemma, the min-sum
// bound, Khintchine and Paley-Zygmund, the b=1 lemma, and the zero-round
// grabbing game.
//
// Probability vectors are plain std::vector<double> with entries in [0,1];
// "tagged" vectors additionally sum to b within 1e-12 (the structural
// premise that exactly b events occur is a property of the joint law and is
// guaranteed by construction for grabbing-derived vectors, not re-derived
// here). All verdict comparisons allow a 1e-12 absolute slack for
// floating-point roundoff; the quantities themselves are computed exactly
// up to double arithmetic.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "grablab/rng.hpp"

namespace grablab {

void validate_prob_vector(const std::vector<double>& x);
void validate_tagged_vector(const std::vector<double>& x, double b);

// pmf[k] = Pr[exactly k of the independent events with probabilities y occur]
// (standard convolution DP, exact up to double arithmetic).
std::vector<double> poisson_binomial_pmf(const std::vector<double>& y);

// E[|b - Y|] with Y ~ PoissonBinomial(y).
double expected_abs_dev(const std::vector<double>& y, int b);

struct SQuantities {
  double S = 0, S_b = 0, S_rest = 0;  // total, top-b mass, rest mass
};
SQuantities s_quantities(const std::vector<double>& x, int b);

struct LemmaVerdict {
  bool hypothesis_holds = true;
  bool conclusion_holds = false;
  double hyp_lhs = 0, hyp_rhs = 0;  // hypothesis side (when the check has one)
  double lhs = 0, rhs = 0;          // conclusion side
  double margin = 0;                // lhs - rhs
  double aux = 0;                   // check-specific (b=1 lemma: Pr[Y >= 2])
  bool ok() const { return !hypothesis_holds || conclusion_holds; }
};

// Hypothesis: sum |x_i - y_i| < S_rest(x)/(1000 sqrt(b)).
// Conclusion: E[|b - Y|] >= S_rest(x)/(1000 sqrt(b)).
LemmaVerdict check_deviation_lemma(const std::vector<double>& x, const std::vector<double>& y,
                                   int b);

// sum_i min(x_i, 1-x_i) >= S_rest(x) for tagged x.
LemmaVerdict check_min_sum_bound(const std::vector<double>& x, int b);

// (1/sqrt(2)) * ||x||_2 <= E|sum x_i eps_i| <= ||x||_2, by enumerating all
// 2^n sign vectors. Throws SizeTooLarge for n > 20. lhs = E, rhs = lower
// bound, aux = upper bound ||x||_2.
LemmaVerdict check_khintchine(const std::vector<double>& x);

// Pr[Z >= lambda E[Z]] >= (1-lambda)^2 E[Z]^2 / E[Z^2] for a nonnegative Z
// with finite support {values[i] w.p. probs[i]}; the right side is taken as
// 0 when E[Z^2] = 0.
LemmaVerdict check_paley_zygmund(const std::vector<double>& values,
                                 const std::vector<double>& probs, double lambda);

// b=1 lemma, with M = 1 - max x_i. Hypothesis: sum |x_i - y_i| < M/1000.
// Conclusion: E[|Y - 1|] >= M/1000 and (the proof's intermediate step)
// Pr[Y >= 2] >= M/1000; the latter is reported in aux.
LemmaVerdict check_b1_lemma(const std::vector<double>& x, const std::vector<double>& y);

// Random inputs for the falsification searches (all exact-evaluated).
std::vector<double> random_prob_vector(int delta, SplitRng& rng);
// Entries in [0,1] summing to b (clip-and-rescale of a uniform draw).
std::vector<double> random_tagged_vector(int delta, int b, SplitRng& rng);
// y in [0,1]^delta with sum |x_i - y_i| < eps, so lemma hypotheses hold.
std::vector<double> perturb_within(const std::vector<double>& x, double eps, SplitRng& rng);

// The zero-round grabbing game: every node picks b of its delta ports by a
// strategy that sees only (delta, b, its own randomness); ports are freshly
// re-randomized every run, so any strategy matches each edge with
// probability exactly (b/delta)^2.
struct ZeroRoundStrategy {
  std::string name;
  // Returns b distinct ports in [0, delta).
  std::function<std::vector<int>(int delta, int b, SplitRng& rng)> pick;
};

std::vector<ZeroRoundStrategy> strategy_zoo();  // uniform, constant, bit_biased

// Mean badness over `trials` runs on a fixed random delta-regular graph
// (n = 4*delta) with per-run random port permutations.
double zero_round_badness(const ZeroRoundStrategy& strategy, int delta, int b, long long trials,
                          uint64_t seed);

}  // namespace grablab

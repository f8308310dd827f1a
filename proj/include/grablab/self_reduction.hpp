#pragma once
// The one-round-faster self-reduction and its exact audit.
//
// For a T-round grabbing algorithm A0, the direction profile of v is
// x_i(v) = Pr[A0 marks M on visible port i | v's (T-1)-view]; the profile
// sums to exactly b because A0 always marks exactly b ports. The derived
// (T-1)-round algorithm A1 grabs the b preferred directions (the b largest
// x_i, ties toward the smaller index).
//
// Expectations marginalize over private bits and IDs of the enumerated
// nodes; topology and ports are experiment constants held by an
// ExperimentContext, and shared bits are conditioned inside views (the
// audit enumerates them explicitly).

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "grablab/graph.hpp"
#include "grablab/local_model.hpp"

namespace grablab {

enum class EstimateMode { exact, monte_carlo };

struct ProfileOptions {
  EstimateMode mode = EstimateMode::exact;
  long long samples = 10000;  // Monte Carlo extensions per profile
  uint64_t seed = 0;          // Monte Carlo substream root
};

struct DirectionStats {
  std::vector<double> x;  // per visible port; 0 at unused ports
  double S = 0.0, S_top = 0.0, S_rest = 0.0;
  std::vector<int> preferred;  // sorted ascending
  EstimateMode mode = EstimateMode::exact;
  long long samples = 0;        // Monte Carlo only
  std::vector<double> stderrs;  // Monte Carlo only
};

// Indices of the b largest entries, ties toward the smaller index.
std::vector<int> preferred_directions(const std::vector<double>& x, int b);

// Fixed experiment: visible wiring (ports applied once), a base input
// assignment for conditioning, enumeration budget. Holds cached ball
// skeletons and scratch assignments for the enumeration engine.
class ExperimentContext {
 public:
  ExperimentContext(const PortedGraph& g, const InputAssignment& in,
                    const LocalModelParams& params);
  static std::shared_ptr<ExperimentContext> create(const PortedGraph& g, uint64_t seed,
                                                   const LocalModelParams& params);

  const PortedGraph& graph() const { return eff_; }  // visible wiring
  const InputAssignment& base() const { return base_; }
  const LocalModelParams& params() const { return params_; }
  uint64_t id_space() const { return base_.id_space; }
  uint64_t node_combos() const;   // id_space * 2^R
  double bits_per_node() const;   // R + log2(id_space)
  void check_budget(double bits, const std::string& what) const;

  // Engine internals (sequential use only). Protos are transient: load
  // immediately before a rule call, never hold across one.
  struct Skeleton {
    BallIndex bi;
    View proto;
  };
  Skeleton& skeleton(int v, int radius);
  void load_proto(Skeleton& sk, const InputAssignment& a);

  class ScratchLease {
   public:
    explicit ScratchLease(ExperimentContext& ctx);
    ~ScratchLease();
    InputAssignment& operator*() { return *a_; }
    InputAssignment* operator->() { return a_.get(); }

   private:
    ExperimentContext& ctx_;
    std::unique_ptr<InputAssignment> a_;
  };

 private:
  friend class ScratchLease;
  PortedGraph eff_;
  InputAssignment base_;
  LocalModelParams params_;
  std::map<std::pair<int, int>, Skeleton> skeletons_;
  std::vector<std::unique_ptr<InputAssignment>> pool_;
};

// Direction profile of v under alg (radius T >= 1), conditioned on the base
// assignment's (T-1)-view of v. Exact mode enumerates (id, bits) of the
// frontier N_T[v] \ N_{T-1}[v]; throws BudgetTooLarge past the cap.
DirectionStats estimate_direction_profile(ExperimentContext& ctx, int v,
                                          const AlgorithmDescriptor& alg,
                                          const ProfileOptions& opts);

// Same, conditioned on an explicit (T-1)-view extracted from this experiment.
DirectionStats profile_for_view(ExperimentContext& ctx, const View& view,
                                const AlgorithmDescriptor& alg, const ProfileOptions& opts);

// The (T-1)-round algorithm grabbing the preferred directions of its view.
// Outputs are memoized per view content. Requires alg.radius >= 1.
AlgorithmDescriptor derive_one_round_faster(std::shared_ptr<ExperimentContext> ctx,
                                            const AlgorithmDescriptor& alg,
                                            const ProfileOptions& opts);

struct BadnessEstimate {
  double mean = 0, sd = 0, ci_low = 0, ci_high = 0;  // 99% normal CI
  long long trials = 0;
};

// Mean badness over fresh input assignments (ids, bits, shared re-drawn per
// trial; ports re-drawn only when params.port_mode == random and
// params.resample_ports_per_trial).
BadnessEstimate measure_badness(const PortedGraph& g, const LocalModelParams& params,
                                const AlgorithmDescriptor& alg, long long trials, uint64_t seed);

// Exact audit of one derivation step. All five expectations are computed
// over the full (ids, bits, shared) space:
//   e_mm_0 / e_mu_0: expected matched / half-matched edge counts of A0, via
//     per-edge conditioning on the overlap of the endpoints' radius-T balls;
//   e_mm_1: same for A1 at radius T-1;
//   h_wrong: expected count of half-edges A0 marks M but A1 leaves U, by
//     per-assignment counting over N_T[v];
//   sum_s_rest: sum over v of E[S_rest(v)] from per-view profiles.
// Checks: s_check (profiles sum to b within 1e-12), h_wrong_eq
// (h_wrong == sum_s_rest within tol), mm_chain (e_mm_1 >= e_mm_0 - h_wrong
// and 2*e_mm_0 + e_mu_0 == b*n, within tol).
struct WrongHalfEdgeAudit {
  int T = 0, b = 0;
  double e_mm_0 = 0, e_mm_1 = 0, e_mu_0 = 0, h_wrong = 0, sum_s_rest = 0;
  double p0 = 0, p1 = 0;
  double max_s_dev = 0;
  double p1_bound_factor = 0;  // 1 + 1000*sqrt(b)
  double tol = 0;
  bool s_check = false, h_wrong_eq = false, mm_chain = false;
};
WrongHalfEdgeAudit wrong_half_edge_audit(std::shared_ptr<ExperimentContext> ctx,
                                         const AlgorithmDescriptor& alg0, double tol = 1e-9);

// E[# edges at v labeled M on exactly one side | v's (T-1)-view], exact,
// via the same overlap factorization (per incident edge, by linearity).
double exact_conditional_mu(ExperimentContext& ctx, int v, const AlgorithmDescriptor& alg0);

// Repeated derivation down to radius 0, measuring badness at each stage.
// envelope = stage-0 mean * (c_const*sqrt(b))^stage.
struct TrajectoryRow {
  int stage = 0, radius = 0;
  double badness_mean = 0, badness_ci_low = 0, badness_ci_high = 0, envelope = 0;
};
std::vector<TrajectoryRow> iterate_self_reduction(std::shared_ptr<ExperimentContext> ctx,
                                                  const AlgorithmDescriptor& alg0,
                                                  const ProfileOptions& opts, long long trials,
                                                  uint64_t seed, double c_const);
std::string trajectory_to_csv(const std::vector<TrajectoryRow>& rows);

// T(p) = min( eps/4 * log_delta(n), log(1/(2p)) / log(c_const*sqrt(b)) ).
// DomainError unless 0 < p < 1/2 and c_const*sqrt(b) > 1.
double round_bound(double p, int b, int delta, double n, double eps, double c_const);

}  // namespace grablab

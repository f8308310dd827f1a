#include "grablab.h"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "grablab/baselines.hpp"
#include "grablab/errors.hpp"
#include "grablab/graph.hpp"
#include "grablab/local_model.hpp"
#include "grablab/prob_oracle.hpp"
#include "grablab/rng.hpp"
#include "grablab/self_reduction.hpp"

using nlohmann::json;

struct grab_graph {
  grablab::PortedGraph g;
};

namespace {

thread_local std::string t_last_error = "no error";

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

grab_status status_of(grablab::ErrorKind kind) {
  switch (kind) {
    case grablab::ErrorKind::budget:
      return GRAB_ERR_BUDGET;
    case grablab::ErrorKind::usage:
      return GRAB_ERR_USAGE;
    case grablab::ErrorKind::io:
      return GRAB_ERR_IO;
    case grablab::ErrorKind::domain:
    default:
      return GRAB_ERR_DOMAIN;
  }
}

template <class F>
grab_status wrap(F&& body) {
  try {
    body();
    return GRAB_OK;
  } catch (const grablab::GrabError& e) {
    t_last_error = e.what();
    return status_of(e.kind);
  } catch (const json::exception& e) {
    t_last_error = std::string("bad JSON: ") + e.what();
    return GRAB_ERR_USAGE;
  } catch (const std::exception& e) {
    t_last_error = e.what();
    return GRAB_ERR_DOMAIN;
  }
}

void require(bool cond, const char* msg) {
  if (!cond) throw grablab::UsageError(msg);
}

// Rejects unknown keys so flag typos surface as usage errors.
void check_keys(const json& j, std::initializer_list<const char*> allowed) {
  require(j.is_object(), "config must be a JSON object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed)
      if (item.key() == k) {
        known = true;
        break;
      }
    if (!known) throw grablab::UsageError("unknown config key '" + item.key() + "'");
  }
}

std::string params_digest(const json& resolved) {
  const std::string s = resolved.dump();
  uint64_t h = 0x9e3779b97f4a7c15ULL;
  for (unsigned char c : s) h = grablab::mix2(h, c + 1);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json diagnostics_to_json(const grablab::GraphDiagnostics& d) {
  json j;
  j["n"] = d.n;
  j["delta"] = d.delta;
  if (d.girth)
    j["girth"] = *d.girth;
  else
    j["girth"] = nullptr;
  j["girth_cycle"] = d.girth_cycle;
  j["independence_lower"] = d.independence_lower;
  if (d.independence_exact)
    j["independence_exact"] = *d.independence_exact;
  else
    j["independence_exact"] = nullptr;
  j["girth_floor"] = d.girth_floor;
  j["independence_ceiling"] = d.independence_ceiling;
  return j;
}

struct SelfReduceConfig {
  uint64_t seed = 1;
  int T = 1;
  int b = 1;
  int R = 1;
  int R_shared = 0;
  int id_exponent = 1;
  std::string mode = "exact";
  long long samples = 10000;
  long long trials = 1000;
  double c_const = 2.0;
  double budget_cap_bits = 24.0;
  std::string port_mode = "random";
  std::optional<bool> audit;
};

SelfReduceConfig parse_selfreduce_config(const char* config_json) {
  json j = config_json && *config_json ? json::parse(config_json) : json::object();
  check_keys(j, {"seed", "T", "b", "R", "R_shared", "id_exponent", "mode", "samples", "trials",
                 "c_const", "budget_cap_bits", "port_mode", "audit"});
  SelfReduceConfig c;
  c.seed = j.value("seed", c.seed);
  c.T = j.value("T", c.T);
  c.b = j.value("b", c.b);
  c.R = j.value("R", c.R);
  c.R_shared = j.value("R_shared", c.R_shared);
  c.id_exponent = j.value("id_exponent", c.id_exponent);
  c.mode = j.value("mode", c.mode);
  c.samples = j.value("samples", c.samples);
  c.trials = j.value("trials", c.trials);
  c.c_const = j.value("c_const", c.c_const);
  c.budget_cap_bits = j.value("budget_cap_bits", c.budget_cap_bits);
  c.port_mode = j.value("port_mode", c.port_mode);
  if (j.contains("audit")) c.audit = j.at("audit").get<bool>();
  require(c.T >= 0, "T must be >= 0");
  require(c.b >= 1, "b must be >= 1");
  require(c.R >= 0 && c.R <= 20, "R must be in [0, 20]");
  require(c.R_shared >= 0 && c.R_shared <= 20, "R_shared must be in [0, 20]");
  require(c.id_exponent >= 1, "id_exponent must be >= 1");
  require(c.mode == "exact" || c.mode == "mc", "mode must be 'exact' or 'mc'");
  require(c.samples >= 1, "samples must be >= 1");
  require(c.trials >= 1, "trials must be >= 1");
  require(c.port_mode == "random" || c.port_mode == "fixed",
          "port_mode must be 'random' or 'fixed'");
  return c;
}

json selfreduce_config_to_json(const SelfReduceConfig& c, bool run_audit) {
  json j;
  j["seed"] = c.seed;
  j["T"] = c.T;
  j["b"] = c.b;
  j["R"] = c.R;
  j["R_shared"] = c.R_shared;
  j["id_exponent"] = c.id_exponent;
  j["mode"] = c.mode;
  j["samples"] = c.samples;
  j["trials"] = c.trials;
  j["c_const"] = c.c_const;
  j["budget_cap_bits"] = c.budget_cap_bits;
  j["port_mode"] = c.port_mode;
  j["audit"] = run_audit;
  return j;
}

void run_selfreduce(const grablab::PortedGraph& g, const std::string& baseline_name,
                    const SelfReduceConfig& c, std::string* out_csv, std::string* out_audit) {
  grablab::LocalModelParams params;
  params.id_exponent = c.id_exponent;
  params.R = c.R;
  params.R_shared = c.R_shared;
  params.port_mode =
      c.port_mode == "fixed" ? grablab::PortMode::fixed : grablab::PortMode::random;
  params.budget_cap_bits = c.budget_cap_bits;

  const bool run_audit = c.audit.value_or(c.mode == "exact" && c.T >= 1);
  require(!run_audit || c.mode == "exact", "the exact audit requires mode='exact'");
  require(!run_audit || c.T >= 1, "the exact audit requires T >= 1");

  grablab::AlgorithmDescriptor baseline = grablab::baseline_by_name(baseline_name, c.T, c.b);
  auto ctx = grablab::ExperimentContext::create(g, c.seed, params);

  grablab::ProfileOptions opts;
  opts.mode =
      c.mode == "exact" ? grablab::EstimateMode::exact : grablab::EstimateMode::monte_carlo;
  opts.samples = c.samples;
  opts.seed = grablab::mix2(c.seed, 0x70726f66ULL);

  const std::vector<grablab::TrajectoryRow> rows = grablab::iterate_self_reduction(
      ctx, baseline, opts, c.trials, grablab::mix2(c.seed, 0x7472616aULL), c.c_const);
  *out_csv = grablab::trajectory_to_csv(rows);

  json report;
  report["config"] = selfreduce_config_to_json(c, run_audit);
  report["graph"] = {{"n", g.n}, {"delta", g.delta}};
  report["baseline"] = baseline.name;
  json stages = json::array();
  for (const grablab::TrajectoryRow& r : rows)
    stages.push_back({{"stage", r.stage},
                      {"radius", r.radius},
                      {"badness_mean", r.badness_mean},
                      {"badness_ci_low", r.badness_ci_low},
                      {"badness_ci_high", r.badness_ci_high},
                      {"envelope", r.envelope}});
  report["stages"] = stages;
  if (run_audit) {
    const grablab::WrongHalfEdgeAudit a = grablab::wrong_half_edge_audit(ctx, baseline);
    report["audit"] = {{"T", a.T},
                       {"b", a.b},
                       {"e_mm_0", a.e_mm_0},
                       {"e_mm_1", a.e_mm_1},
                       {"e_mu_0", a.e_mu_0},
                       {"h_wrong", a.h_wrong},
                       {"sum_s_rest", a.sum_s_rest},
                       {"p0", a.p0},
                       {"p1", a.p1},
                       {"p1_bound_factor", a.p1_bound_factor},
                       {"max_s_dev", a.max_s_dev},
                       {"tolerance", a.tol},
                       {"S_check", a.s_check},
                       {"H_wrong_eq", a.h_wrong_eq},
                       {"MM_chain", a.mm_chain}};
  }
  *out_audit = report.dump(2) + "\n";
}

json verdict_line(const std::string& check, const std::string& digest, long long index,
                  uint64_t seed, const grablab::LemmaVerdict& v) {
  return json{{"check", check},          {"params_digest", digest},
              {"index", index},          {"seed", seed},
              {"hypothesis", v.hypothesis_holds}, {"conclusion", v.conclusion_holds},
              {"lhs", v.lhs},            {"rhs", v.rhs},
              {"margin", v.margin}};
}

std::string run_oracle(const std::string& check, const char* params_json) {
  json p = params_json && *params_json ? json::parse(params_json) : json::object();
  std::string out;
  auto emit = [&out](const json& line) { out += line.dump() + "\n"; };

  if (check == "deviation" || check == "minsum" || check == "b1") {
    check_keys(p, {"delta", "b", "searches", "seed"});
    const int delta = p.value("delta", check == "minsum" ? 16 : 12);
    const int b = p.value("b", check == "b1" ? 1 : 2);
    require(check != "b1" || b == 1, "the b=1 lemma is only defined for b=1");
    const long long searches = p.value("searches", check == "minsum" ? 100000LL : 10000LL);
    const uint64_t seed = p.value("seed", 1ULL);
    require(delta >= 1 && b >= (check == "minsum" ? 0 : 1) && b <= delta,
            "need 1 <= b <= delta");
    require(searches >= 1, "searches must be >= 1");
    json resolved = {{"check", check}, {"delta", delta}, {"b", b}, {"searches", searches},
                     {"seed", seed}};
    const std::string digest = params_digest(resolved);
    for (long long i = 0; i < searches; ++i) {
      const uint64_t si = grablab::mix2(seed, static_cast<uint64_t>(i));
      grablab::SplitRng rng(si, {0x6f7261636cULL});
      const std::vector<double> x = grablab::random_tagged_vector(delta, b, rng);
      grablab::LemmaVerdict v;
      if (check == "minsum") {
        v = grablab::check_min_sum_bound(x, b);
      } else if (check == "deviation") {
        const double thr = grablab::s_quantities(x, b).S_rest /
                           (1000.0 * std::sqrt(static_cast<double>(b)));
        const std::vector<double> y = grablab::perturb_within(x, thr, rng);
        v = grablab::check_deviation_lemma(x, y, b);
      } else {
        const double m = 1.0 - *std::max_element(x.begin(), x.end());
        const std::vector<double> y = grablab::perturb_within(x, m / 1000.0, rng);
        v = grablab::check_b1_lemma(x, y);
      }
      json line = verdict_line(check, digest, i, si, v);
      if (check == "b1") line["pr_ge2"] = v.aux;
      emit(line);
    }
    return out;
  }

  if (check == "khintchine") {
    check_keys(p, {"n", "searches", "seed"});
    const int n = p.value("n", 8);
    const long long searches = p.value("searches", 1000LL);
    const uint64_t seed = p.value("seed", 1ULL);
    require(n >= 1 && n <= 20, "need 1 <= n <= 20");
    require(searches >= 1, "searches must be >= 1");
    json resolved = {{"check", check}, {"n", n}, {"searches", searches}, {"seed", seed}};
    const std::string digest = params_digest(resolved);
    for (long long i = 0; i < searches; ++i) {
      const uint64_t si = grablab::mix2(seed, static_cast<uint64_t>(i));
      grablab::SplitRng rng(si, {0x6b68ULL});
      std::vector<double> x(n);
      for (double& v : x) v = 2.0 * rng.uniform01() - 1.0;
      const grablab::LemmaVerdict v = grablab::check_khintchine(x);
      json line = verdict_line(check, digest, i, si, v);
      line["upper"] = v.aux;
      emit(line);
    }
    return out;
  }

  if (check == "paley_zygmund") {
    check_keys(p, {"support", "searches", "seed", "lambdas"});
    const int support = p.value("support", 5);
    const long long searches = p.value("searches", 1000LL);
    const uint64_t seed = p.value("seed", 1ULL);
    std::vector<double> lambdas = p.value("lambdas", std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
    require(support >= 1, "support must be >= 1");
    require(searches >= 1, "searches must be >= 1");
    json resolved = {{"check", check}, {"support", support}, {"searches", searches},
                     {"seed", seed}, {"lambdas", lambdas}};
    const std::string digest = params_digest(resolved);
    long long index = 0;
    for (long long i = 0; i < searches; ++i) {
      const uint64_t si = grablab::mix2(seed, static_cast<uint64_t>(i));
      grablab::SplitRng rng(si, {0x707a7aULL});
      std::vector<double> values(support), probs(support);
      double total = 0;
      for (int k = 0; k < support; ++k) {
        values[k] = 10.0 * rng.uniform01();
        probs[k] = rng.uniform01() + 1e-9;
        total += probs[k];
      }
      for (double& q : probs) q /= total;
      for (double lambda : lambdas) {
        const grablab::LemmaVerdict v = grablab::check_paley_zygmund(values, probs, lambda);
        json line = verdict_line(check, digest, index++, si, v);
        line["lambda"] = lambda;
        emit(line);
      }
    }
    return out;
  }

  if (check == "zero_round") {
    check_keys(p, {"delta", "b", "trials", "seed"});
    const int delta = p.value("delta", 10);
    const int b = p.value("b", 1);
    const long long trials = p.value("trials", 100000LL);
    const uint64_t seed = p.value("seed", 1ULL);
    require(delta >= 2 && b >= 1 && b <= delta, "need 1 <= b <= delta, delta >= 2");
    require(trials >= 1, "trials must be >= 1");
    json resolved = {{"check", check}, {"delta", delta}, {"b", b}, {"trials", trials},
                     {"seed", seed}};
    const std::string digest = params_digest(resolved);
    long long index = 0;
    for (const grablab::ZeroRoundStrategy& s : grablab::strategy_zoo()) {
      const uint64_t si = grablab::mix2(seed, grablab::mix2(0x7a72ULL, index));
      const double badness = grablab::zero_round_badness(s, delta, b, trials, si);
      grablab::LemmaVerdict v;
      v.hypothesis_holds = 2 * b <= delta;  // the lemma assumes b <= delta/2
      v.lhs = badness;
      v.rhs = 0.5;
      v.margin = v.lhs - v.rhs;
      v.conclusion_holds = !v.hypothesis_holds || badness >= 0.5 - 0.01;
      json line = verdict_line(check, digest, index++, si, v);
      line["strategy"] = s.name;
      line["closed_form"] = static_cast<double>(delta - b) / delta;
      line["trials"] = trials;
      emit(line);
    }
    return out;
  }

  throw grablab::UsageError("unknown oracle check '" + check +
                            "' (expected deviation|minsum|khintchine|paley_zygmund|b1|zero_round)");
}

}  // namespace

extern "C" {

const char* grab_last_error(void) { return t_last_error.c_str(); }

grab_status grab_generate_regular(int n, int delta, uint64_t seed, grab_graph** out) {
  return wrap([&] {
    require(out != nullptr, "out pointer is null");
    *out = new grab_graph{grablab::generate_regular_graph(n, delta, seed)};
  });
}

grab_status grab_graph_load(const char* path, grab_graph** out) {
  return wrap([&] {
    require(path != nullptr && out != nullptr, "null argument");
    *out = new grab_graph{grablab::load_graph(path)};
  });
}

grab_status grab_graph_save(const grab_graph* g, const char* path) {
  return wrap([&] {
    require(g != nullptr && path != nullptr, "null argument");
    grablab::save_graph(g->g, path);
  });
}

grab_status grab_graph_from_text(const char* text, grab_graph** out) {
  return wrap([&] {
    require(text != nullptr && out != nullptr, "null argument");
    *out = new grab_graph{grablab::graph_from_string(text)};
  });
}

grab_status grab_graph_to_text(const grab_graph* g, char** out_text) {
  return wrap([&] {
    require(g != nullptr && out_text != nullptr, "null argument");
    *out_text = dup_string(grablab::graph_to_string(g->g));
    require(*out_text != nullptr, "allocation failed");
  });
}

void grab_graph_free(grab_graph* g) { delete g; }

int grab_graph_n(const grab_graph* g) { return g ? g->g.n : -1; }

int grab_graph_delta(const grab_graph* g) { return g ? g->g.delta : -1; }

grab_status grab_diagnostics_json(const grab_graph* g, int exact_alpha_limit, double rho,
                                  double eps, char** out_json) {
  return wrap([&] {
    require(g != nullptr && out_json != nullptr, "null argument");
    const grablab::GraphDiagnostics d =
        grablab::compute_diagnostics(g->g, exact_alpha_limit, rho, eps);
    *out_json = dup_string(diagnostics_to_json(d).dump(2) + "\n");
    require(*out_json != nullptr, "allocation failed");
  });
}

grab_status grab_extract_ball(const grab_graph* g, int node, int radius, grab_graph** out) {
  return wrap([&] {
    require(g != nullptr && out != nullptr, "null argument");
    *out = new grab_graph{grablab::extract_ball(g->g, node, radius)};
  });
}

grab_status grab_extend_to_tree(const grab_graph* ball, long long n_target, int delta,
                                grab_graph** out) {
  return wrap([&] {
    require(ball != nullptr && out != nullptr, "null argument");
    *out = new grab_graph{grablab::extend_ball_to_tree(ball->g, n_target, delta)};
  });
}

grab_status grab_selfreduce(const grab_graph* g, const char* baseline, const char* config_json,
                            char** out_csv, char** out_audit_json) {
  return wrap([&] {
    require(g != nullptr && baseline != nullptr && out_csv != nullptr &&
                out_audit_json != nullptr,
            "null argument");
    const SelfReduceConfig c = parse_selfreduce_config(config_json);
    std::string csv, audit;
    run_selfreduce(g->g, baseline, c, &csv, &audit);
    *out_csv = dup_string(csv);
    *out_audit_json = dup_string(audit);
    require(*out_csv != nullptr && *out_audit_json != nullptr, "allocation failed");
  });
}

grab_status grab_oracle(const char* check, const char* params_json, char** out_jsonl) {
  return wrap([&] {
    require(check != nullptr && out_jsonl != nullptr, "null argument");
    *out_jsonl = dup_string(run_oracle(check, params_json));
    require(*out_jsonl != nullptr, "allocation failed");
  });
}

grab_status grab_round_bound(double p, int b, int delta, double n, double eps, double c_const,
                             double* out_rounds) {
  return wrap([&] {
    require(out_rounds != nullptr, "null argument");
    *out_rounds = grablab::round_bound(p, b, delta, n, eps, c_const);
  });
}

void grab_string_free(char* s) { std::free(s); }

}  // extern "C"

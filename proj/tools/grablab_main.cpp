// Command-line front door. Talks to the core exclusively through the C API.
#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <optional>
#include <string>
#include <vector>

#include "grablab.h"

using nlohmann::json;

namespace {

int exit_code(grab_status s) {
  switch (s) {
    case GRAB_OK:
      return 0;
    case GRAB_ERR_BUDGET:
      return 3;
    case GRAB_ERR_USAGE:
      return 4;
    case GRAB_ERR_IO:
    case GRAB_ERR_DOMAIN:
    default:
      return 2;  // input/domain errors share an exit code
  }
}

int fail(grab_status s) {
  std::fprintf(stderr, "grablab: %s\n", grab_last_error());
  return exit_code(s);
}

// Write-then-rename, so readers never observe a partial file.
bool write_file_atomic(const std::string& path, const char* data) {
  const std::string tmp = path + ".tmp";
  std::FILE* f = std::fopen(tmp.c_str(), "wb");
  if (!f) return false;
  const size_t len = std::strlen(data);
  bool ok = std::fwrite(data, 1, len, f) == len;
  ok = (std::fclose(f) == 0) && ok;
  if (ok) ok = std::rename(tmp.c_str(), path.c_str()) == 0;
  if (!ok) std::remove(tmp.c_str());
  return ok;
}

int write_or_fail(const std::string& path, const char* data, const char* what) {
  if (write_file_atomic(path, data)) return 0;
  std::fprintf(stderr, "grablab: cannot write %s file '%s'\n", what, path.c_str());
  return 2;
}

struct GraphHandle {  // scoped owner for grab_graph*
  grab_graph* g = nullptr;
  ~GraphHandle() { grab_graph_free(g); }
};

struct StringHandle {
  char* s = nullptr;
  ~StringHandle() { grab_string_free(s); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"grablab: a laboratory for b-grabbing, its reductions, and round elimination"};
  app.require_subcommand(1);

  // ---- gen -----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "Generate a random regular graph plus diagnostics");
  int gen_n = 0, gen_delta = 0, gen_alpha_limit = 40;
  uint64_t gen_seed = 1;
  double gen_rho = 2.0, gen_eps = 0.25;
  std::string gen_out = "graph.txt", gen_diag;
  gen->add_option("--n", gen_n, "node count")->required();
  gen->add_option("--delta", gen_delta, "degree")->required();
  gen->add_option("--seed", gen_seed, "random seed (default 1)")->envname("GRABLAB_SEED");
  gen->add_option("--out", gen_out, "graph output path (default graph.txt)");
  gen->add_option("--diag", gen_diag, "diagnostics JSON path (default: print to stdout)");
  gen->add_option("--exact-alpha-limit", gen_alpha_limit,
                  "exact independence number up to this n; <= 0 disables (default 40)");
  gen->add_option("--rho", gen_rho, "independence ceiling coefficient (default 2.0)");
  gen->add_option("--eps", gen_eps, "girth floor coefficient (default 0.25)");

  // ---- selfreduce ----------------------------------------------------------
  auto* sr = app.add_subcommand(
      "selfreduce", "Run the one-round-faster self-reduction trajectory for a baseline");
  std::string sr_graph, sr_baseline = "proposal", sr_mode = "exact", sr_port_mode = "random";
  std::string sr_csv = "trajectory.csv", sr_report = "audit.json";
  int sr_T = 1, sr_b = 1, sr_R = 1, sr_R_shared = 0, sr_idexp = 1;
  long long sr_samples = 10000, sr_trials = 1000;
  double sr_c_const = 2.0, sr_budget = 24.0;
  uint64_t sr_seed = 1;
  bool sr_audit = false, sr_no_audit = false;
  sr->add_option("--graph", sr_graph, "graph file (from gen)")->required();
  sr->add_option("--seed", sr_seed, "experiment seed (default 1)")->envname("GRABLAB_SEED");
  sr->add_option("--baseline", sr_baseline, "port1|uniform|proposal (default proposal)");
  sr->add_option("--T", sr_T, "baseline rounds (default 1)");
  sr->add_option("--b", sr_b, "grabs per node (default 1)");
  sr->add_option("--R", sr_R, "private bits per node (default 1)");
  sr->add_option("--R-shared", sr_R_shared, "shared bits (default 0)");
  sr->add_option("--id-exponent", sr_idexp, "ids uniform in [1, n^c] (default 1)");
  sr->add_option("--mode", sr_mode, "exact|mc (default exact)");
  sr->add_option("--samples", sr_samples, "Monte Carlo extensions per profile (default 10000)");
  sr->add_option("--trials", sr_trials, "badness trials per stage (default 1000)");
  sr->add_option("--c-const", sr_c_const, "envelope constant (default 2.0)");
  sr->add_option("--budget-bits", sr_budget, "exact enumeration cap, log2 (default 24)");
  sr->add_option("--port-mode", sr_port_mode, "random|fixed experiment ports (default random)");
  sr->add_flag("--audit", sr_audit, "force the exact audit");
  sr->add_flag("--no-audit", sr_no_audit, "skip the exact audit");
  sr->add_option("--csv", sr_csv, "trajectory CSV path (default trajectory.csv)");
  sr->add_option("--report", sr_report, "audit/report JSON path (default audit.json)");

  // ---- oracle ----------------------------------------------------------------
  auto* orc = app.add_subcommand("oracle", "Probability-lemma searches with exact evaluation");
  std::string orc_check, orc_out;
  int orc_delta = 0, orc_b = 0, orc_n = 0, orc_support = 0;
  long long orc_searches = 0, orc_trials = 0;
  uint64_t orc_seed = 1;
  std::vector<double> orc_lambdas;
  orc->add_option("check", orc_check,
                  "deviation|minsum|khintchine|paley_zygmund|b1|zero_round")
      ->required();
  auto* o_delta = orc->add_option("--delta", orc_delta, "vector length / degree");
  auto* o_b = orc->add_option("--b", orc_b, "grabs per node / target");
  auto* o_n = orc->add_option("--n", orc_n, "khintchine coordinates");
  auto* o_support = orc->add_option("--support", orc_support, "pmf support size");
  auto* o_searches = orc->add_option("--searches", orc_searches, "random cases to evaluate");
  auto* o_trials = orc->add_option("--trials", orc_trials, "zero-round game trials");
  auto* o_seed = orc->add_option("--seed", orc_seed, "random seed (default 1)")->envname("GRABLAB_SEED");
  auto* o_lambdas = orc->add_option("--lambda", orc_lambdas, "paley_zygmund lambda grid");
  orc->add_option("--out", orc_out, "verdict JSONL path (default: stdout)");

  // ---- bound -----------------------------------------------------------------
  auto* bnd = app.add_subcommand("bound", "Round lower bound implied by a badness value");
  double b_p = 0.0, b_n = 0.0, b_eps = 0.25, b_c = 2.0;
  int b_b = 1, b_delta = 3;
  bnd->add_option("--p", b_p, "badness, 0 < p < 1/2")->required();
  bnd->add_option("--b", b_b, "grabs per node (default 1)");
  bnd->add_option("--delta", b_delta, "degree (default 3)");
  bnd->add_option("--n", b_n, "node count")->required();
  bnd->add_option("--eps", b_eps, "girth-side coefficient (default 0.25)");
  bnd->add_option("--c-const", b_c, "envelope constant (default 2.0)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 4;  // usage errors exit 4; --help exits 0
  }

  if (gen->parsed()) {
    GraphHandle g;
    grab_status s = grab_generate_regular(gen_n, gen_delta, gen_seed, &g.g);
    if (s != GRAB_OK) return fail(s);
    s = grab_graph_save(g.g, gen_out.c_str());
    if (s != GRAB_OK) return fail(s);
    StringHandle diag;
    s = grab_diagnostics_json(g.g, gen_alpha_limit, gen_rho, gen_eps, &diag.s);
    if (s != GRAB_OK) return fail(s);
    if (gen_diag.empty()) {
      std::fputs(diag.s, stdout);
    } else {
      const int rc = write_or_fail(gen_diag, diag.s, "diagnostics");
      if (rc) return rc;
    }
    std::fprintf(stderr, "wrote %s (n=%d delta=%d)\n", gen_out.c_str(), gen_n, gen_delta);
    return 0;
  }

  if (sr->parsed()) {
    if (sr_audit && sr_no_audit) {
      std::fprintf(stderr, "grablab: --audit conflicts with --no-audit\n");
      return 4;
    }
    GraphHandle g;
    grab_status s = grab_graph_load(sr_graph.c_str(), &g.g);
    if (s != GRAB_OK) return fail(s);
    const int graph_delta = grab_graph_delta(g.g);
    if (2 * sr_b > graph_delta)
      std::fprintf(stderr, "grablab: note: b=%d exceeds delta/2=%g; zero-round floor not guaranteed\n",
                   sr_b, graph_delta / 2.0);
    json cfg = {{"seed", sr_seed},
                {"T", sr_T},
                {"b", sr_b},
                {"R", sr_R},
                {"R_shared", sr_R_shared},
                {"id_exponent", sr_idexp},
                {"mode", sr_mode},
                {"samples", sr_samples},
                {"trials", sr_trials},
                {"c_const", sr_c_const},
                {"budget_cap_bits", sr_budget},
                {"port_mode", sr_port_mode}};
    if (sr_audit) cfg["audit"] = true;
    if (sr_no_audit) cfg["audit"] = false;
    StringHandle csv, report;
    s = grab_selfreduce(g.g, sr_baseline.c_str(), cfg.dump().c_str(), &csv.s, &report.s);
    if (s != GRAB_OK) return fail(s);
    int rc = write_or_fail(sr_csv, csv.s, "trajectory");
    if (rc) return rc;
    rc = write_or_fail(sr_report, report.s, "report");
    if (rc) return rc;
    std::fputs(csv.s, stdout);
    return 0;
  }

  if (orc->parsed()) {
    json params = json::object();
    if (o_delta->count()) params["delta"] = orc_delta;
    if (o_b->count()) params["b"] = orc_b;
    if (o_n->count()) params["n"] = orc_n;
    if (o_support->count()) params["support"] = orc_support;
    if (o_searches->count()) params["searches"] = orc_searches;
    if (o_trials->count()) params["trials"] = orc_trials;
    if (o_seed->count()) params["seed"] = orc_seed;
    if (o_lambdas->count()) params["lambdas"] = orc_lambdas;
    StringHandle lines;
    const grab_status s = grab_oracle(orc_check.c_str(), params.dump().c_str(), &lines.s);
    if (s != GRAB_OK) return fail(s);
    if (orc_out.empty()) {
      std::fputs(lines.s, stdout);
    } else {
      const int rc = write_or_fail(orc_out, lines.s, "verdict");
      if (rc) return rc;
      long long count = 0;
      for (const char* c = lines.s; *c; ++c) count += (*c == '\n');
      std::fprintf(stdout, "wrote %lld verdict lines to %s\n", count, orc_out.c_str());
    }
    return 0;
  }

  if (bnd->parsed()) {
    double rounds = 0;
    const grab_status s = grab_round_bound(b_p, b_b, b_delta, b_n, b_eps, b_c, &rounds);
    if (s != GRAB_OK) return fail(s);
    std::fprintf(stdout, "%.10g\n", rounds);
    return 0;
  }

  return 4;
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "doctest.h"

using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Runs the CLI with the given arguments (and optional environment prefix).
RunResult run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" + GRABLAB_CLI_PATH + "\" " + args +
                          " > cli_stdout.txt 2> cli_stderr.txt";
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp("cli_stdout.txt");
  r.err = slurp("cli_stderr.txt");
  return r;
}

int count_lines(const std::string& s) {
  int n = 0;
  for (char c : s) n += (c == '\n');
  return n;
}

}  // namespace

TEST_CASE("gen writes a deterministic graph and diagnostics") {
  RunResult a = run("gen --n 20 --delta 3 --seed 7 --out cli_g1.graph --diag cli_d1.json");
  REQUIRE(a.code == 0);
  RunResult b = run("gen --n 20 --delta 3 --seed 7 --out cli_g2.graph --diag cli_d2.json");
  REQUIRE(b.code == 0);
  const std::string g1 = slurp("cli_g1.graph");
  CHECK(g1.size() > 0);
  CHECK(g1 == slurp("cli_g2.graph"));
  json diag = json::parse(slurp("cli_d1.json"));
  CHECK(diag.at("n") == 20);
  CHECK(diag.at("delta") == 3);
  CHECK(diag.at("girth").get<int>() >= 3);
  CHECK(diag.at("independence_exact").get<int>() >= 5);

  // Without --diag the JSON goes to stdout instead.
  RunResult c = run("gen --n 20 --delta 3 --seed 7 --out cli_g3.graph");
  REQUIRE(c.code == 0);
  CHECK(json::parse(c.out).at("n") == 20);
}

TEST_CASE("gen rejects infeasible parameters with exit 2") {
  CHECK(run("gen --n 3 --delta 3 --out cli_bad.graph").code == 2);
  CHECK(run("gen --n 5 --delta 3 --out cli_bad.graph").code == 2);  // odd n*delta
}

TEST_CASE("CLI usage errors exit 4 and --help exits 0") {
  CHECK(run("gen --delta 3").code == 4);          // missing required --n
  CHECK(run("").code == 4);                        // missing subcommand
  CHECK(run("frobnicate").code == 4);              // unknown subcommand
  CHECK(run("--help").code == 0);
  RunResult h = run("selfreduce --help");
  CHECK(h.code == 0);
  CHECK(h.out.find("--baseline") != std::string::npos);
}

TEST_CASE("selfreduce with T=0 emits a single-row trajectory") {
  REQUIRE(run("gen --n 20 --delta 3 --seed 7 --out cli_sr.graph --diag cli_srd.json").code == 0);
  RunResult r = run(
      "selfreduce --graph cli_sr.graph --baseline uniform --T 0 --trials 50 "
      "--csv cli_t0.csv --report cli_r0.json");
  REQUIRE(r.code == 0);
  const std::string csv = slurp("cli_t0.csv");
  CHECK(r.out == csv);
  CHECK(csv.rfind("stage,radius,badness_mean,badness_ci_low,badness_ci_high,envelope\n", 0) == 0);
  CHECK(count_lines(csv) == 2);  // header + one stage
  CHECK(csv.find("\n0,0,") != std::string::npos);
  json report = json::parse(slurp("cli_r0.json"));
  CHECK(report.at("stages").size() == 1);
  CHECK_FALSE(report.contains("audit"));  // audit needs T >= 1
}

TEST_CASE("selfreduce exact audit lands in the report") {
  REQUIRE(run("gen --n 8 --delta 3 --seed 3 --out cli_a.graph --diag cli_ad.json").code == 0);
  RunResult r = run(
      "selfreduce --graph cli_a.graph --baseline uniform --T 1 --R 1 --trials 100 "
      "--port-mode fixed --csv cli_a.csv --report cli_a.json");
  REQUIRE(r.code == 0);
  json report = json::parse(slurp("cli_a.json"));
  REQUIRE(report.contains("audit"));
  CHECK(report.at("audit").at("S_check") == true);
  CHECK(report.at("audit").at("H_wrong_eq") == true);
  CHECK(report.at("audit").at("MM_chain") == true);
  CHECK(report.at("stages").size() == 2);
}

TEST_CASE("budget overruns exit 3") {
  REQUIRE(run("gen --n 20 --delta 3 --seed 7 --out cli_b.graph --diag cli_bd.json").code == 0);
  RunResult r = run(
      "selfreduce --graph cli_b.graph --baseline uniform --T 1 --budget-bits 2 --trials 10 "
      "--csv cli_b.csv --report cli_b.json");
  CHECK(r.code == 3);
  CHECK(r.err.find("grablab:") != std::string::npos);
}

TEST_CASE("selfreduce flag conflicts and missing inputs") {
  CHECK(run("selfreduce --graph cli_sr.graph --audit --no-audit").code == 4);
  CHECK(run("selfreduce --graph cli_missing.graph").code == 2);
}

TEST_CASE("monte carlo mode runs on a larger instance") {
  REQUIRE(run("gen --n 200 --delta 3 --seed 11 --out cli_mc.graph --diag cli_mcd.json "
              "--exact-alpha-limit 0")
              .code == 0);
  RunResult r = run(
      "selfreduce --graph cli_mc.graph --baseline proposal --T 1 --mode mc --samples 100 "
      "--trials 30 --port-mode fixed --csv cli_mc.csv --report cli_mc.json");
  REQUIRE(r.code == 0);
  json report = json::parse(slurp("cli_mc.json"));
  CHECK(report.at("config").at("mode") == "mc");
  CHECK_FALSE(report.contains("audit"));
  REQUIRE(report.at("stages").size() == 2);
  for (const json& s : report.at("stages")) {
    const double mean = s.at("badness_mean").get<double>();
    CHECK(mean >= 0.0);
    CHECK(mean <= 1.0);
  }
}

TEST_CASE("oracle subcommand writes verdict JSONL") {
  RunResult r = run("oracle minsum --delta 6 --b 1 --searches 10 --out cli_v.jsonl");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("wrote 10 verdict lines") != std::string::npos);
  const std::string body = slurp("cli_v.jsonl");
  CHECK(count_lines(body) == 10);
  std::istringstream is(body);
  std::string line;
  while (std::getline(is, line)) {
    json l = json::parse(line);
    CHECK(l.at("check") == "minsum");
    CHECK(l.at("conclusion") == true);
  }
  RunResult direct = run("oracle khintchine --n 4 --searches 5");
  REQUIRE(direct.code == 0);
  CHECK(count_lines(direct.out) == 5);
  CHECK(run("oracle bogus").code == 4);
  CHECK(run("oracle").code == 4);  // the check argument is required
}

TEST_CASE("bound prints the formula value") {
  RunResult r = run("bound --p 0.25 --n 8 --delta 3 --eps 4");
  REQUIRE(r.code == 0);
  CHECK(r.out == "1\n");
  CHECK(run("bound --p 0.6 --n 8").code == 2);
  CHECK(run("bound --n 8").code == 4);  // --p is required
}

TEST_CASE("GRABLAB_SEED environment variable feeds the seed") {
  RunResult env = run("gen --n 20 --delta 3 --out cli_env1.graph --diag cli_ed1.json",
                      "GRABLAB_SEED=9");
  REQUIRE(env.code == 0);
  RunResult flag = run("gen --n 20 --delta 3 --seed 9 --out cli_env2.graph --diag cli_ed2.json");
  REQUIRE(flag.code == 0);
  CHECK(slurp("cli_env1.graph") == slurp("cli_env2.graph"));
  RunResult other = run("gen --n 20 --delta 3 --seed 1 --out cli_env3.graph --diag cli_ed3.json");
  REQUIRE(other.code == 0);
  CHECK(slurp("cli_env1.graph") != slurp("cli_env3.graph"));
}

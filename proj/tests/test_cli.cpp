#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "kemeny/cli.hpp"
#include "kemeny/specio.hpp"

using namespace kemeny;

namespace {

const std::string kFixtures = KEMENY_FIXTURE_DIR;

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

// Runs the installed binary through the shell, capturing stdout.
Outcome run_binary(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + KEMENY_CLI_PATH + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  std::string out;
  char buf[4096];
  std::size_t got;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out, ""};
}

std::string fixture(const char* name) { return kFixtures + "/" + name; }

}  // namespace

TEST_CASE("dtmc report") {
  const auto r = run({"dtmc", "--input", fixture("two_state.json"), "--mc", "100000", "--seed",
                      "42", "--no-timestamp"});
  CHECK(r.code == 0);
  const auto rep = parse_report(r.out);
  CHECK(rep.model_kind == "dtmc");
  for (const auto& k : rep.results["k_values"]) CHECK(std::abs(to_double(k) - 2.0) <= 1e-12);
  CHECK(rep.mc.size() == 1);
  CHECK(rep.all_pass());
  CHECK_FALSE(rep.timestamp.has_value());
}

TEST_CASE("diffusion report") {
  const auto r = run({"diffusion", "--input", fixture("bessel.json"), "--grid", "21"});
  CHECK(r.code == 0);
  const auto rep = parse_report(r.out);
  CHECK(std::abs(to_double(rep.results["kappa"]) - 0.2) < 1e-6);
  CHECK(std::abs(to_double(rep.results["gamma"]) - 0.4) < 1e-6);
  CHECK(rep.results["k_values"].size() == 21);
  CHECK(rep.timestamp.has_value());
}

TEST_CASE("verify") {
  auto r = run({"verify", "--input", fixture("flip.json"), "--no-timestamp"});
  CHECK(r.code == 0);
  auto rep = parse_report(r.out);
  CHECK(to_double(rep.results["residuals"]["hunter_margin"]) == 0.0);
  CHECK(rep.verdicts.at("constancy").pass);
  CHECK(rep.verdicts.count("khasminskii") == 1);

  r = run({"verify", "--input", fixture("cycle3.json"), "--mc", "20000", "--no-timestamp"});
  CHECK(r.code == 0);
  rep = parse_report(r.out);
  CHECK(rep.verdicts.at("occupation_lemma_max_abs_z").pass);
  CHECK(to_double(rep.results["occupation_control_max_abs_z"]) > 4.0);

  r = run({"verify", "--input", fixture("ctmc_two_state.json"), "--no-timestamp"});
  CHECK(r.code == 0);
  rep = parse_report(r.out);
  CHECK(rep.model_kind == "ctmc");
  CHECK(rep.verdicts.at("time_scaling").value == 0.0);

  r = run({"verify", "--input", fixture("bessel.json"), "--grid", "7", "--no-timestamp"});
  CHECK(r.code == 0);
  rep = parse_report(r.out);
  CHECK(rep.verdicts.at("anchor_invariance").pass);
  CHECK(rep.verdicts.at("metric_triangle").pass);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"dtmc"}).code == 1);
  CHECK(run({"dtmc", "--input", fixture("two_state.json"), "--streams", "0"}).code == 1);
  CHECK(run({"dtmc", "--input", "/nonexistent.json"}).code == 1);
  CHECK(run({"dtmc", "--input", fixture("ctmc_two_state.json")}).code == 1);
  CHECK(run({"dtmc", "--input", fixture("two_state.json"), "--mc", "10", "--from", "z"}).code == 1);
  CHECK(run({"diffusion", "--input", fixture("two_state.json")}).code == 1);
  const auto missing = run({"diffusion", "--input", fixture("ou.json")});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("truncate") != std::string::npos);
  CHECK(run({"diffusion", "--input", fixture("bessel.json"), "--mc", "10"}).code == 1);
  CHECK(run({"--help"}).code == 0);

  // A failing verdict: the OU truncation study does not grow tenfold.
  const auto ou = run({"diffusion", "--input", fixture("ou.json"), "--truncate", "1", "2", "3",
                       "4", "--grid", "3", "--no-timestamp"});
  CHECK(ou.code == 2);
  const auto rep = parse_report(ou.out);
  CHECK(rep.verdicts.at("gamma_increasing").pass);
  CHECK_FALSE(rep.verdicts.at("gamma_growth_ratio").pass);
  CHECK(rep.results["gamma_truncated"].size() == 4);
}

TEST_CASE("byte-identical reruns") {
  const std::vector<std::vector<std::string>> cases = {
      {"dtmc", "--input", fixture("two_state.json"), "--mc", "5000", "--seed", "7"},
      {"ctmc", "--input", fixture("ctmc_two_state.json"), "--mc", "5000"},
      {"verify", "--input", fixture("cycle3.json"), "--mc", "2000"},
      {"diffusion", "--input", fixture("bessel.json"), "--grid", "5", "--mc", "50", "--from",
       "1", "--to", "0.5"},
  };
  for (auto args : cases) {
    args.push_back("--no-timestamp");
    const auto a = run(args);
    const auto b = run(args);
    CHECK(a.out == b.out);
    CHECK(a.out.size() > 0);
  }
  const std::string line = "dtmc --input " + fixture("two_state.json") + " --mc 5000 --no-timestamp";
  const auto p = run_binary(line);
  const auto q = run_binary(line);
  CHECK(p.code == 0);
  CHECK(p.out == q.out);
}

TEST_CASE("seed from the environment") {
  const std::string base = "dtmc --input " + fixture("two_state.json") + " --mc 5000 --no-timestamp";
  const auto flag = run_binary(base + " --seed 9");
  const auto env = run_binary(base, "KEMENY_SEED=9");
  const auto both = run_binary(base + " --seed 9", "KEMENY_SEED=10");
  const auto other = run_binary(base, "KEMENY_SEED=10");
  CHECK(flag.out == env.out);
  CHECK(flag.out == both.out);
  CHECK(flag.out != other.out);
  CHECK(run_binary(base, "KEMENY_SEED=abc").code == 1);
}

TEST_CASE("output files") {
  const auto dir = std::filesystem::temp_directory_path() / "kemeny_cli_test";
  std::filesystem::create_directories(dir);
  const auto json = (dir / "report.json").string();
  const auto csv = (dir / "profile.csv").string();
  const auto r = run({"diffusion", "--input", fixture("bessel.json"), "--grid", "5", "--output",
                      json, "--csv", csv, "--compact"});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  const auto text = read_file(json);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(parse_report(text).results["k_values"].size() == 5);
  const auto table = read_file(csv);
  CHECK(table.rfind("x,K\n", 0) == 0);
  CHECK(std::count(table.begin(), table.end(), '\n') == 6);
  std::filesystem::remove_all(dir);
}

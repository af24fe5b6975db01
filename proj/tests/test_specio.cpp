#include <doctest.h>

#include <cmath>
#include <limits>

#include "kemeny/error.hpp"
#include "kemeny/report.hpp"
#include "kemeny/specio.hpp"

using namespace kemeny;

namespace {

ErrorCode chain_error(const std::string& text) {
  try {
    parse_chain_spec(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("parse_chain_spec unexpectedly succeeded: " << text);
  return ErrorCode::InvalidArgument;
}

ErrorCode diffusion_error(const std::string& text) {
  try {
    parse_diffusion_spec(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("parse_diffusion_spec unexpectedly succeeded: " << text);
  return ErrorCode::InvalidArgument;
}

std::string diffusion(const std::string& drift, const std::string& sigma, const std::string& left,
                      const std::string& right, const std::string& extra = "") {
  return R"({"kind":"diffusion","drift":")" + drift + R"(","sigma":")" + sigma +
         R"(","interval":{"left":)" + left + R"(,"right":)" + right +
         R"(},"left_boundary":"entrance","right_boundary":"reflecting")" + extra + "}";
}

}  // namespace

TEST_CASE("digest") {
  CHECK(input_digest("") == "fnv1a64:cbf29ce484222325");
  CHECK(input_digest("a") == "fnv1a64:af63dc4c8601ec8c");
  CHECK(input_digest("foobar") == "fnv1a64:85944171f73967e8");
}

TEST_CASE("chain specs") {
  auto in = parse_chain_spec(R"({"kind":"dtmc","P":[[0.5,0.5],[0.5,0.5]]})");
  REQUIRE(std::holds_alternative<TransitionMatrix>(in.model));
  CHECK(std::get<TransitionMatrix>(in.model).size() == 2);
  CHECK(in.labels == std::vector<std::string>{"1", "2"});

  in = parse_chain_spec(R"({"kind":"ctmc","Q":[[-1,1],[2,-2]],"labels":["up","down"]})");
  REQUIRE(std::holds_alternative<GeneratorMatrix>(in.model));
  CHECK(in.labels == std::vector<std::string>{"up", "down"});

  CHECK(chain_error(R"({"kind":"dtmc","P":[[1.0]]})") == ErrorCode::SchemaError);
  CHECK(chain_error(R"({"kind":"dtmc","P":[[1,0],[0,1]]})") == ErrorCode::NotIrreducible);
  CHECK(chain_error(R"({"kind":"dtmc","P":[[0.5,0.5],[0.5,0.5]],"extra":1})") ==
        ErrorCode::SchemaError);
  CHECK(chain_error(R"({"kind":"dtmc","Q":[[-1,1],[1,-1]]})") == ErrorCode::SchemaError);
  CHECK(chain_error(R"({"P":[[0.5,0.5],[0.5,0.5]]})") == ErrorCode::SchemaError);
  CHECK(chain_error(R"({"kind":"markov","P":[[0.5,0.5],[0.5,0.5]]})") == ErrorCode::SchemaError);
  CHECK(chain_error(R"({"kind":"dtmc","P":[[0.5,"x"],[0.5,0.5]]})") == ErrorCode::SchemaError);
  CHECK(chain_error(R"({"kind":"dtmc","P":[[0.5,0.5],[1]]})") == ErrorCode::NotSquare);
  CHECK(chain_error(R"({"kind":"dtmc","P":[[0.6,0.5],[0.5,0.5]]})") == ErrorCode::RowSumViolation);
  CHECK(chain_error(R"({"kind":"ctmc","Q":[[-1,0.5],[2,-2]]})") == ErrorCode::RowSumViolation);
  CHECK(chain_error(R"({"kind":"dtmc","P":[[0.5,0.5],[0.5,0.5]],"labels":["a"]})") ==
        ErrorCode::SchemaError);
  CHECK(chain_error(R"({"kind":"dtmc","P":[[0.5,0.5],[0.5,0.5]],"labels":["a","a"]})") ==
        ErrorCode::SchemaError);
  CHECK(chain_error("[1, 2]") == ErrorCode::SchemaError);
}

TEST_CASE("malformed json reports the line") {
  try {
    parse_chain_spec("{\n\"kind\": \"dtmc\",\n\"P\": [[0.5, 0.5],, [0.5, 0.5]]\n}");
    FAIL("expected MalformedJson");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MalformedJson);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("missing files") {
  CHECK_THROWS_WITH_AS(load_chain_spec("/nonexistent/spec.json"),
                       doctest::Contains("FileNotFound"), Error);
  const auto in = load_chain_spec(KEMENY_FIXTURE_DIR "/two_state.json");
  CHECK(std::get<TransitionMatrix>(in.model)(0, 1) == 0.3);
  CHECK(in.digest == input_digest(read_file(KEMENY_FIXTURE_DIR "/two_state.json")));
}

TEST_CASE("diffusion specs") {
  const auto b = load_diffusion_spec(KEMENY_FIXTURE_DIR "/bessel.json");
  CHECK(b.spec.drift(2.0) == 0.5);
  CHECK(b.spec.left == 0.0);
  CHECK(b.spec.right == 1.0);
  CHECK(b.spec.left_boundary == Boundary::Entrance);
  CHECK(b.spec.right_boundary == Boundary::Reflecting);
  CHECK(b.spec.anchor == 0.5);
  CHECK(b.warnings.empty());

  const auto o = load_diffusion_spec(KEMENY_FIXTURE_DIR "/ou.json");
  CHECK(std::isinf(o.spec.left));
  CHECK(o.spec.left < 0);
  CHECK(std::isinf(o.spec.right));
  CHECK(o.spec.anchor == 0.0);
  CHECK(o.spec.drift(4.0) == -2.0);

  auto half = parse_diffusion_spec(R"({"kind":"diffusion","drift":"-1","sigma":"1",
      "interval":{"left":2,"right":"inf"},"left_boundary":"reflecting",
      "right_boundary":"entrance"})");
  CHECK(half.spec.anchor == 2.5);
  CHECK(parse_diffusion_spec(diffusion("0", "1", "0", "1", R"(,"anchor":0.25)")).spec.anchor ==
        0.25);

  // sigma = x vanishes only at the endpoint 0: accepted with a warning.
  const auto edge = parse_diffusion_spec(diffusion("0", "x", "0", "1"));
  CHECK_FALSE(edge.warnings.empty());

  CHECK(diffusion_error(diffusion("0", "x - 0.5", "0", "1")) == ErrorCode::SigmaVanishes);
  CHECK(diffusion_error(diffusion("0", "y", "0", "1")) == ErrorCode::UnknownIdentifier);
  CHECK(diffusion_error(diffusion("0", "log(x", "0", "1")) == ErrorCode::ParseError);
  CHECK(diffusion_error(diffusion("log(x - 2)", "1", "0", "1")) == ErrorCode::DomainError);
  CHECK(diffusion_error(diffusion("0", "1", "1", "0")) == ErrorCode::InvalidArgument);
  CHECK(diffusion_error(diffusion("0", "1", R"("minus infinity")", "0")) == ErrorCode::SchemaError);
  CHECK(diffusion_error(diffusion("0", "1", "0", "1", R"(,"anchor":2)")) ==
        ErrorCode::InvalidArgument);
  CHECK(diffusion_error(diffusion("0", "1", "0", "1", R"(,"colour":2)")) == ErrorCode::SchemaError);
  CHECK(diffusion_error(R"({"kind":"diffusion","drift":"0","sigma":"1",
      "interval":{"left":0,"right":1},"left_boundary":"absorbing",
      "right_boundary":"reflecting"})") == ErrorCode::SchemaError);
  CHECK(diffusion_error(R"({"kind":"diffusion","drift":"0","sigma":"1",
      "interval":{"left":0,"right":1}})") == ErrorCode::SchemaError);
}

TEST_CASE("spec kind") {
  CHECK(spec_kind(R"({"kind":"ctmc"})") == "ctmc");
  CHECK_THROWS_AS(spec_kind("{}"), Error);
}

TEST_CASE("report round trip") {
  RunReport r;
  r.model_kind = "diffusion";
  r.input_digest = input_digest("x");
  r.parameters["seed"] = 42;
  r.parameters["truncate"] = numbers({1.0, 2.0});
  r.results["kappa"] = number(0.1 + 0.2);
  r.results["gamma"] = number(std::numeric_limits<double>::infinity());
  r.results["values"] = numbers({1.0 / 3, -0.0, 1e-300, 6.02214076e23,
                                 std::numeric_limits<double>::quiet_NaN()});
  McEstimate e;
  e.mean = 0.41666666666666669;
  e.std_error = 0.0031;
  e.n_samples = 20000;
  e.target_exact = 5.0 / 12;
  e.z_score = -std::numeric_limits<double>::infinity();
  r.mc.push_back({"hitting_time", e});
  r.verdicts["kappa_gamma"] = Verdict::at_most(1e-12, 1e-6);
  r.verdicts["gamma_growth_ratio"] = Verdict::above(1.91, 10.0);
  r.warnings.push_back("sigma vanishes at endpoint 0");
  r.timestamp = "2026-01-01T00:00:00Z";

  for (bool pretty : {true, false}) {
    const auto text = serialize(r, pretty);
    const auto back = parse_report(text);
    CHECK(back == r);
    CHECK(serialize(back, pretty) == text);
  }
  CHECK_FALSE(r.all_pass());
  CHECK(r.verdicts["kappa_gamma"].pass);
  CHECK(to_double(r.results["gamma"]) == std::numeric_limits<double>::infinity());

  CHECK_THROWS_AS(parse_report("{"), Error);
  CHECK_THROWS_AS(parse_report("{}"), Error);
}

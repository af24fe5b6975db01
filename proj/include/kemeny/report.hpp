#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "kemeny/sim.hpp"

namespace kemeny {

using Json = nlohmann::ordered_json;

/// A residual compared against a threshold: pass iff `value relation threshold`.
struct Verdict {
  double value = 0.0;
  double threshold = 0.0;
  /// One of "<=", "<", ">=", ">".
  std::string relation = "<=";
  bool pass = false;

  static Verdict at_most(double value, double threshold);
  static Verdict at_least(double value, double threshold);
  static Verdict above(double value, double threshold);
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

struct McSection {
  std::string name;
  McEstimate estimate;
};

struct RunReport {
  std::string model_kind;
  std::string input_digest;
  Json parameters = Json::object();
  Json results = Json::object();
  std::vector<McSection> mc;
  std::map<std::string, Verdict> verdicts;
  std::vector<std::string> warnings;
  std::optional<std::string> timestamp;

  bool all_pass() const;
};

/// Finite doubles become JSON numbers (shortest round-trip form); nan and
/// +-inf become the strings "nan", "inf", "-inf".
Json number(double v);
double to_double(const Json& j);
Json numbers(const std::vector<double>& v);

Json to_json(const McEstimate& e);
McEstimate mc_from_json(const Json& j);
Json to_json(const RunReport& r);
RunReport report_from_json(const Json& j);

std::string serialize(const RunReport& r, bool pretty = true);
/// MalformedJson or SchemaError on bad input.
RunReport parse_report(const std::string& text);

bool operator==(const McEstimate& a, const McEstimate& b);
bool operator==(const RunReport& a, const RunReport& b);

}  // namespace kemeny

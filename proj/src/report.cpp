#include "kemeny/report.hpp"

#include <cmath>
#include <limits>

#include "kemeny/error.hpp"

namespace kemeny {

namespace {

bool holds(double v, const std::string& rel, double t) {
  if (rel == "<=") return v <= t;
  if (rel == "<") return v < t;
  if (rel == ">=") return v >= t;
  if (rel == ">") return v > t;
  throw Error(ErrorCode::SchemaError, "unknown relation \"" + rel + "\"");
}

Verdict make(double v, double t, const char* rel) { return {v, t, rel, holds(v, rel, t)}; }

const Json& need(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorCode::SchemaError, std::string("report is missing \"") + key + "\"");
  return j[key];
}

std::optional<double> optional_number(const Json& j, const char* key) {
  if (!j.contains(key)) return std::nullopt;
  return to_double(j[key]);
}

bool same(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

bool same(const std::optional<double>& a, const std::optional<double>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || same(*a, *b);
}

}  // namespace

Verdict Verdict::at_most(double value, double threshold) { return make(value, threshold, "<="); }
Verdict Verdict::at_least(double value, double threshold) { return make(value, threshold, ">="); }
Verdict Verdict::above(double value, double threshold) { return make(value, threshold, ">"); }

bool RunReport::all_pass() const {
  for (const auto& [_, v] : verdicts)
    if (!v.pass) return false;
  return true;
}

Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double to_double(const Json& j) {
  if (j.is_number()) return j.get<double>();
  if (j == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (j == "inf") return std::numeric_limits<double>::infinity();
  if (j == "-inf") return -std::numeric_limits<double>::infinity();
  throw Error(ErrorCode::SchemaError, "expected a number, got " + j.dump());
}

Json numbers(const std::vector<double>& v) {
  Json out = Json::array();
  for (double x : v) out.push_back(number(x));
  return out;
}

Json to_json(const McEstimate& e) {
  Json j;
  j["mean"] = number(e.mean);
  j["std_error"] = number(e.std_error);
  j["n_samples"] = e.n_samples;
  if (e.target_exact) j["target_exact"] = number(*e.target_exact);
  if (e.z_score) j["z_score"] = number(*e.z_score);
  return j;
}

McEstimate mc_from_json(const Json& j) {
  McEstimate e;
  e.mean = to_double(need(j, "mean"));
  e.std_error = to_double(need(j, "std_error"));
  e.n_samples = need(j, "n_samples").get<std::uint64_t>();
  e.target_exact = optional_number(j, "target_exact");
  e.z_score = optional_number(j, "z_score");
  return e;
}

Json to_json(const RunReport& r) {
  Json j;
  j["model_kind"] = r.model_kind;
  j["input_digest"] = r.input_digest;
  j["parameters"] = r.parameters;
  j["results"] = r.results;
  j["mc"] = Json::array();
  for (const auto& s : r.mc) {
    Json m = {{"name", s.name}};
    m.update(to_json(s.estimate));
    j["mc"].push_back(std::move(m));
  }
  j["verdicts"] = Json::object();
  for (const auto& [name, v] : r.verdicts) {
    j["verdicts"][name] = {{"value", number(v.value)},
                           {"threshold", number(v.threshold)},
                           {"relation", v.relation},
                           {"pass", v.pass}};
  }
  j["warnings"] = r.warnings;
  if (r.timestamp) j["timestamp"] = *r.timestamp;
  return j;
}

RunReport report_from_json(const Json& j) {
  RunReport r;
  try {
    r.model_kind = need(j, "model_kind").get<std::string>();
    r.input_digest = need(j, "input_digest").get<std::string>();
    r.parameters = need(j, "parameters");
    r.results = need(j, "results");
    for (const auto& m : need(j, "mc"))
      r.mc.push_back({need(m, "name").get<std::string>(), mc_from_json(m)});
    for (const auto& [name, v] : need(j, "verdicts").items()) {
      r.verdicts[name] = {to_double(need(v, "value")), to_double(need(v, "threshold")),
                          need(v, "relation").get<std::string>(), need(v, "pass").get<bool>()};
    }
    if (j.contains("warnings")) r.warnings = j["warnings"].get<std::vector<std::string>>();
    if (j.contains("timestamp")) r.timestamp = j["timestamp"].get<std::string>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::SchemaError, e.what());
  }
  return r;
}

std::string serialize(const RunReport& r, bool pretty) {
  return to_json(r).dump(pretty ? 2 : -1) + "\n";
}

RunReport parse_report(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
  return report_from_json(j);
}

bool operator==(const McEstimate& a, const McEstimate& b) {
  return same(a.mean, b.mean) && same(a.std_error, b.std_error) && a.n_samples == b.n_samples &&
         same(a.target_exact, b.target_exact) && same(a.z_score, b.z_score);
}

bool operator==(const RunReport& a, const RunReport& b) {
  if (a.mc.size() != b.mc.size()) return false;
  for (std::size_t i = 0; i < a.mc.size(); ++i)
    if (a.mc[i].name != b.mc[i].name || !(a.mc[i].estimate == b.mc[i].estimate)) return false;
  if (a.verdicts.size() != b.verdicts.size()) return false;
  for (const auto& [name, v] : a.verdicts) {
    const auto it = b.verdicts.find(name);
    if (it == b.verdicts.end() || !same(v.value, it->second.value) ||
        !same(v.threshold, it->second.threshold) || v.relation != it->second.relation ||
        v.pass != it->second.pass)
      return false;
  }
  return a.model_kind == b.model_kind && a.input_digest == b.input_digest &&
         a.parameters == b.parameters && a.results == b.results && a.warnings == b.warnings &&
         a.timestamp == b.timestamp;
}

}  // namespace kemeny

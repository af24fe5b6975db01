#include "kemeny/specio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "kemeny/error.hpp"

namespace kemeny {

namespace {

using nlohmann::json;

[[noreturn]] void schema(const std::string& msg) { throw Error(ErrorCode::SchemaError, msg); }

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n');
    throw Error(ErrorCode::MalformedJson, "line " + std::to_string(line) + ": " + e.what());
  }
}

void require_object(const json& j) {
  if (!j.is_object()) schema("top level must be an object");
  if (!j.contains("kind") || !j["kind"].is_string()) schema("missing string field \"kind\"");
}

void only_fields(const json& j, std::initializer_list<const char*> allowed) {
  for (const auto& [key, _] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
      schema("unexpected field \"" + key + "\"");
  }
}

const json& field(const json& j, const char* name) {
  if (!j.contains(name)) schema(std::string("missing field \"") + name + "\"");
  return j[name];
}

Matrix read_matrix(const json& j, const char* name) {
  if (!j.is_array()) schema(std::string("\"") + name + "\" must be an array of rows");
  if (j.size() < 2) schema(std::string("\"") + name + "\" needs at least 2 states");
  std::vector<std::vector<double>> rows;
  for (const auto& row : j) {
    if (!row.is_array()) schema(std::string("\"") + name + "\" rows must be arrays");
    auto& r = rows.emplace_back();
    for (const auto& v : row) {
      if (!v.is_number()) schema(std::string("\"") + name + "\" entries must be numbers");
      r.push_back(v.get<double>());
    }
  }
  for (const auto& r : rows)
    if (r.size() != rows.size())
      throw Error(ErrorCode::NotSquare, std::string("\"") + name + "\" is not square");
  return Matrix::from_rows(rows);
}

double read_endpoint(const json& j, const char* name) {
  const json& v = field(j, name);
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
  }
  schema(std::string("\"") + name + "\" must be a number, \"-inf\" or \"inf\"");
}

Boundary read_boundary(const json& j, const char* name) {
  const json& v = field(j, name);
  if (v == "reflecting") return Boundary::Reflecting;
  if (v == "entrance") return Boundary::Entrance;
  schema(std::string("\"") + name + "\" must be \"reflecting\" or \"entrance\"");
}

Expr read_expr(const json& j, const char* name) {
  const json& v = field(j, name);
  if (!v.is_string()) schema(std::string("\"") + name + "\" must be a string");
  return parse_expression(v.get<std::string>());
}

}  // namespace

std::string input_digest(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string spec_kind(std::string_view json_text) {
  const json j = parse_json(json_text);
  require_object(j);
  return j["kind"].get<std::string>();
}

ChainInput parse_chain_spec(std::string_view json_text) {
  const json j = parse_json(json_text);
  require_object(j);
  const auto kind = j["kind"].get<std::string>();
  if (kind != "dtmc" && kind != "ctmc")
    schema("chain kind must be \"dtmc\" or \"ctmc\", got \"" + kind + "\"");
  const bool discrete = kind == "dtmc";
  const char* name = discrete ? "P" : "Q";
  only_fields(j, {"kind", name, "labels"});
  const Matrix m = read_matrix(field(j, name), name);
  const std::size_t n = m.rows();
  ChainInput out{discrete ? decltype(ChainInput::model)(validate_stochastic(m))
                          : decltype(ChainInput::model)(validate_generator(m)),
                 {},
                 input_digest(json_text)};
  if (j.contains("labels")) {
    const json& l = j["labels"];
    if (!l.is_array() || l.size() != n) schema("\"labels\" must be an array of one string per state");
    std::set<std::string> seen;
    for (const auto& v : l) {
      if (!v.is_string()) schema("\"labels\" entries must be strings");
      if (!seen.insert(v.get<std::string>()).second) schema("duplicate label " + v.dump());
      out.labels.push_back(v.get<std::string>());
    }
  } else {
    for (std::size_t i = 0; i < n; ++i) out.labels.push_back(std::to_string(i + 1));
  }
  return out;
}

ChainInput load_chain_spec(const std::string& path) { return parse_chain_spec(read_file(path)); }

DiffusionInput parse_diffusion_spec(std::string_view json_text) {
  const json j = parse_json(json_text);
  require_object(j);
  if (j["kind"] != "diffusion") schema("kind must be \"diffusion\"");
  only_fields(j, {"kind", "drift", "sigma", "interval", "left_boundary", "right_boundary",
                  "anchor"});
  DiffusionInput out;
  out.digest = input_digest(json_text);
  DiffusionSpec& s = out.spec;
  s.drift = read_expr(j, "drift");
  s.sigma = read_expr(j, "sigma");
  const json& iv = field(j, "interval");
  if (!iv.is_object()) schema("\"interval\" must be an object");
  only_fields(iv, {"left", "right"});
  s.left = read_endpoint(iv, "left");
  s.right = read_endpoint(iv, "right");
  s.left_boundary = read_boundary(j, "left_boundary");
  s.right_boundary = read_boundary(j, "right_boundary");
  if (j.contains("anchor")) {
    if (!j["anchor"].is_number()) schema("\"anchor\" must be a number");
    s.anchor = j["anchor"].get<double>();
  } else if (std::isfinite(s.left) && std::isfinite(s.right)) {
    s.anchor = 0.5 * (s.left + s.right);
  } else if (std::isfinite(s.left)) {
    s.anchor = s.left + 0.5;
  } else if (std::isfinite(s.right)) {
    s.anchor = s.right - 0.5;
  } else {
    s.anchor = 0.0;
  }
  out.warnings = validate_spec(s);
  return out;
}

DiffusionInput load_diffusion_spec(const std::string& path) {
  return parse_diffusion_spec(read_file(path));
}

}  // namespace kemeny

#include "kemeny/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "kemeny/error.hpp"

namespace kemeny {

namespace {

constexpr std::uint64_t kOccupationStreams = 1ull << 32;
constexpr std::uint64_t kControlStreams = 2ull << 32;

Json common_parameters(const RunOptions& o) {
  Json p;
  p["input"] = o.input;
  p["mc"] = o.mc;
  p["seed"] = o.seed;
  p["streams"] = o.streams;
  p["verify"] = o.verify;
  return p;
}

McOptions mc_options(const RunOptions& o, std::uint64_t first_stream = 0) {
  McOptions m;
  m.seed = o.seed;
  m.streams = o.streams;
  m.first_stream = first_stream;
  m.exec = o.exec;
  return m;
}

std::size_t resolve_state(const ChainInput& in, const std::optional<std::string>& from) {
  if (!from) return 0;
  const auto it = std::find(in.labels.begin(), in.labels.end(), *from);
  if (it != in.labels.end()) return static_cast<std::size_t>(it - in.labels.begin());
  try {
    std::size_t used = 0;
    const long v = std::stol(*from, &used);
    if (used == from->size() && v >= 1 && static_cast<std::size_t>(v) <= in.labels.size())
      return static_cast<std::size_t>(v - 1);
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, "unknown state \"" + *from + "\"");
}

double max_abs_z(const std::vector<McEstimate>& v) {
  double m = 0.0;
  for (const auto& e : v) m = std::max(m, std::abs(e.z_score.value_or(0.0)));
  return m;
}

void fill_chain_results(RunReport& r, const ChainInput& in, const StationaryDistribution& pi,
                        const KemenyReport& k) {
  r.results["n"] = in.labels.size();
  r.results["labels"] = in.labels;
  r.results["pi"] = numbers(pi.pi);
  r.results["k_values"] = numbers(k.k_values);
  r.results["kappa"] = number(k.kappa);
  r.results["spread"] = number(k.spread);
  Json res = Json::object();
  for (const auto& [name, v] : k.residuals) res[name] = number(v);
  r.results["residuals"] = res;
}

void add_chain_mc(RunReport& r, const std::string& label, McEstimate e) {
  r.verdicts["mc_kemeny_abs_z"] = Verdict::at_most(std::abs(e.z_score.value_or(0.0)), 4.0);
  r.mc.push_back({"kemeny_from_" + label, std::move(e)});
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string csv_for(const RunReport& r) {
  std::ostringstream os;
  os.precision(17);
  const auto& k = r.results.at("k_values");
  if (r.model_kind == "diffusion") {
    os << "x,K\n";
    const auto& g = r.results.at("grid");
    for (std::size_t i = 0; i < k.size(); ++i) os << to_double(g[i]) << ',' << to_double(k[i]) << '\n';
  } else {
    os << "state,label,K\n";
    const auto& l = r.results.at("labels");
    for (std::size_t i = 0; i < k.size(); ++i)
      os << i + 1 << ',' << l[i].get<std::string>() << ',' << to_double(k[i]) << '\n';
  }
  return os.str();
}

}  // namespace

RunReport run_dtmc(const ChainInput& in, const RunOptions& opts) {
  const auto& p = std::get<TransitionMatrix>(in.model);
  RunReport r;
  r.model_kind = "dtmc";
  r.input_digest = in.digest;
  r.parameters = common_parameters(opts);
  if (opts.from) r.parameters["from"] = *opts.from;

  const auto pi = stationary_distribution(p);
  const auto k = kemeny_function(p, opts.exec);
  fill_chain_results(r, in, pi, k);
  const double scale = std::max(1.0, k.kappa);
  const auto& res = k.residuals;
  r.verdicts["constancy"] = Verdict::at_most(k.spread, 1e-9 * scale);
  r.verdicts["dual_identity"] = Verdict::at_most(res.at("dual_identity"), 1e-9 * scale);
  r.verdicts["dual_kappa"] = Verdict::at_most(res.at("dual_kappa"), 1e-9);
  r.verdicts["trace_identity"] = Verdict::at_most(res.at("trace_identity"), 1e-8);
  r.verdicts["return_time_identity"] = Verdict::at_most(res.at("return_time_identity"), 1e-9 * scale);
  r.verdicts["kac_identity"] = Verdict::at_most(res.at("kac_identity"), 1e-9);
  r.verdicts["occupation_duality"] = Verdict::at_most(res.at("occupation_duality"), 1e-9);
  r.verdicts["hunter_bound"] = Verdict::at_least(res.at("hunter_margin"), -1e-12 * scale);

  const std::size_t n = p.size();
  if (opts.verify) {
    const auto dual = dual_chain(p, pi);
    const double involution = max_abs_difference(dual_chain(dual, pi).matrix(), p.matrix());
    r.verdicts["dual_involution"] = Verdict::at_most(involution, 1e-12);
    const auto moved = left_multiply(pi.pi, p.matrix());
    r.verdicts["stationary_residual"] = Verdict::at_most(max_abs_difference(moved, pi.pi), 1e-10);
    double row_sums = 0.0;
    double khas = 0.0;
    std::vector<double> ratios(n);
    for (std::size_t z = 0; z < n; ++z) {
      const auto m1 = mean_entry_times(p, z);
      const auto g = occupation_matrix(p, z);
      for (std::size_t x = 0; x < n; ++x) {
        double s = 0.0;
        for (double v : g.g.row(x)) s += v;
        row_sums = std::max(row_sums, std::abs(s - m1.mean[x]));
      }
      ratios[z] = khasminskii_ratio(entry_time_second_moments(p, z, m1));
      khas = std::max(khas, ratios[z]);
    }
    r.results["khasminskii_ratios"] = numbers(ratios);
    r.verdicts["occupation_row_sums"] = Verdict::at_most(row_sums, 1e-10);
    r.verdicts["khasminskii"] = Verdict::at_most(khas, 1.0);
  }

  if (opts.mc > 0) {
    const std::size_t x = resolve_state(in, opts.from);
    add_chain_mc(r, in.labels[x], estimate_kemeny_dtmc(p, x, opts.mc, mc_options(opts)));
    if (opts.verify) {
      const auto lemma =
          verify_occupation_lemma_dtmc(p, opts.mc, mc_options(opts, kOccupationStreams));
      for (std::size_t y = 0; y < n; ++y)
        r.mc.push_back({"occupation_lemma_" + in.labels[y], lemma[y]});
      r.verdicts["occupation_lemma_max_abs_z"] = Verdict::at_most(max_abs_z(lemma), 4.0);
      // Fixed start and target: the law of X_S differs from the start law.
      const auto control = verify_occupation_lemma_dtmc(
          p, opts.mc, mc_options(opts, kControlStreams), {std::size_t{0}, n - 1});
      for (std::size_t y = 0; y < n; ++y)
        r.mc.push_back({"occupation_control_" + in.labels[y], control[y]});
      r.results["occupation_control_max_abs_z"] = number(max_abs_z(control));
    }
  }
  return r;
}

RunReport run_ctmc(const ChainInput& in, const RunOptions& opts) {
  const auto& q = std::get<GeneratorMatrix>(in.model);
  RunReport r;
  r.model_kind = "ctmc";
  r.input_digest = in.digest;
  r.parameters = common_parameters(opts);
  if (opts.from) r.parameters["from"] = *opts.from;

  const auto pi = stationary_ct(q);
  const auto k = kemeny_function_ct(q, opts.exec);
  fill_chain_results(r, in, pi, k);
  r.results["uniformization_rate"] = number(default_uniformization_rate(q));
  const double scale = std::max(1.0, k.kappa);
  const auto& res = k.residuals;
  r.verdicts["constancy"] = Verdict::at_most(k.spread, 1e-9 * scale);
  r.verdicts["dual_kappa"] = Verdict::at_most(res.at("dual_kappa"), 1e-9);
  r.verdicts["dual_identity"] = Verdict::at_most(res.at("dual_identity"), 1e-9 * scale);
  r.verdicts["generator_duality"] = Verdict::at_most(res.at("generator_duality"), 1e-12);
  r.verdicts["uniformization"] = Verdict::at_most(res.at("uniformization"), 1e-9);

  if (opts.verify) {
    const auto dual = dual_generator(q, pi);
    r.verdicts["dual_involution"] =
        Verdict::at_most(max_abs_difference(dual_generator(dual, pi).matrix(), q.matrix()), 1e-12);
    const double lambda = default_uniformization_rate(q);
    const double doubled = uniformization_crosscheck(q, 2.0 * lambda, opts.exec);
    r.results["uniformization_doubled_rate"] = number(doubled);
    r.verdicts["uniformization_doubled_rate"] = Verdict::at_most(doubled, 1e-9);
    Matrix twice = q.matrix();
    for (std::size_t i = 0; i < twice.rows(); ++i)
      for (double& v : twice.row(i)) v *= 2.0;
    const auto k2 = kemeny_function_ct(validate_generator(twice), opts.exec);
    double scaling = 0.0;
    for (std::size_t x = 0; x < q.size(); ++x)
      scaling = std::max(scaling, std::abs(2.0 * k2.k_values[x] - k.k_values[x]));
    r.verdicts["time_scaling"] = Verdict::at_most(scaling, 0.0);
  }

  if (opts.mc > 0) {
    const std::size_t x = resolve_state(in, opts.from);
    add_chain_mc(r, in.labels[x], estimate_kemeny_ctmc(q, x, opts.mc, mc_options(opts)));
  }
  return r;
}

RunReport run_diffusion(const DiffusionInput& in, const RunOptions& opts) {
  const DiffusionSpec& spec = in.spec;
  RunReport r;
  r.model_kind = "diffusion";
  r.input_digest = in.digest;
  r.warnings = in.warnings;
  r.parameters = common_parameters(opts);
  r.parameters["grid"] = opts.grid;
  r.parameters["truncate"] = numbers(opts.truncate);
  if (opts.step) r.parameters["step"] = number(*opts.step);
  if (opts.band) r.parameters["band"] = number(*opts.band);
  if (opts.from) r.parameters["from"] = *opts.from;
  if (opts.to) r.parameters["to"] = number(*opts.to);

  const bool bounded = std::isfinite(spec.left) && std::isfinite(spec.right);
  if (!bounded && opts.truncate.empty())
    throw Error(ErrorCode::TruncationRequired,
                "the interval is unbounded; pass --truncate R for gamma and the K profile");
  if (opts.grid < 2) throw Error(ErrorCode::InvalidArgument, "--grid needs at least 2 points");

  const auto a = build_analysis(spec);
  r.results["interval"] = {number(spec.left), number(spec.right)};
  r.results["anchor"] = number(spec.anchor);
  r.results["mass"] = number(a.mass());

  // Truncation study: gamma over [-R, R] for each requested radius.
  if (!opts.truncate.empty()) {
    auto radii = opts.truncate;
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());
    Json study = Json::array();
    std::vector<double> g;
    for (double radius : radii) {
      g.push_back(gamma(a, radius).value);
      study.push_back({{"radius", number(radius)}, {"gamma", number(g.back())}});
    }
    r.results["gamma_truncated"] = study;
    bool divergent = false;
    if (g.size() >= 2) {
      double step = std::numeric_limits<double>::infinity();
      for (std::size_t i = 1; i < g.size(); ++i) step = std::min(step, g[i] - g[i - 1]);
      r.verdicts["gamma_increasing"] = Verdict::above(step, 0.0);
      // Growth witness: gamma at the largest radius over gamma at half of it.
      const auto half = std::find(radii.begin(), radii.end(), 0.5 * radii.back());
      if (half != radii.end()) {
        const double ratio = g.back() / g[static_cast<std::size_t>(half - radii.begin())];
        r.verdicts["gamma_growth_ratio"] = Verdict::above(ratio, 10.0);
        divergent = r.verdicts["gamma_increasing"].pass && r.verdicts["gamma_growth_ratio"].pass;
      }
    }
    r.results["gamma_status"] =
        divergent ? "divergent (truncation study)" : "inconclusive (truncation study)";
  }

  // K profile on the interval itself, or on the widest truncation.
  const double radius =
      bounded ? 0.0 : *std::max_element(opts.truncate.begin(), opts.truncate.end());
  const DiffusionAnalysis profiled = bounded ? a : build_analysis(truncated(spec, radius));
  if (!bounded) r.results["profile_radius"] = number(radius);
  const auto k = kemeny_profile(profiled, chebyshev_grid(profiled.spec(), opts.grid), opts.exec);
  r.results["grid"] = numbers(k.grid);
  r.results["k_values"] = numbers(k.k_values);
  r.results["kappa"] = number(k.kappa);
  r.results["gamma"] = number(k.gamma);
  r.results["spread"] = number(k.spread);
  r.results["residual_gamma"] = number(k.residual_gamma);
  if (bounded && !r.results.contains("gamma_status"))
    r.results["gamma_status"] = std::isfinite(k.gamma) ? "finite" : "divergent";
  r.verdicts["constancy"] = Verdict::at_most(k.spread, 1e-6 * std::max(1.0, k.kappa));
  if (std::isfinite(k.gamma)) r.verdicts["kappa_gamma"] = Verdict::at_most(k.residual_gamma, 1e-6);

  if (opts.verify) {
    // Anchor invariance: move the anchor and compare S-differences.
    DiffusionSpec moved = profiled.spec();
    moved.anchor = 0.5 * (moved.anchor + profiled.upper());
    const auto b = build_analysis(moved);
    const auto grid = chebyshev_grid(profiled.spec(), 5);
    double drift = std::abs(gamma(profiled).value - gamma(b).value);
    for (double x : grid)
      for (double z : grid)
        drift = std::max(drift, std::abs(expected_hitting(profiled, x, z) - expected_hitting(b, x, z)));
    r.verdicts["anchor_invariance"] = Verdict::at_most(drift, 1e-9);

    // Triangle inequality for d = sqrt(h) on random triples of the domain.
    std::mt19937_64 gen(opts.seed);
    std::uniform_real_distribution<double> u(profiled.lower(), profiled.upper());
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < 1000; ++i) {
      const double x = u(gen), y = u(gen), w = u(gen);
      const double lhs = std::sqrt(h_metric(profiled, x, y));
      const double rhs = std::sqrt(h_metric(profiled, x, w)) + std::sqrt(h_metric(profiled, w, y));
      worst = std::max(worst, lhs - rhs - 1e-12 * std::max(1.0, rhs));
    }
    r.verdicts["metric_triangle"] = Verdict::at_most(worst, 0.0);
  }

  if (opts.mc > 0) {
    if (!opts.from || !opts.to)
      throw Error(ErrorCode::InvalidArgument, "diffusion --mc needs --from and --to");
    double x = 0.0;
    try {
      x = std::stod(*opts.from);
    } catch (const std::exception&) {
      throw Error(ErrorCode::InvalidArgument, "--from must be a number for diffusions");
    }
    EulerOptions euler;
    euler.step = opts.step;
    euler.band = opts.band;
    const auto e = estimate_hitting_diffusion(a, x, *opts.to, opts.mc, mc_options(opts), euler);
    const double rel = std::abs(e.mean - *e.target_exact) / std::abs(*e.target_exact);
    r.verdicts["mc_hitting_relative_error"] = Verdict::at_most(rel, 0.05);
    r.mc.push_back({"hitting_time", e});
  }
  return r;
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kemeny function of Markov chains and one-dimensional diffusions", "kemeny"};
  app.require_subcommand(1);
  RunOptions o;
  bool compact = false, no_timestamp = false;
  std::string csv, output;
  std::optional<std::uint64_t> seed;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", o.input, "model file (JSON)")->required();
    sub->add_option("--mc", o.mc, "Monte Carlo samples (0 = none)");
    sub->add_option("--seed", seed, "RNG seed (default 42, or $KEMENY_SEED)");
    sub->add_option("--streams", o.streams, "RNG streams")->check(CLI::PositiveNumber);
    sub->add_option("--from", o.from, "start state (label or 1-based index) or point");
    sub->add_flag("--compact", compact, "single-line JSON");
    sub->add_option("--csv", csv, "also write the K profile as CSV");
    sub->add_option("--output", output, "write the report here instead of stdout");
    sub->add_flag("--no-timestamp", no_timestamp, "omit the timestamp");
  };
  auto add_diffusion = [&](CLI::App* sub) {
    sub->add_option("--grid", o.grid, "K profile grid size");
    sub->add_option("--truncate", o.truncate, "truncation radii for gamma")->expected(1, -1);
    sub->add_option("--step", o.step, "Euler step h");
    sub->add_option("--band", o.band, "absorption band");
    sub->add_option("--to", o.to, "target point for --mc");
  };
  auto* dtmc = app.add_subcommand("dtmc", "discrete-time chain");
  auto* ctmc = app.add_subcommand("ctmc", "continuous-time chain");
  auto* diffusion = app.add_subcommand("diffusion", "one-dimensional diffusion");
  auto* verify = app.add_subcommand("verify", "full identity suite for the input's kind");
  for (auto* sub : {dtmc, ctmc, diffusion, verify}) add_common(sub);
  for (auto* sub : {diffusion, verify}) add_diffusion(sub);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return 1;
  }

  try {
    if (seed) {
      o.seed = *seed;
    } else if (const char* env = std::getenv("KEMENY_SEED")) {
      std::size_t used = 0;
      const std::string s = env;
      try {
        o.seed = std::stoull(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != s.size())
        throw Error(ErrorCode::InvalidArgument, "KEMENY_SEED must be an unsigned integer");
    }

    const std::string text = read_file(o.input);
    std::string kind;
    if (dtmc->parsed()) kind = "dtmc";
    if (ctmc->parsed()) kind = "ctmc";
    if (diffusion->parsed()) kind = "diffusion";
    if (verify->parsed()) {
      kind = spec_kind(text);
      o.verify = true;
    }
    RunReport report;
    if (kind == "diffusion") {
      report = run_diffusion(parse_diffusion_spec(text), o);
    } else {
      const auto in = parse_chain_spec(text);
      const bool discrete = std::holds_alternative<TransitionMatrix>(in.model);
      if (kind != "dtmc" && kind != "ctmc") kind = discrete ? "dtmc" : "ctmc";
      if ((kind == "dtmc") != discrete)
        throw Error(ErrorCode::SchemaError, "model kind does not match the subcommand");
      report = discrete ? run_dtmc(in, o) : run_ctmc(in, o);
    }
    if (!no_timestamp) report.timestamp = utc_now();

    const std::string body = serialize(report, !compact);
    if (output.empty()) {
      out << body;
    } else {
      std::ofstream f(output, std::ios::binary);
      if (!(f << body)) throw Error(ErrorCode::FileNotFound, "cannot write " + output);
    }
    if (!csv.empty()) {
      std::ofstream f(csv, std::ios::binary);
      if (!(f << csv_for(report))) throw Error(ErrorCode::FileNotFound, "cannot write " + csv);
    }
    return report.all_pass() ? 0 : 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace kemeny

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kemeny/report.hpp"
#include "kemeny/specio.hpp"

namespace kemeny {

struct RunOptions {
  std::string input;
  std::uint64_t mc = 0;
  std::uint64_t seed = 42;
  std::uint64_t streams = 16;
  std::size_t grid = 21;
  std::vector<double> truncate;
  std::optional<double> step;
  std::optional<double> band;
  /// Chains: a label or 1-based index. Diffusions: a point.
  std::optional<std::string> from;
  std::optional<double> to;
  /// Run the extended identity suite.
  bool verify = false;
  Exec exec = Exec::Parallel;
};

RunReport run_dtmc(const ChainInput& in, const RunOptions& opts);
RunReport run_ctmc(const ChainInput& in, const RunOptions& opts);
RunReport run_diffusion(const DiffusionInput& in, const RunOptions& opts);

/// The whole command line without the program name. Writes the report (or
/// help) to `out` and diagnostics to `err`. Returns 0 when every verdict
/// passes, 2 when one fails, 1 on usage or input errors.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kemeny

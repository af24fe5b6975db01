#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "kemeny/chain.hpp"
#include "kemeny/ctmc.hpp"
#include "kemeny/diffusion.hpp"

namespace kemeny {

/// FNV-1a 64-bit digest of the raw bytes, as "fnv1a64:<16 hex digits>".
std::string input_digest(std::string_view bytes);

/// Reads a whole file; FileNotFound if it cannot be opened.
std::string read_file(const std::string& path);

/// The "kind" field of a spec document (dtmc, ctmc or diffusion).
std::string spec_kind(std::string_view json_text);

struct ChainInput {
  std::variant<TransitionMatrix, GeneratorMatrix> model;
  /// One per state; "1".."n" when the file has none.
  std::vector<std::string> labels;
  std::string digest;
};

/// {"kind":"dtmc","P":[[...]]} or {"kind":"ctmc","Q":[[...]]}, optional
/// "labels". Errors: MalformedJson (with line), SchemaError, then the
/// validation errors of the matrix type.
ChainInput parse_chain_spec(std::string_view json_text);
ChainInput load_chain_spec(const std::string& path);

struct DiffusionInput {
  DiffusionSpec spec;
  std::vector<std::string> warnings;
  std::string digest;
};

/// {"kind":"diffusion","drift":str,"sigma":str,"interval":{"left":num|"-inf",
/// "right":num|"inf"},"left_boundary":...,"right_boundary":...,"anchor":num?}
/// The anchor defaults to the midpoint, to half a unit inside the finite end
/// of a half-line, or to 0 on the whole line. Expressions are probed on the
/// validation grid before returning.
DiffusionInput parse_diffusion_spec(std::string_view json_text);
DiffusionInput load_diffusion_spec(const std::string& path);

}  // namespace kemeny

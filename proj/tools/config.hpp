#pragma once

// Run configuration for the qmlab front end.
//
// Input is a small TOML subset: `key = value` lines, `[table]` headers,
// basic and literal strings, integers, floats (including inf), booleans and
// (nested, possibly multi-line) arrays.  Every command has a fixed key
// schema; unknown keys are rejected.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "qmlab/analysis.hpp"
#include "qmlab/quasimodes.hpp"
#include "qmlab/symbols.hpp"

namespace qmlab::cli {

struct Value {
  enum class Type { boolean, integer, real, string, array };

  Type type = Type::integer;
  bool boolean = false;
  double number = 0.0;
  std::string text;
  std::vector<Value> items;
  int line = 0;
};

/// Flat key -> value map; keys inside `[t]` are stored as "t.key".
using Document = std::map<std::string, Value>;

/// Throws invalid_argument with the line number on malformed input.
Document parse_document(std::string_view text);

enum class KeyType { integer, real, real_or_inf, string, boolean, int_list, real_list,
                     real_or_inf_list, string_list, matrix };

struct KeySpec {
  std::string name;  // "table.key" for keys in a table
  KeyType type;
  bool required = false;
  std::string default_text;
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string summary;
  std::vector<KeySpec> keys;
};

const std::vector<CommandSpec>& command_specs();
const CommandSpec& command_spec(std::string_view name);
/// Key listing appended to `qmlab <command> --help`.
std::string describe_keys(const CommandSpec& spec);

struct RunConfig {
  std::string command;
  std::uint64_t seed = 0;
  int n = 2;
  std::vector<Symbol> symbols;
  std::vector<std::string> symbol_text;

  // delta
  double p = 2.0;
  int r = 1;

  // admissibility / reduce
  std::vector<double> x;
  std::vector<double> xi;
  AdmissibilityTolerances tols;
  std::optional<Eigen::MatrixXd> coordinate_change;
  bool project_base = false;
  double box = 0.1;

  // defect / sweep
  QuasimodeSpec quasimode;
  std::optional<int> grid_points;
  int kmax = 3;
  std::string route = "auto";
  std::string check = "none";
  std::vector<double> lambdas;
  std::vector<double> p_list;
  GridPolicy grid;
  double upper_tolerance = 0.15;
  std::optional<double> saturation_tolerance;

  // compose-check
  int random_pairs = 0;
  int degree = 2;
  std::vector<double> h_list;
  std::vector<double> xi0;
  double sigma = 0.35;
  double composition_tol = 1e-8;
  double max_slope = -0.9;
};

/// Validates `text` against the schema of `command`; fills defaults.
/// Errors (invalid_argument) name the offending key.
RunConfig parse_config(std::string_view text, const std::string& command);

}  // namespace qmlab::cli

#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "qmlab/error.hpp"
#include "qmlab/symbol_text.hpp"

namespace qmlab::cli {

namespace {

[[noreturn]] void syntax_error(int line, const std::string& what) {
  fail(ErrorKind::invalid_argument, "config line " + std::to_string(line) + ": " + what);
}

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Document parse() {
    Document doc;
    std::string table;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        skip_spaces();
        table = parse_key();
        skip_spaces();
        expect(']');
        end_of_line();
        continue;
      }
      const int line = line_;
      const std::string key = parse_key();
      skip_spaces();
      expect('=');
      skip_spaces();
      Value v = parse_value();
      v.line = line;
      end_of_line();
      const std::string full = table.empty() ? key : table + "." + key;
      if (!doc.emplace(full, std::move(v)).second) syntax_error(line, "duplicate key '" + full + "'");
    }
    return doc;
  }

 private:
  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  void advance() {
    if (s_[pos_] == '\n') ++line_;
    ++pos_;
  }

  void expect(char c) {
    if (eof() || peek() != c) syntax_error(line_, std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_spaces() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (!eof() && peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_spaces();
      skip_comment();
      if (eof()) return;
      if (peek() == '\n' || peek() == '\r') {
        advance();
      } else {
        return;
      }
    }
  }

  // Whitespace, comments and newlines inside arrays.
  void skip_array_space() {
    while (!eof()) {
      skip_spaces();
      skip_comment();
      if (!eof() && (peek() == '\n' || peek() == '\r')) {
        advance();
      } else {
        return;
      }
    }
  }

  void end_of_line() {
    skip_spaces();
    skip_comment();
    if (eof()) return;
    if (peek() == '\r') ++pos_;
    if (eof() || peek() != '\n') syntax_error(line_, "unexpected text after value");
    advance();
  }

  std::string parse_key() {
    const std::size_t start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' ||
                      peek() == '-')) {
      ++pos_;
    }
    if (pos_ == start) syntax_error(line_, "expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  Value parse_value() {
    if (eof()) syntax_error(line_, "missing value");
    const char c = peek();
    if (c == '"' || c == '\'') return parse_string();
    if (c == '[') return parse_array();
    return parse_scalar();
  }

  Value parse_string() {
    Value v;
    v.type = Value::Type::string;
    const char quote = peek();
    ++pos_;
    while (true) {
      if (eof() || peek() == '\n') syntax_error(line_, "unterminated string");
      const char c = peek();
      ++pos_;
      if (c == quote) break;
      if (c == '\\' && quote == '"') {
        if (eof()) syntax_error(line_, "unterminated string");
        const char e = peek();
        ++pos_;
        switch (e) {
          case '"': v.text += '"'; break;
          case '\\': v.text += '\\'; break;
          case 'n': v.text += '\n'; break;
          case 't': v.text += '\t'; break;
          default: syntax_error(line_, std::string("unknown escape \\") + e);
        }
      } else {
        v.text += c;
      }
    }
    return v;
  }

  Value parse_array() {
    Value v;
    v.type = Value::Type::array;
    ++pos_;
    skip_array_space();
    while (!eof() && peek() != ']') {
      Value item = parse_value();
      item.line = line_;
      v.items.push_back(std::move(item));
      skip_array_space();
      if (!eof() && peek() == ',') {
        ++pos_;
        skip_array_space();
      } else {
        break;
      }
    }
    skip_array_space();
    expect(']');
    return v;
  }

  Value parse_scalar() {
    const std::size_t start = pos_;
    while (!eof() && peek() != ',' && peek() != ']' && peek() != '#' && peek() != '\n' &&
           peek() != '\r' && peek() != ' ' && peek() != '\t') {
      ++pos_;
    }
    const std::string tok(s_.substr(start, pos_ - start));
    Value v;
    if (tok == "true" || tok == "false") {
      v.type = Value::Type::boolean;
      v.boolean = tok == "true";
      return v;
    }
    if (tok == "inf" || tok == "+inf") {
      v.type = Value::Type::real;
      v.number = std::numeric_limits<double>::infinity();
      return v;
    }
    std::string clean;
    for (char c : tok) {
      if (c != '_') clean += c;
    }
    const bool is_int = !clean.empty() &&
                        clean.find_first_of(".eE") == std::string::npos &&
                        std::all_of(clean.begin() + (clean[0] == '-' || clean[0] == '+'),
                                    clean.end(), [](char c) { return std::isdigit(
                                                                  static_cast<unsigned char>(c)); });
    std::istringstream is(clean);
    is.imbue(std::locale::classic());
    double d = 0.0;
    is >> d;
    if (clean.empty() || !is || !is.eof()) syntax_error(line_, "cannot parse value '" + tok + "'");
    v.type = is_int ? Value::Type::integer : Value::Type::real;
    v.number = d;
    return v;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

// ---------------------------------------------------------------------------

const char* type_name(KeyType t) {
  switch (t) {
    case KeyType::integer: return "integer";
    case KeyType::real: return "number";
    case KeyType::real_or_inf: return "number|inf";
    case KeyType::string: return "string";
    case KeyType::boolean: return "boolean";
    case KeyType::int_list: return "[integer]";
    case KeyType::real_list: return "[number]";
    case KeyType::real_or_inf_list: return "[number|inf]";
    case KeyType::string_list: return "[string]";
    case KeyType::matrix: return "[[number]]";
  }
  return "?";
}

KeySpec key(std::string name, KeyType t, bool required, std::string def, std::string help) {
  return KeySpec{std::move(name), t, required, std::move(def), std::move(help)};
}

std::vector<KeySpec> common_keys(const std::string& command) {
  return {key("command", KeyType::string, false, "\"" + command + "\"",
              "must match the subcommand when given"),
          key("seed", KeyType::integer, false, "0", "seed for randomized parts")};
}

std::vector<KeySpec> tolerance_keys() {
  return {key("tolerances.grad", KeyType::real, false, "1e-8", "relative gradient floor"),
          key("tolerances.indep", KeyType::real, false, "1e-8", "normal independence floor"),
          key("tolerances.curv", KeyType::real, false, "1e-8", "curvature eigenvalue floor")};
}

std::vector<KeySpec> quasimode_keys() {
  return {key("kind", KeyType::string, true, "",
              "plane_wave | cluster | knapp | tensor_joint | localized"),
          key("W", KeyType::real, false, "1", "cluster window width"),
          key("r", KeyType::integer, false, "1", "tensor rank (tensor_joint)"),
          key("inner", KeyType::string, false, "\"cluster\"",
              "inner family for tensor_joint / localized"),
          key("k", KeyType::int_list, false, "", "lattice frequency (plane_wave)"),
          key("x0", KeyType::real_list, false, "0", "phase center"),
          key("localize.x_width", KeyType::real, false, "", "spatial bump width"),
          key("localize.xi_center", KeyType::real_list, false, "0", "frequency cutoff center"),
          key("localize.xi_width", KeyType::real, false, "", "frequency cutoff width")};
}

std::vector<CommandSpec> build_specs() {
  std::vector<CommandSpec> out;
  auto add = [&](std::string name, std::string summary, std::vector<KeySpec> keys) {
    CommandSpec c{name, std::move(summary), common_keys(name)};
    for (auto& k : keys) c.keys.push_back(std::move(k));
    out.push_back(std::move(c));
  };

  add("delta", "Evaluate the growth exponent delta(n, p, r).",
      {key("n", KeyType::integer, true, "", "dimension"),
       key("p", KeyType::real_or_inf, true, "", "Lebesgue exponent, >= 2"),
       key("r", KeyType::integer, false, "1", "number of operators")});

  std::vector<KeySpec> adm{key("n", KeyType::integer, true, "", "dimension"),
                           key("symbols", KeyType::string_list, true, "", "p_1 .. p_r"),
                           key("x", KeyType::real_list, false, "0", "base point x"),
                           key("xi", KeyType::real_list, true, "", "base point xi")};
  for (auto& k : tolerance_keys()) adm.push_back(k);
  add("admissibility", "Check the three admissibility conditions at a phase-space point.", adm);

  std::vector<KeySpec> red = adm;
  red.push_back(key("coordinate_change", KeyType::matrix, false, "",
                    "explicit xi_old = Q xi_new instead of Householder normalization"));
  red.push_back(key("project_base", KeyType::boolean, false, "false",
                    "move the base point onto the characteristic set first"));
  red.push_back(key("box", KeyType::real, false, "0.1", "graph box half-width"));
  add("reduce", "Factor an admissible family into graphs and report each stage.", red);

  std::vector<KeySpec> def{key("n", KeyType::integer, true, "", "dimension"),
                           key("symbols", KeyType::string_list, true, "", "p_1 .. p_r"),
                           key("lambda", KeyType::real, true, "", "frequency, h = 1/lambda")};
  for (auto& k : quasimode_keys()) def.push_back(k);
  def.push_back(key("N", KeyType::integer, false, "8 lambda", "grid points per axis"));
  def.push_back(key("kmax", KeyType::integer, false, "3", "largest total power"));
  def.push_back(key("route", KeyType::string, false, "\"auto\"", "auto | operator | frequency"));
  def.push_back(key("check", KeyType::string, false, "\"none\"",
                    "none | strong (defect_k <= (2Wh + (Wh)^2)^|k|)"));
  add("defect", "Build a quasimode and report its defects.", def);

  add("compose-check", "Check exact composition and commutator scaling on wave packets.",
      {key("n", KeyType::integer, false, "2", "dimension"),
       key("symbols", KeyType::string_list, false, "", "pair p, q (else random pairs)"),
       key("random_pairs", KeyType::integer, false, "0", "number of random pairs"),
       key("degree", KeyType::integer, false, "2", "max x- and xi-degree of random pairs"),
       key("h", KeyType::real_list, true, "", "semiclassical parameters"),
       key("xi0", KeyType::real_list, false, "(0.25, 0, ...)", "packet frequency"),
       key("sigma", KeyType::real, false, "0.35", "packet width"),
       key("tolerances.composition", KeyType::real, false, "1e-8",
           "relative operator vs expansion error"),
       key("tolerances.slope", KeyType::real, false, "-0.9",
           "largest log-log commutator slope")});

  std::vector<KeySpec> sw{key("n", KeyType::integer, true, "", "dimension"),
                          key("lambdas", KeyType::real_list, true, "", ">= 4, increasing"),
                          key("p", KeyType::real_or_inf_list, false, "[\"inf\"]",
                              "exponents; entries may also be \"critical\""),
                          key("symbols", KeyType::string_list, false, "",
                              "symbols for first-order defects")};
  for (auto& k : quasimode_keys()) sw.push_back(k);
  sw.push_back(key("grid.factor", KeyType::real, false, "8", "N >= factor * lambda"));
  sw.push_back(key("grid.max_points", KeyType::integer, false, "4096", "largest N"));
  sw.push_back(key("tolerances.upper", KeyType::real, false, "0.15", "slope <= delta + upper"));
  sw.push_back(key("tolerances.saturation", KeyType::real, false, "0.1 knapp, else 0.15",
                   "two-sided tolerance at p = inf"));
  add("sweep", "Fit L^p growth exponents over a lambda sweep.", sw);
  return out;
}

// ---------------------------------------------------------------------------

class Reader {
 public:
  Reader(Document doc, const CommandSpec& spec) : doc_(std::move(doc)) {
    std::vector<std::string> unknown;
    for (const auto& [k, v] : doc_) {
      const bool known = std::any_of(spec.keys.begin(), spec.keys.end(),
                                     [&](const KeySpec& s) { return s.name == k; });
      if (!known) unknown.push_back(k);
    }
    if (!unknown.empty()) {
      std::string list;
      for (const auto& k : unknown) list += (list.empty() ? "" : ", ") + k;
      fail(ErrorKind::invalid_argument,
           "unknown key" + std::string(unknown.size() > 1 ? "s" : "") + " for '" + spec.name +
               "': " + list);
    }
    for (const auto& s : spec.keys) {
      if (s.required && !doc_.count(s.name)) {
        fail(ErrorKind::invalid_argument, "missing required key '" + s.name + "'");
      }
    }
  }

  bool has(const std::string& k) const { return doc_.count(k) > 0; }

  int integer(const std::string& k, int def) const {
    if (!has(k)) return def;
    const Value& v = get(k, Value::Type::integer);
    return static_cast<int>(v.number);
  }

  double real(const std::string& k, double def) const {
    if (!has(k)) return def;
    return number(k, doc_.at(k));
  }

  std::string string(const std::string& k, const std::string& def) const {
    if (!has(k)) return def;
    return get(k, Value::Type::string).text;
  }

  bool boolean(const std::string& k, bool def) const {
    if (!has(k)) return def;
    return get(k, Value::Type::boolean).boolean;
  }

  std::vector<double> reals(const std::string& k) const {
    std::vector<double> out;
    if (!has(k)) return out;
    for (const Value& v : get(k, Value::Type::array).items) out.push_back(number(k, v));
    return out;
  }

  std::vector<int> integers(const std::string& k) const {
    std::vector<int> out;
    if (!has(k)) return out;
    for (const Value& v : get(k, Value::Type::array).items) {
      if (v.type != Value::Type::integer) bad(k, v, "integer entries");
      out.push_back(static_cast<int>(v.number));
    }
    return out;
  }

  std::vector<std::string> strings(const std::string& k) const {
    std::vector<std::string> out;
    if (!has(k)) return out;
    for (const Value& v : get(k, Value::Type::array).items) {
      if (v.type != Value::Type::string) bad(k, v, "string entries");
      out.push_back(v.text);
    }
    return out;
  }

  const Value& raw(const std::string& k) const { return get(k, Value::Type::array); }

  [[noreturn]] static void bad(const std::string& k, const Value& v, const std::string& want) {
    fail(ErrorKind::invalid_argument,
         "key '" + k + "' (line " + std::to_string(v.line) + "): expected " + want);
  }

  static double number(const std::string& k, const Value& v) {
    if (v.type == Value::Type::integer || v.type == Value::Type::real) return v.number;
    if (v.type == Value::Type::string && v.text == "inf") {
      return std::numeric_limits<double>::infinity();
    }
    bad(k, v, "a number");
  }

 private:
  const Value& get(const std::string& k, Value::Type t) const {
    const Value& v = doc_.at(k);
    if (v.type != t) {
      static const char* names[] = {"a boolean", "an integer", "a number", "a string", "an array"};
      bad(k, v, names[static_cast<int>(t)]);
    }
    return v;
  }

  Document doc_;
};

std::vector<Symbol> parse_symbols(const std::vector<std::string>& text, int n) {
  std::vector<Symbol> out;
  for (std::size_t i = 0; i < text.size(); ++i) {
    try {
      out.push_back(parse_symbol(text[i], n));
    } catch (const Error& e) {
      fail(ErrorKind::invalid_argument,
           "symbols[" + std::to_string(i + 1) + "]: " + std::string(e.what()));
    }
  }
  return out;
}

std::vector<double> point(const Reader& rd, const std::string& k, int n) {
  std::vector<double> v = rd.reals(k);
  if (!rd.has(k)) v.assign(static_cast<std::size_t>(n), 0.0);
  require(static_cast<int>(v.size()) == n, ErrorKind::invalid_argument,
          "key '" + k + "' needs " + std::to_string(n) + " entries");
  return v;
}

void read_quasimode(const Reader& rd, RunConfig& c) {
  QuasimodeSpec& q = c.quasimode;
  q.n = c.n;
  q.kind = quasimode_kind_from_string(rd.string("kind", "cluster"));
  q.W = rd.real("W", 1.0);
  q.r = rd.integer("r", 1);
  q.inner = quasimode_kind_from_string(rd.string("inner", "cluster"));
  if (rd.has("x0")) q.x0 = point(rd, "x0", c.n);
  for (int v : rd.integers("k")) q.k.push_back(v);
  if (q.kind == QuasimodeKind::plane_wave) {
    require(static_cast<int>(q.k.size()) == c.n, ErrorKind::invalid_argument,
            "plane_wave needs key 'k' with " + std::to_string(c.n) + " entries");
  }
  if (rd.has("localize.x_width")) q.localize.x_width = rd.real("localize.x_width", 0.0);
  if (rd.has("localize.xi_width")) q.localize.xi_width = rd.real("localize.xi_width", 0.0);
  if (rd.has("localize.xi_center")) q.localize.xi_center = point(rd, "localize.xi_center", c.n);
}

}  // namespace

Document parse_document(std::string_view text) { return Parser(text).parse(); }

const std::vector<CommandSpec>& command_specs() {
  static const std::vector<CommandSpec> specs = build_specs();
  return specs;
}

const CommandSpec& command_spec(std::string_view name) {
  for (const auto& s : command_specs()) {
    if (s.name == name) return s;
  }
  fail(ErrorKind::invalid_argument, "unknown command '" + std::string(name) + "'");
}

std::string describe_keys(const CommandSpec& spec) {
  std::size_t w = 0;
  for (const auto& k : spec.keys) w = std::max(w, k.name.size());
  std::ostringstream os;
  os << "Config keys:\n";
  for (const auto& k : spec.keys) {
    std::string name = k.name;
    name.resize(w, ' ');
    std::string type = type_name(k.type);
    type.resize(14, ' ');
    os << "  " << name << "  " << type << "  "
       << (k.required             ? std::string("required")
           : k.default_text.empty() ? std::string("optional")
                                    : "default " + k.default_text)
       << "\n      "
       << k.help << "\n";
  }
  return os.str();
}

RunConfig parse_config(std::string_view text, const std::string& command) {
  const CommandSpec& spec = command_spec(command);
  const Reader rd(parse_document(text), spec);
  RunConfig c;
  c.command = rd.string("command", command);
  require(c.command == command, ErrorKind::invalid_argument,
          "config command '" + c.command + "' does not match '" + command + "'");
  const int seed = rd.integer("seed", 0);
  require(seed >= 0, ErrorKind::invalid_argument, "seed must be >= 0");
  c.seed = static_cast<std::uint64_t>(seed);
  c.n = rd.integer("n", 2);
  require(c.n >= 1 && c.n <= 8, ErrorKind::invalid_argument, "n must lie in 1..8");
  c.symbol_text = rd.strings("symbols");
  c.symbols = parse_symbols(c.symbol_text, c.n);

  c.tols.grad = rd.real("tolerances.grad", c.tols.grad);
  c.tols.indep = rd.real("tolerances.indep", c.tols.indep);
  c.tols.curv = rd.real("tolerances.curv", c.tols.curv);

  if (command == "delta") {
    c.p = rd.real("p", 2.0);
    c.r = rd.integer("r", 1);
  } else if (command == "admissibility" || command == "reduce") {
    c.x = point(rd, "x", c.n);
    c.xi = point(rd, "xi", c.n);
    if (rd.has("coordinate_change")) {
      const Value& m = rd.raw("coordinate_change");
      require(static_cast<int>(m.items.size()) == c.n, ErrorKind::invalid_argument,
              "key 'coordinate_change' needs " + std::to_string(c.n) + " rows");
      Eigen::MatrixXd Q(c.n, c.n);
      for (int i = 0; i < c.n; ++i) {
        const Value& row = m.items[static_cast<std::size_t>(i)];
        if (row.type != Value::Type::array || static_cast<int>(row.items.size()) != c.n) {
          Reader::bad("coordinate_change", row, std::to_string(c.n) + " numbers per row");
        }
        for (int j = 0; j < c.n; ++j) {
          Q(i, j) = Reader::number("coordinate_change", row.items[static_cast<std::size_t>(j)]);
        }
      }
      c.coordinate_change = Q;
    }
    c.project_base = rd.boolean("project_base", false);
    c.box = rd.real("box", 0.1);
  } else if (command == "defect") {
    read_quasimode(rd, c);
    c.quasimode.lambda = rd.real("lambda", 1.0);
    if (rd.has("N")) c.grid_points = rd.integer("N", 0);
    c.kmax = rd.integer("kmax", 3);
    c.route = rd.string("route", "auto");
    require(c.route == "auto" || c.route == "operator" || c.route == "frequency",
            ErrorKind::invalid_argument, "route must be auto, operator or frequency");
    c.check = rd.string("check", "none");
    require(c.check == "none" || c.check == "strong", ErrorKind::invalid_argument,
            "check must be none or strong");
  } else if (command == "compose-check") {
    c.random_pairs = rd.integer("random_pairs", 0);
    c.degree = rd.integer("degree", 2);
    c.h_list = rd.reals("h");
    c.xi0 = rd.reals("xi0");
    if (!rd.has("xi0")) {
      c.xi0.assign(static_cast<std::size_t>(c.n), 0.0);
      c.xi0[0] = 0.25;
    }
    require(static_cast<int>(c.xi0.size()) == c.n, ErrorKind::invalid_argument,
            "key 'xi0' needs " + std::to_string(c.n) + " entries");
    c.sigma = rd.real("sigma", 0.35);
    c.composition_tol = rd.real("tolerances.composition", 1e-8);
    c.max_slope = rd.real("tolerances.slope", -0.9);
    require(c.symbols.size() == 2 || (c.symbols.empty() && c.random_pairs > 0),
            ErrorKind::invalid_argument,
            "compose-check needs two symbols or random_pairs > 0");
    require(!c.h_list.empty(), ErrorKind::invalid_argument, "key 'h' is empty");
  } else if (command == "sweep") {
    read_quasimode(rd, c);
    c.lambdas = rd.reals("lambdas");
    const int r_eff = c.symbols.empty() ? c.quasimode.r : static_cast<int>(c.symbols.size());
    if (!rd.has("p")) {
      c.p_list = {kInfinity};
    } else {
      for (const Value& v : rd.raw("p").items) {
        if (v.type == Value::Type::string && v.text == "critical") {
          c.p_list.push_back(critical_p(c.n, r_eff));
        } else {
          c.p_list.push_back(Reader::number("p", v));
        }
      }
    }
    c.grid.factor = rd.real("grid.factor", 8.0);
    c.grid.max_points = rd.integer("grid.max_points", 4096);
    c.upper_tolerance = rd.real("tolerances.upper", 0.15);
    if (rd.has("tolerances.saturation")) {
      c.saturation_tolerance = rd.real("tolerances.saturation", 0.15);
    }
  }
  return c;
}

}  // namespace qmlab::cli

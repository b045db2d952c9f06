#include "qmlab/symbol_text.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

#include "qmlab/error.hpp"

namespace qmlab {

namespace {

class Parser {
 public:
  Parser(std::string_view text, int n) : text_(text), n_(n) {}

  Symbol parse() {
    Symbol out(n_);
    skip_ws();
    if (at_end()) error("empty symbol");
    bool first = true;
    while (true) {
      skip_ws();
      double sign = 1.0;
      if (peek() == '+' || peek() == '-') {
        sign = peek() == '-' ? -1.0 : 1.0;
        ++pos_;
      } else if (!first) {
        error("expected '+' or '-'");
      }
      out += sign * parse_term();
      first = false;
      skip_ws();
      if (at_end()) break;
    }
    return out;
  }

 private:
  Symbol parse_term() {
    Symbol term = parse_factor();
    while (true) {
      skip_ws();
      if (peek() != '*') break;
      ++pos_;
      term = term * parse_factor();
    }
    return term;
  }

  Symbol parse_factor() {
    skip_ws();
    const char c = peek();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '|') return parse_norm_sugar();
    if (c == 'x') return parse_variable();
    if (at_end()) error("unexpected end of input");
    error(std::string("unexpected character '") + c + "'");
  }

  Symbol parse_number() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc()) error("malformed number");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return Symbol::constant(n_, v);
  }

  Symbol parse_norm_sugar() {
    const std::size_t start = pos_;
    if (text_.substr(pos_, 4) != "|xi|") error("expected '|xi|^2'");
    pos_ += 4;
    skip_ws();
    if (peek() != '^') {
      pos_ = start;
      error("'|xi|' must be followed by '^2'");
    }
    ++pos_;
    skip_ws();
    const std::size_t epos = pos_;
    if (parse_int() != 2) {
      pos_ = epos;
      error("only '|xi|^2' is supported");
    }
    return Symbol::helmholtz(n_) + Symbol::constant(n_, 1.0);
  }

  Symbol parse_variable() {
    const std::size_t start = pos_;
    ++pos_;  // 'x'
    const bool is_xi = peek() == 'i';
    if (is_xi) ++pos_;
    if (!std::isdigit(static_cast<unsigned char>(peek()))) {
      pos_ = start;
      error("variable must be x<k> or xi<k>");
    }
    const int index = parse_int();
    if (index < 1 || index > n_) {
      pos_ = start;
      error("variable index " + std::to_string(index) + " outside 1.." + std::to_string(n_));
    }
    int power = 1;
    skip_ws();
    if (peek() == '^') {
      ++pos_;
      skip_ws();
      if (!std::isdigit(static_cast<unsigned char>(peek()))) error("expected integer exponent");
      power = parse_int();
    }
    const Symbol v = is_xi ? Symbol::xi(n_, index - 1) : Symbol::x(n_, index - 1);
    return v.pow(power);
  }

  int parse_int() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    int v = 0;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc()) error("malformed integer");
    pos_ += static_cast<std::size_t>(ptr - begin);
    return v;
  }

  void skip_ws() {
    while (!at_end() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return at_end() ? '\0' : text_[pos_]; }

  [[noreturn]] void error(const std::string& what) const {
    fail(ErrorKind::invalid_argument,
         "symbol parse error at position " + std::to_string(pos_) + ": " + what + " in \"" +
             std::string(text_) + "\"");
  }

  std::string_view text_;
  int n_;
  std::size_t pos_ = 0;
};

}  // namespace

Symbol parse_symbol(std::string_view text, int n) {
  require(n >= 1, ErrorKind::invalid_argument, "symbol dimension must be >= 1");
  return Parser(text, n).parse();
}

int max_variable_index(std::string_view text) {
  int best = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != 'x' || (i > 0 && text[i - 1] == '|')) continue;
    std::size_t j = i + 1;
    if (j < text.size() && text[j] == 'i') ++j;
    int v = 0;
    auto [ptr, ec] = std::from_chars(text.data() + j, text.data() + text.size(), v);
    if (ec == std::errc() && ptr != text.data() + j) best = std::max(best, v);
  }
  return best;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string format_symbol(const Symbol& sym) {
  if (sym.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  // Highest total degree first reads closest to hand-written symbols.
  for (auto it = sym.terms().rbegin(); it != sym.terms().rend(); ++it) {
    const auto& [m, c] = *it;
    double mag = c;
    if (first) {
      if (c < 0) {
        os << "-";
        mag = -c;
      }
    } else {
      os << (c < 0 ? " - " : " + ");
      mag = std::abs(c);
    }
    first = false;
    std::ostringstream factors;
    bool any = false;
    auto emit = [&](const char* name, const MultiIndex& e) {
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] == 0) continue;
        if (any) factors << " * ";
        factors << name << (i + 1);
        if (e[i] > 1) factors << "^" << e[i];
        any = true;
      }
    };
    emit("x", m.x);
    emit("xi", m.xi);
    if (!any) {
      os << format_number(mag);
    } else if (mag == 1.0) {
      os << factors.str();
    } else {
      os << format_number(mag) << " * " << factors.str();
    }
  }
  return os.str();
}

}  // namespace qmlab

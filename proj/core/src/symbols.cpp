#include "qmlab/symbols.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qmlab/error.hpp"

namespace qmlab {

namespace {

double int_pow(double base, int e) {
  double r = 1.0;
  for (int k = 0; k < e; ++k) r *= base;
  return r;
}

double monomial_value(const MultiIndex& exps, const Eigen::VectorXd& v) {
  double r = 1.0;
  for (std::size_t i = 0; i < exps.size(); ++i) {
    if (exps[i] != 0) r *= int_pow(v[static_cast<Eigen::Index>(i)], exps[i]);
  }
  return r;
}

// d/dv_i of v^exps, returned as (factor, lowered exponent).  factor == 0 when
// the variable is absent.
double lower(MultiIndex& exps, int i) {
  const int e = exps[static_cast<std::size_t>(i)];
  if (e == 0) return 0.0;
  exps[static_cast<std::size_t>(i)] = e - 1;
  return static_cast<double>(e);
}

}  // namespace

PhasePoint make_phase_point(std::vector<double> x, std::vector<double> xi) {
  require(x.size() == xi.size(), ErrorKind::invalid_argument,
          "phase point: x and xi have different lengths");
  PhasePoint pt;
  pt.x = Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
  pt.xi = Eigen::Map<const Eigen::VectorXd>(xi.data(), static_cast<Eigen::Index>(xi.size()));
  require(pt.x.allFinite() && pt.xi.allFinite(), ErrorKind::invalid_argument,
          "phase point: non-finite entry");
  return pt;
}

Symbol::Symbol(int dimension) : dimension_(dimension) {
  require(dimension >= 1, ErrorKind::invalid_argument,
          "symbol dimension must be >= 1");
}

Symbol Symbol::constant(int dimension, double c) {
  Symbol s(dimension);
  const MultiIndex zero(static_cast<std::size_t>(dimension), 0);
  s.add_term(c, zero, zero);
  return s;
}

Symbol Symbol::x(int dimension, int i) {
  Symbol s(dimension);
  require(i >= 0 && i < dimension, ErrorKind::invalid_argument, "x index out of range");
  MultiIndex e(static_cast<std::size_t>(dimension), 0);
  const MultiIndex zero = e;
  e[static_cast<std::size_t>(i)] = 1;
  s.add_term(1.0, e, zero);
  return s;
}

Symbol Symbol::xi(int dimension, int i) {
  Symbol s(dimension);
  require(i >= 0 && i < dimension, ErrorKind::invalid_argument, "xi index out of range");
  MultiIndex e(static_cast<std::size_t>(dimension), 0);
  const MultiIndex zero = e;
  e[static_cast<std::size_t>(i)] = 1;
  s.add_term(1.0, zero, e);
  return s;
}

Symbol Symbol::helmholtz(int dimension) {
  Symbol s = constant(dimension, -1.0);
  const MultiIndex zero(static_cast<std::size_t>(dimension), 0);
  for (int i = 0; i < dimension; ++i) {
    MultiIndex e = zero;
    e[static_cast<std::size_t>(i)] = 2;
    s.add_term(1.0, zero, e);
  }
  return s;
}

void Symbol::check_index(const MultiIndex& m) const {
  require(static_cast<int>(m.size()) == dimension_, ErrorKind::invalid_argument,
          "multi-index length " + std::to_string(m.size()) +
              " does not match symbol dimension " + std::to_string(dimension_));
  for (int e : m) {
    require(e >= 0, ErrorKind::invalid_argument, "negative exponent in multi-index");
  }
}

void Symbol::add_term(double c, const MultiIndex& x_exp, const MultiIndex& xi_exp) {
  check_index(x_exp);
  check_index(xi_exp);
  require(std::isfinite(c), ErrorKind::invalid_argument, "non-finite coefficient");
  auto [it, inserted] = terms_.try_emplace(Monomial{x_exp, xi_exp}, c);
  if (!inserted) it->second += c;
  if (std::abs(it->second) < kCoefficientFloor) terms_.erase(it);
}

double Symbol::coefficient(const MultiIndex& x_exp, const MultiIndex& xi_exp) const {
  auto it = terms_.find(Monomial{x_exp, xi_exp});
  return it == terms_.end() ? 0.0 : it->second;
}

void Symbol::prune() {
  std::erase_if(terms_, [](const auto& t) { return std::abs(t.second) < kCoefficientFloor; });
}

void check_dimension(const Symbol& sym, const PhasePoint& pt) {
  require(pt.x.size() == sym.dimension() && pt.xi.size() == sym.dimension(),
          ErrorKind::invalid_argument,
          "dimension mismatch: symbol has n=" + std::to_string(sym.dimension()) +
              ", point has n=" + std::to_string(pt.xi.size()));
}

double Symbol::eval(const PhasePoint& pt) const {
  check_dimension(*this, pt);
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    sum += c * monomial_value(m.x, pt.x) * monomial_value(m.xi, pt.xi);
  }
  return sum;
}

double Symbol::eval(std::span<const double> x, std::span<const double> xi) const {
  double sum = 0.0;
  for (const auto& [m, c] : terms_) {
    double t = c;
    for (int i = 0; i < dimension_; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      t *= int_pow(x[ui], m.x[ui]) * int_pow(xi[ui], m.xi[ui]);
    }
    sum += t;
  }
  return sum;
}

Eigen::VectorXd Symbol::grad_xi(const PhasePoint& pt) const {
  check_dimension(*this, pt);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(dimension_);
  for (const auto& [m, c] : terms_) {
    const double xpart = c * monomial_value(m.x, pt.x);
    for (int i = 0; i < dimension_; ++i) {
      MultiIndex e = m.xi;
      const double f = lower(e, i);
      if (f != 0.0) g[i] += xpart * f * monomial_value(e, pt.xi);
    }
  }
  return g;
}

Eigen::MatrixXd Symbol::hess_xi(const PhasePoint& pt) const {
  check_dimension(*this, pt);
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dimension_, dimension_);
  for (const auto& [m, c] : terms_) {
    const double xpart = c * monomial_value(m.x, pt.x);
    for (int i = 0; i < dimension_; ++i) {
      MultiIndex ei = m.xi;
      const double fi = lower(ei, i);
      if (fi == 0.0) continue;
      for (int j = i; j < dimension_; ++j) {
        MultiIndex eij = ei;
        const double fj = lower(eij, j);
        if (fj == 0.0) continue;
        const double v = xpart * fi * fj * monomial_value(eij, pt.xi);
        H(i, j) += v;
        if (j != i) H(j, i) += v;
      }
    }
  }
  return H;
}

Symbol Symbol::d_xi(int i) const {
  require(i >= 0 && i < dimension_, ErrorKind::invalid_argument, "xi index out of range");
  Symbol out(dimension_);
  for (const auto& [m, c] : terms_) {
    MultiIndex e = m.xi;
    const double f = lower(e, i);
    if (f != 0.0) out.add_term(c * f, m.x, e);
  }
  return out;
}

Symbol Symbol::d_x(int i) const {
  require(i >= 0 && i < dimension_, ErrorKind::invalid_argument, "x index out of range");
  Symbol out(dimension_);
  for (const auto& [m, c] : terms_) {
    MultiIndex e = m.x;
    const double f = lower(e, i);
    if (f != 0.0) out.add_term(c * f, e, m.xi);
  }
  return out;
}

int Symbol::degree_xi() const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    int s = 0;
    for (int e : m.xi) s += e;
    d = std::max(d, s);
  }
  return d;
}

int Symbol::degree_x() const {
  int d = 0;
  for (const auto& [m, c] : terms_) {
    int s = 0;
    for (int e : m.x) s += e;
    d = std::max(d, s);
  }
  return d;
}

int Symbol::degree_xi(int i) const {
  int d = 0;
  for (const auto& [m, c] : terms_) d = std::max(d, m.xi[static_cast<std::size_t>(i)]);
  return d;
}

double Symbol::coefficient_scale() const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) s = std::max(s, std::abs(c));
  return s;
}

Symbol Symbol::x_coefficient_of(const MultiIndex& alpha) const {
  Symbol out(dimension_);
  const MultiIndex zero(static_cast<std::size_t>(dimension_), 0);
  for (const auto& [m, c] : terms_) {
    if (m.xi == alpha) out.add_term(c, m.x, zero);
  }
  return out;
}

std::vector<MultiIndex> Symbol::xi_exponents() const {
  std::vector<MultiIndex> out;
  for (const auto& [m, c] : terms_) out.push_back(m.xi);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Symbol& Symbol::operator+=(const Symbol& other) {
  require(other.dimension_ == dimension_, ErrorKind::invalid_argument,
          "symbol dimension mismatch in addition");
  for (const auto& [m, c] : other.terms_) terms_[m] += c;
  prune();
  return *this;
}

Symbol& Symbol::operator-=(const Symbol& other) {
  require(other.dimension_ == dimension_, ErrorKind::invalid_argument,
          "symbol dimension mismatch in subtraction");
  for (const auto& [m, c] : other.terms_) terms_[m] -= c;
  prune();
  return *this;
}

Symbol& Symbol::operator*=(double c) {
  for (auto& [m, v] : terms_) v *= c;
  prune();
  return *this;
}

Symbol operator*(const Symbol& a, const Symbol& b) {
  require(a.dimension_ == b.dimension_, ErrorKind::invalid_argument,
          "symbol dimension mismatch in product");
  Symbol out(a.dimension_);
  const std::size_t n = static_cast<std::size_t>(a.dimension_);
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m{MultiIndex(n), MultiIndex(n)};
      for (std::size_t i = 0; i < n; ++i) {
        m.x[i] = ma.x[i] + mb.x[i];
        m.xi[i] = ma.xi[i] + mb.xi[i];
      }
      out.terms_[m] += ca * cb;
    }
  }
  out.prune();
  return out;
}

Symbol Symbol::pow(int k) const {
  require(k >= 0, ErrorKind::invalid_argument, "negative symbol power");
  Symbol out = constant(dimension_, 1.0);
  for (int i = 0; i < k; ++i) out = out * *this;
  return out;
}

Symbol linear_change_xi(const Symbol& sym, const Eigen::MatrixXd& Q) {
  const int n = sym.dimension();
  require(Q.rows() == n && Q.cols() == n, ErrorKind::invalid_argument,
          "coordinate change must be n x n");
  require(std::abs(Q.determinant()) >= 1e-12, ErrorKind::invalid_argument,
          "coordinate change is singular (|det| < 1e-12)");

  // Old xi_i expressed in the new variables: sum_j Q(i,j) xi_j.
  std::vector<Symbol> image;
  image.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Symbol row(n);
    for (int j = 0; j < n; ++j) {
      if (Q(i, j) != 0.0) row += Q(i, j) * Symbol::xi(n, j);
    }
    image.push_back(std::move(row));
  }

  const MultiIndex zero(static_cast<std::size_t>(n), 0);
  Symbol out(n);
  for (const auto& [m, c] : sym.terms()) {
    Symbol term(n);
    term.add_term(c, m.x, zero);
    for (int i = 0; i < n; ++i) {
      const int e = m.xi[static_cast<std::size_t>(i)];
      if (e > 0) term = term * image[static_cast<std::size_t>(i)].pow(e);
    }
    out += term;
  }
  return out;
}

Symbol substitute_xi(const Symbol& sym, int i, const Symbol& replacement) {
  const int n = sym.dimension();
  require(replacement.dimension() == n, ErrorKind::invalid_argument,
          "substitution dimension mismatch");
  require(i >= 0 && i < n, ErrorKind::invalid_argument, "xi index out of range");
  require(replacement.degree_xi(i) == 0, ErrorKind::invalid_argument,
          "replacement for xi_" + std::to_string(i + 1) + " depends on xi_" +
              std::to_string(i + 1));
  Symbol out(n);
  for (const auto& [m, c] : sym.terms()) {
    MultiIndex xi_rest = m.xi;
    const int e = xi_rest[static_cast<std::size_t>(i)];
    xi_rest[static_cast<std::size_t>(i)] = 0;
    Symbol term(n);
    term.add_term(c, m.x, xi_rest);
    if (e > 0) term = term * replacement.pow(e);
    out += term;
  }
  return out;
}

}  // namespace qmlab

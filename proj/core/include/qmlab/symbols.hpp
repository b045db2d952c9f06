#pragma once

// Phase-space symbols p(x, xi) as exact sparse real polynomials.
//
// A Symbol in dimension n is a finite sum of monomials c * x^beta * xi^alpha
// with beta, alpha in N^n.  Terms are kept canonical: no duplicate
// (beta, alpha) pairs and no coefficient with magnitude below
// kCoefficientFloor.  Indices in the C++ API are 0-based; the text format
// (symbol_text.hpp) uses 1-based variable names x1..xn, xi1..xin.

#include <compare>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qmlab {

using MultiIndex = std::vector<int>;

/// Coefficients smaller than this after arithmetic are dropped.
inline constexpr double kCoefficientFloor = 1e-14;

struct Monomial {
  MultiIndex x;   // powers of x_1..x_n
  MultiIndex xi;  // powers of xi_1..xi_n

  friend auto operator<=>(const Monomial&, const Monomial&) = default;
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

struct PhasePoint {
  Eigen::VectorXd x;
  Eigen::VectorXd xi;

  int dimension() const { return static_cast<int>(xi.size()); }
};

PhasePoint make_phase_point(std::vector<double> x, std::vector<double> xi);

class Symbol {
 public:
  using TermMap = std::map<Monomial, double>;

  explicit Symbol(int dimension);

  static Symbol constant(int dimension, double c);
  static Symbol x(int dimension, int i);
  static Symbol xi(int dimension, int i);
  /// |xi|^2 - 1, the flat Helmholtz symbol.
  static Symbol helmholtz(int dimension);

  int dimension() const { return dimension_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }

  /// Adds c * x^beta * xi^alpha, merging with an existing term.
  void add_term(double c, const MultiIndex& x_exp, const MultiIndex& xi_exp);
  double coefficient(const MultiIndex& x_exp, const MultiIndex& xi_exp) const;

  double eval(const PhasePoint& pt) const;
  /// Allocation-free evaluation for inner loops; spans must have length n.
  double eval(std::span<const double> x, std::span<const double> xi) const;
  Eigen::VectorXd grad_xi(const PhasePoint& pt) const;
  Eigen::MatrixXd hess_xi(const PhasePoint& pt) const;

  Symbol d_xi(int i) const;
  Symbol d_x(int i) const;

  int degree_xi() const;
  int degree_x() const;
  int degree_xi(int i) const;
  bool depends_on_x() const { return degree_x() > 0; }
  /// Largest |coefficient|; used as the scale for relative tolerances.
  double coefficient_scale() const;

  /// Part of the symbol whose xi-exponent equals `alpha`, as a function of x
  /// only (xi exponents zeroed).
  Symbol x_coefficient_of(const MultiIndex& alpha) const;
  /// Distinct xi-exponents that occur, in canonical order.
  std::vector<MultiIndex> xi_exponents() const;

  Symbol& operator+=(const Symbol& other);
  Symbol& operator-=(const Symbol& other);
  Symbol& operator*=(double c);

  friend Symbol operator+(Symbol a, const Symbol& b) { return a += b; }
  friend Symbol operator-(Symbol a, const Symbol& b) { return a -= b; }
  friend Symbol operator*(Symbol a, double c) { return a *= c; }
  friend Symbol operator*(double c, Symbol a) { return a *= c; }
  friend Symbol operator*(const Symbol& a, const Symbol& b);
  friend bool operator==(const Symbol&, const Symbol&) = default;

  Symbol pow(int k) const;

 private:
  void check_index(const MultiIndex& m) const;
  void prune();

  int dimension_;
  TermMap terms_;
};

/// Pullback xi -> Q xi: the returned q satisfies q(x, xi) = sym(x, Q xi).
/// Throws invalid_argument when |det Q| < 1e-12.
Symbol linear_change_xi(const Symbol& sym, const Eigen::MatrixXd& Q);

/// Replaces xi_i by the polynomial `replacement` (which must not depend on
/// xi_i).  Exact polynomial composition.
Symbol substitute_xi(const Symbol& sym, int i, const Symbol& replacement);

void check_dimension(const Symbol& sym, const PhasePoint& pt);

// ---------------------------------------------------------------------------
// Admissibility of a family p_1..p_r at a phase-space point.

enum class Verdict { pass, fail, not_evaluated };

const char* to_string(Verdict v);

struct AdmissibilityTolerances {
  double grad = 1e-8;
  double indep = 1e-8;
  double curv = 1e-8;
};

struct AdmissibilityReport {
  std::vector<double> gradient_norms;
  double normal_min_singular_value = 0.0;
  /// Second fundamental form of {p_1 = 0} after sign normalization, ascending.
  std::vector<double> second_fundamental_form;
  int sign_convention = 1;
  /// Conditions 1 (smooth level sets), 2 (independent normals),
  /// 3 (definite second fundamental form of p_1).
  Verdict passes[3] = {Verdict::not_evaluated, Verdict::not_evaluated,
                       Verdict::not_evaluated};
  AdmissibilityTolerances tolerances;

  bool all_pass() const;
};

/// Gradient test is relative to each symbol's coefficient scale and the
/// independence test uses unit normals, so rescaling any p_j by a nonzero
/// constant leaves every verdict unchanged.
AdmissibilityReport check_admissibility(const std::vector<Symbol>& syms,
                                        const PhasePoint& pt,
                                        const AdmissibilityTolerances& tols = {});

/// Orthonormal basis (columns) of the complement of `normal`.
Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& normal);

}  // namespace qmlab

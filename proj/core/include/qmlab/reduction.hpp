#pragma once

// Inductive factorization of an admissible symbol family.
//
// After a linear change of xi-coordinates the gradients at the base point
// become lower-trapezoidal (row i = grad p_i has no components beyond i).
// The implicit function theorem then writes {p_i = 0} as a graph
// xi_i = a_i(x, xi~) for i = r, r-1, ..., 2; each graph is substituted into
// the remaining symbols, and finally {p~_1 = 0} is written as
// xi_1 = b(x, xi~).  Curvature certificates are Hessian eigenvalues on the
// untouched coordinates r+1..n.
//
// Reduced symbols are evaluators (value, xi-gradient, xi-Hessian) in the full
// n-dimensional coordinate vector; components along removed coordinates are
// ignored on input and zero in derivatives.

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qmlab/symbols.hpp"

namespace qmlab {

class PhaseFunction {
 public:
  virtual ~PhaseFunction() = default;

  virtual int dimension() const = 0;
  virtual double value(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const = 0;
  virtual Eigen::VectorXd grad_xi(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const = 0;
  virtual Eigen::MatrixXd hess_xi(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const = 0;
  /// Polynomial form, when the function is still a polynomial.
  virtual const Symbol* polynomial() const { return nullptr; }
};

using PhaseFunctionPtr = std::shared_ptr<const PhaseFunction>;

PhaseFunctionPtr make_polynomial_function(Symbol sym);

// ---------------------------------------------------------------------------

struct RotationPlan {
  /// Coordinate change xi_old = Q xi_new.
  Eigen::MatrixXd Q;
  /// Base point in the new coordinates (xi' = Q^{-1} xi_0).
  PhasePoint base;
  /// Row i = grad_xi p_i at the base, new coordinates.
  Eigen::MatrixXd L;
  bool orthogonal = true;
};

struct NormalizedSystem {
  RotationPlan plan;
  std::vector<Symbol> symbols;
};

/// Householder normalization: Q is a product of reflections with the first r
/// columns sign-fixed so that diag(L) > 0.  Fails (check_failed) naming the
/// offending symbol when |L_ii| < indep_tol * |row i|.
NormalizedSystem normalize_coordinates(const std::vector<Symbol>& syms, const PhasePoint& pt,
                                       const AdmissibilityTolerances& tols = {});

/// Same contract with a caller-supplied invertible change of coordinates;
/// the triangular pattern is verified, not constructed.
NormalizedSystem apply_coordinate_change(const std::vector<Symbol>& syms, const PhasePoint& pt,
                                         const Eigen::MatrixXd& Q,
                                         const AdmissibilityTolerances& tols = {});

// ---------------------------------------------------------------------------

struct NewtonSettings {
  int max_iterations = 50;
  double step_tol = 1e-12;
  double residual_tol = 1e-10;
};

/// xi_i = a(x, xi~) solving defining(x, xi) = 0 near a base point, valid on a
/// box of half-width `half_width` in x and in the free xi-coordinates.
class GraphFunction {
 public:
  GraphFunction(PhaseFunctionPtr defining, int index, PhasePoint base, double half_width,
                std::vector<bool> removed, NewtonSettings newton);

  int index() const { return index_; }
  const PhasePoint& base() const { return base_; }
  double half_width() const { return half_width_; }
  const std::vector<bool>& removed() const { return removed_; }
  const PhaseFunction& defining() const { return *defining_; }
  /// Exact polynomial graph when the defining symbol is c*xi_i + (terms free
  /// of xi_i) with constant c.
  const std::optional<Symbol>& closed_form() const { return closed_form_; }

  bool in_box(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const;

  double operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const;
  /// d a / d xi_j; zero at the solved and removed coordinates.
  Eigen::VectorXd gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const;
  Eigen::MatrixXd hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const;
  /// |defining(x, xi with xi_i = a)|.
  double residual(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const;

  /// xi with coordinate `index` replaced by the graph value.
  Eigen::VectorXd lift(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const;

 private:
  double solve(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const;

  PhaseFunctionPtr defining_;
  int index_;
  PhasePoint base_;
  double half_width_;
  std::vector<bool> removed_;
  NewtonSettings newton_;
  std::optional<Symbol> closed_form_;
};

using GraphPtr = std::shared_ptr<const GraphFunction>;

struct GraphOptions {
  double half_width = 0.1;
  int max_shrinks = 5;
  int validation_samples = 100;
  double grad_tol = 1e-8;
  NewtonSettings newton;
  /// Coordinates already eliminated (ignored by the defining function).
  std::vector<bool> removed;
};

/// Builds and validates the graph of {sym = 0} over xi_i.  The box halves on
/// Newton failure at a validation sample, at most `max_shrinks` times.
GraphPtr solve_graph(PhaseFunctionPtr sym, int index, const PhasePoint& pt,
                     const GraphOptions& opts = {});

/// p~(x, xi~) = p(x, ..., a(x, xi~), ...).  Closed-form polynomial when both
/// p and the graph are polynomial.
PhaseFunctionPtr substitute_graph(PhaseFunctionPtr sym, GraphPtr graph);

struct CurvatureCertificate {
  std::vector<int> indices;
  std::vector<double> eigenvalues;  // ascending
  bool passes = true;
};

/// Eigenvalues of the xi-Hessian block on `indices` at pt; passes iff every
/// eigenvalue exceeds curv_tol (an empty block passes).
CurvatureCertificate curvature_certificate(const PhaseFunction& f, const PhasePoint& pt,
                                           const std::vector<int>& indices,
                                           double curv_tol = 1e-8);
CurvatureCertificate curvature_certificate_of_matrix(const Eigen::MatrixXd& H,
                                                     const std::vector<int>& indices,
                                                     double curv_tol = 1e-8);

// ---------------------------------------------------------------------------

struct ReductionStage {
  /// 0-based coordinate solved for at this stage.
  int removed_index = 0;
  GraphPtr graph;
  /// Reduced symbols p~_j, j < removed_index (empty for the final stage).
  std::vector<PhaseFunctionPtr> reduced;
  /// Hessian certificate on coordinates r..n-1: of p~_1 after a removal stage,
  /// of -sign(d p~_1/d xi_1) * Hess b for the final stage.
  CurvatureCertificate certificate;
};

struct ReductionTrace {
  int n = 0;
  int r = 0;
  NormalizedSystem system;
  /// Certificate of p_1 itself before any removal.
  CurvatureCertificate initial_certificate;
  /// r-1 removal stages (xi_r .. xi_2) followed by the final xi_1 = b stage.
  std::vector<ReductionStage> stages;
  /// Values p_j at the base point (new coordinates).
  std::vector<double> base_residuals;
  std::vector<std::string> warnings;
  bool success = false;

  const GraphFunction& final_graph() const { return *stages.back().graph; }
};

struct ReduceOptions {
  /// Caller-chosen coordinate change instead of the Householder normalization.
  std::optional<Eigen::MatrixXd> coordinate_change;
  /// Move the base point onto the joint characteristic set first
  /// (minimal-norm Gauss-Newton in xi at fixed x).
  bool project_base = false;
  AdmissibilityTolerances tols;
  GraphOptions graph;
};

/// Minimal-norm Gauss-Newton projection of pt.xi onto {p_1 = ... = p_r = 0}.
PhasePoint project_to_characteristic_set(const std::vector<Symbol>& syms, const PhasePoint& pt);

ReductionTrace reduce_all(const std::vector<Symbol>& syms, const PhasePoint& pt,
                          const ReduceOptions& opts = {});

/// Structured text report, one block per stage.
void write_trace_report(std::ostream& os, const ReductionTrace& trace);

}  // namespace qmlab

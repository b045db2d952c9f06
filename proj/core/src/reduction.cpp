#include "qmlab/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <utility>

#include "qmlab/error.hpp"
#include "qmlab/symbol_text.hpp"

namespace qmlab {
namespace {

class PolynomialFunction final : public PhaseFunction {
 public:
  explicit PolynomialFunction(Symbol sym) : sym_(std::move(sym)) {}

  int dimension() const override { return sym_.dimension(); }

  double value(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const override {
    return sym_.eval(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                     std::span<const double>(xi.data(), static_cast<std::size_t>(xi.size())));
  }
  Eigen::VectorXd grad_xi(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const override {
    return sym_.grad_xi(PhasePoint{x, xi});
  }
  Eigen::MatrixXd hess_xi(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const override {
    return sym_.hess_xi(PhasePoint{x, xi});
  }
  const Symbol* polynomial() const override { return &sym_; }

 private:
  Symbol sym_;
};

// p(x, ..., a(x, xi~), ...) by the chain rule.
class SubstitutedFunction final : public PhaseFunction {
 public:
  SubstitutedFunction(PhaseFunctionPtr outer, GraphPtr graph)
      : outer_(std::move(outer)), graph_(std::move(graph)) {}

  int dimension() const override { return outer_->dimension(); }

  double value(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const override {
    return outer_->value(x, graph_->lift(x, xi));
  }

  Eigen::VectorXd grad_xi(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const override {
    const int i = graph_->index();
    const Eigen::VectorXd z = graph_->lift(x, xi);
    const Eigen::VectorXd g = outer_->grad_xi(x, z);
    const Eigen::VectorXd ga = graph_->gradient(x, xi);
    Eigen::VectorXd out = g + g(i) * ga;
    out(i) = 0.0;
    return out;
  }

  Eigen::MatrixXd hess_xi(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const override {
    const int i = graph_->index();
    const Eigen::VectorXd z = graph_->lift(x, xi);
    const Eigen::VectorXd g = outer_->grad_xi(x, z);
    const Eigen::MatrixXd H = outer_->hess_xi(x, z);
    const Eigen::VectorXd ga = graph_->gradient(x, xi);
    const Eigen::MatrixXd Ha = graph_->hessian(x, xi);
    Eigen::MatrixXd out = H + H.col(i) * ga.transpose() + ga * H.row(i) +
                          H(i, i) * ga * ga.transpose() + g(i) * Ha;
    out.row(i).setZero();
    out.col(i).setZero();
    return out;
  }

 private:
  PhaseFunctionPtr outer_;
  GraphPtr graph_;
};

std::string vec_text(const Eigen::VectorXd& v) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_number(v(i));
  }
  return s + ")";
}

std::string index_set_text(const std::vector<int>& idx) {
  std::string s = "{";
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(idx[i] + 1);
  }
  return s + "}";
}

void check_family(const std::vector<Symbol>& syms, const PhasePoint& pt, const char* who) {
  require(!syms.empty(), ErrorKind::invalid_argument, std::string(who) + ": no symbols");
  const int n = syms.front().dimension();
  require(static_cast<int>(syms.size()) <= n, ErrorKind::invalid_argument,
          std::string(who) + ": r exceeds n");
  for (const auto& s : syms) {
    require(s.dimension() == n, ErrorKind::invalid_argument,
            std::string(who) + ": symbols have different dimensions");
    check_dimension(s, pt);
  }
}

Eigen::MatrixXd gradient_matrix(const std::vector<Symbol>& syms, const PhasePoint& pt) {
  const int n = pt.dimension();
  Eigen::MatrixXd G(static_cast<Eigen::Index>(syms.size()), n);
  for (std::size_t j = 0; j < syms.size(); ++j) {
    G.row(static_cast<Eigen::Index>(j)) = syms[j].grad_xi(pt).transpose();
  }
  return G;
}

void check_trapezoidal(const Eigen::MatrixXd& L, double indep_tol) {
  const Eigen::Index r = L.rows();
  for (Eigen::Index i = 0; i < r; ++i) {
    const double row = L.row(i).norm();
    const double tail = L.row(i).tail(L.cols() - i - 1).norm();
    require(tail <= 1e-10 * std::max(1.0, row), ErrorKind::check_failed,
            "normalize: gradient of p_" + std::to_string(i + 1) +
                " has components beyond coordinate " + std::to_string(i + 1));
    require(std::abs(L(i, i)) >= indep_tol * row && row > 0.0, ErrorKind::check_failed,
            "normalize: p_" + std::to_string(i + 1) +
                " has a gradient dependent on the earlier ones");
  }
}

NormalizedSystem finish_system(const std::vector<Symbol>& syms, const PhasePoint& pt,
                               const Eigen::MatrixXd& Q, bool orthogonal) {
  NormalizedSystem sys;
  sys.plan.Q = Q;
  sys.plan.orthogonal = orthogonal;
  sys.plan.base.x = pt.x;
  sys.plan.base.xi = orthogonal ? Eigen::VectorXd(Q.transpose() * pt.xi)
                                : Eigen::VectorXd(Q.partialPivLu().solve(pt.xi));
  for (const auto& s : syms) sys.symbols.push_back(linear_change_xi(s, Q));
  sys.plan.L = gradient_matrix(sys.symbols, sys.plan.base);
  return sys;
}

}  // namespace

PhaseFunctionPtr make_polynomial_function(Symbol sym) {
  return std::make_shared<PolynomialFunction>(std::move(sym));
}

// ---------------------------------------------------------------------------

NormalizedSystem normalize_coordinates(const std::vector<Symbol>& syms, const PhasePoint& pt,
                                       const AdmissibilityTolerances& tols) {
  check_family(syms, pt, "normalize");
  const int n = pt.dimension();
  const int r = static_cast<int>(syms.size());

  // Householder QR of G^T = V R, so G V = R^T is lower-trapezoidal.
  Eigen::MatrixXd A = gradient_matrix(syms, pt).transpose();
  Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
  for (int c = 0; c < r; ++c) {
    const Eigen::Index m = n - c;
    Eigen::VectorXd v = A.col(c).tail(m);
    const double norm = v.norm();
    require(norm > tols.indep * std::max(1.0, A.col(c).norm()), ErrorKind::check_failed,
            "normalize: gradient of p_" + std::to_string(c + 1) +
                " is dependent on the earlier ones");
    v(0) += (v(0) >= 0.0 ? norm : -norm);
    const double vv = v.squaredNorm();
    // A <- H A and V <- V H on the trailing block.
    A.bottomRightCorner(m, r - c) -= (2.0 / vv) * v * (v.transpose() * A.bottomRightCorner(m, r - c));
    V.rightCols(m) -= (2.0 / vv) * (V.rightCols(m) * v) * v.transpose();
  }
  for (int c = 0; c < r; ++c) {
    if (A(c, c) < 0.0) V.col(c) *= -1.0;
  }

  NormalizedSystem sys = finish_system(syms, pt, V, true);
  check_trapezoidal(sys.plan.L, tols.indep);
  return sys;
}

NormalizedSystem apply_coordinate_change(const std::vector<Symbol>& syms, const PhasePoint& pt,
                                         const Eigen::MatrixXd& Q,
                                         const AdmissibilityTolerances& tols) {
  check_family(syms, pt, "coordinate change");
  const int n = pt.dimension();
  require(Q.rows() == n && Q.cols() == n, ErrorKind::invalid_argument,
          "coordinate change must be " + std::to_string(n) + " x " + std::to_string(n));
  const bool orthogonal =
      (Q.transpose() * Q - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-12;
  NormalizedSystem sys = finish_system(syms, pt, Q, orthogonal);
  check_trapezoidal(sys.plan.L, tols.indep);
  return sys;
}

// ---------------------------------------------------------------------------

GraphFunction::GraphFunction(PhaseFunctionPtr defining, int index, PhasePoint base,
                             double half_width, std::vector<bool> removed, NewtonSettings newton)
    : defining_(std::move(defining)),
      index_(index),
      base_(std::move(base)),
      half_width_(half_width),
      removed_(std::move(removed)),
      newton_(newton) {
  const int n = defining_->dimension();
  if (removed_.empty()) removed_.assign(static_cast<std::size_t>(n), false);
  removed_[static_cast<std::size_t>(index_)] = true;

  if (const Symbol* p = defining_->polynomial()) {
    double c = 0.0;
    bool affine = p->degree_xi(index_) == 1;
    for (const auto& [m, coef] : p->terms()) {
      if (m.xi[static_cast<std::size_t>(index_)] == 0) continue;
      const bool pure = std::all_of(m.x.begin(), m.x.end(), [](int e) { return e == 0; }) &&
                        std::accumulate(m.xi.begin(), m.xi.end(), 0) == 1;
      if (!pure) affine = false;
      c = coef;
    }
    if (affine && c != 0.0) {
      Symbol rest = *p - c * Symbol::xi(n, index_);
      closed_form_ = rest * (-1.0 / c);
    }
  }
}

bool GraphFunction::in_box(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const {
  const double w = half_width_ * (1.0 + 1e-12);
  if ((x - base_.x).cwiseAbs().maxCoeff() > w) return false;
  for (Eigen::Index j = 0; j < xi.size(); ++j) {
    if (removed_[static_cast<std::size_t>(j)]) continue;
    if (std::abs(xi(j) - base_.xi(j)) > w) return false;
  }
  return true;
}

double GraphFunction::solve(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const {
  if (closed_form_) {
    return closed_form_->eval(
        std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
        std::span<const double>(xi.data(), static_cast<std::size_t>(xi.size())));
  }
  require(in_box(x, xi), ErrorKind::precondition,
          "graph xi" + std::to_string(index_ + 1) + ": point outside the validity box (half-width " +
              format_number(half_width_) + ")");
  Eigen::VectorXd z = xi;
  double t = base_.xi(index_);
  for (int it = 0; it < newton_.max_iterations; ++it) {
    z(index_) = t;
    const double f = defining_->value(x, z);
    const double df = defining_->grad_xi(x, z)(index_);
    if (!std::isfinite(f) || !std::isfinite(df) || df == 0.0) break;
    const double step = f / df;
    t -= step;
    if (std::abs(step) <= newton_.step_tol * std::max(1.0, std::abs(t))) {
      z(index_) = t;
      if (std::abs(defining_->value(x, z)) <= newton_.residual_tol) return t;
      break;
    }
  }
  fail(ErrorKind::check_failed, "graph xi" + std::to_string(index_ + 1) +
                                    ": Newton did not converge at x = " + vec_text(x) +
                                    ", xi = " + vec_text(xi));
}

double GraphFunction::operator()(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const {
  return solve(x, xi);
}

Eigen::VectorXd GraphFunction::lift(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const {
  Eigen::VectorXd z = xi;
  z(index_) = solve(x, xi);
  return z;
}

Eigen::VectorXd GraphFunction::gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const {
  const Eigen::VectorXd z = lift(x, xi);
  const Eigen::VectorXd g = defining_->grad_xi(x, z);
  Eigen::VectorXd a = -g / g(index_);
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (removed_[static_cast<std::size_t>(j)]) a(j) = 0.0;
  }
  return a;
}

Eigen::MatrixXd GraphFunction::hessian(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const {
  const Eigen::VectorXd z = lift(x, xi);
  const Eigen::VectorXd g = defining_->grad_xi(x, z);
  const Eigen::MatrixXd H = defining_->hess_xi(x, z);
  const int i = index_;
  Eigen::VectorXd a = -g / g(i);
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (removed_[static_cast<std::size_t>(j)]) a(j) = 0.0;
  }
  Eigen::MatrixXd out = -(H + H.col(i) * a.transpose() + a * H.row(i) + H(i, i) * a * a.transpose()) /
                        g(i);
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    if (removed_[static_cast<std::size_t>(j)]) {
      out.row(j).setZero();
      out.col(j).setZero();
    }
  }
  return out;
}

double GraphFunction::residual(const Eigen::VectorXd& x, const Eigen::VectorXd& xi) const {
  return std::abs(defining_->value(x, lift(x, xi)));
}

GraphPtr solve_graph(PhaseFunctionPtr sym, int index, const PhasePoint& pt, const GraphOptions& opts) {
  require(sym != nullptr, ErrorKind::invalid_argument, "solve_graph: null symbol");
  const int n = sym->dimension();
  require(pt.dimension() == n && pt.x.size() == n, ErrorKind::invalid_argument,
          "solve_graph: point dimension does not match the symbol");
  require(index >= 0 && index < n, ErrorKind::invalid_argument,
          "solve_graph: coordinate index out of range");
  require(opts.removed.empty() || static_cast<int>(opts.removed.size()) == n,
          ErrorKind::invalid_argument, "solve_graph: removed mask has the wrong length");
  require(opts.half_width > 0.0, ErrorKind::invalid_argument,
          "solve_graph: half-width must be positive");
  const double d = sym->grad_xi(pt.x, pt.xi)(index);
  require(std::abs(d) > opts.grad_tol, ErrorKind::check_failed,
          "solve_graph: d/dxi" + std::to_string(index + 1) + " vanishes at the base point (" +
              format_number(d) + ")");

  std::mt19937_64 rng(0x5eed5eedULL + static_cast<unsigned>(index));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  double w = opts.half_width;
  std::string last_error;
  for (int attempt = 0; attempt <= opts.max_shrinks; ++attempt, w *= 0.5) {
    auto graph = std::make_shared<GraphFunction>(sym, index, pt, w, opts.removed, opts.newton);
    if (graph->closed_form()) return graph;
    try {
      (void)(*graph)(pt.x, pt.xi);
      for (int s = 0; s < opts.validation_samples; ++s) {
        Eigen::VectorXd x = pt.x, xi = pt.xi;
        for (int j = 0; j < n; ++j) {
          x(j) += w * unit(rng);
          if (!graph->removed()[static_cast<std::size_t>(j)]) xi(j) += w * unit(rng);
        }
        (void)(*graph)(x, xi);
      }
      return graph;
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  fail(ErrorKind::check_failed, "solve_graph: no valid box after " +
                                    std::to_string(opts.max_shrinks) + " halvings (" + last_error +
                                    "); try a base point closer to the characteristic set");
}

PhaseFunctionPtr substitute_graph(PhaseFunctionPtr sym, GraphPtr graph) {
  require(sym != nullptr && graph != nullptr, ErrorKind::invalid_argument,
          "substitute_graph: null argument");
  require(sym->dimension() == graph->defining().dimension(), ErrorKind::invalid_argument,
          "substitute_graph: dimension mismatch");
  if (const Symbol* p = sym->polynomial()) {
    if (p->degree_xi(graph->index()) == 0) return sym;
    if (graph->closed_form()) {
      return make_polynomial_function(substitute_xi(*p, graph->index(), *graph->closed_form()));
    }
  }
  return std::make_shared<SubstitutedFunction>(std::move(sym), std::move(graph));
}

CurvatureCertificate curvature_certificate_of_matrix(const Eigen::MatrixXd& H,
                                                     const std::vector<int>& indices,
                                                     double curv_tol) {
  CurvatureCertificate cert;
  cert.indices = indices;
  const auto m = static_cast<Eigen::Index>(indices.size());
  if (m == 0) return cert;
  Eigen::MatrixXd block(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      block(a, b) = H(indices[static_cast<std::size_t>(a)], indices[static_cast<std::size_t>(b)]);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (block + block.transpose()),
                                                    Eigen::EigenvaluesOnly);
  for (Eigen::Index a = 0; a < m; ++a) cert.eigenvalues.push_back(es.eigenvalues()(a));
  cert.passes = cert.eigenvalues.front() > curv_tol;
  return cert;
}

CurvatureCertificate curvature_certificate(const PhaseFunction& f, const PhasePoint& pt,
                                           const std::vector<int>& indices, double curv_tol) {
  return curvature_certificate_of_matrix(f.hess_xi(pt.x, pt.xi), indices, curv_tol);
}

// ---------------------------------------------------------------------------

PhasePoint project_to_characteristic_set(const std::vector<Symbol>& syms, const PhasePoint& pt) {
  check_family(syms, pt, "project");
  const auto r = static_cast<Eigen::Index>(syms.size());
  double scale = 1.0;
  for (const auto& s : syms) scale = std::max(scale, s.coefficient_scale());
  PhasePoint p = pt;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd F(r);
    for (Eigen::Index j = 0; j < r; ++j) F(j) = syms[static_cast<std::size_t>(j)].eval(p);
    if (F.cwiseAbs().maxCoeff() <= 1e-13 * scale) return p;
    const Eigen::MatrixXd J = gradient_matrix(syms, p);
    const Eigen::VectorXd step = J.completeOrthogonalDecomposition().solve(F);
    p.xi -= step;
    if (!p.xi.allFinite()) break;
  }
  fail(ErrorKind::check_failed, "project: base point did not converge onto the characteristic set");
}

ReductionTrace reduce_all(const std::vector<Symbol>& syms, const PhasePoint& pt,
                          const ReduceOptions& opts) {
  check_family(syms, pt, "reduce");
  const int n = pt.dimension();
  const int r = static_cast<int>(syms.size());

  ReductionTrace trace;
  trace.n = n;
  trace.r = r;

  const PhasePoint base = opts.project_base ? project_to_characteristic_set(syms, pt) : pt;
  const AdmissibilityReport adm = check_admissibility(syms, base, opts.tols);
  for (int c = 0; c < 3; ++c) {
    require(adm.passes[c] == Verdict::pass, ErrorKind::check_failed,
            "reduce: family is not admissible at the base point (condition " +
                std::to_string(c + 1) + ": " + to_string(adm.passes[c]) + ")");
  }

  std::vector<Symbol> family = syms;
  if (adm.sign_convention < 0) {
    family.front() *= -1.0;
    trace.warnings.push_back("p_1 negated so that its second fundamental form is positive");
  }

  trace.system = opts.coordinate_change
                     ? apply_coordinate_change(family, base, *opts.coordinate_change, opts.tols)
                     : normalize_coordinates(family, base, opts.tols);

  PhasePoint b = trace.system.plan.base;
  for (int j = 0; j < r; ++j) {
    const double v = trace.system.symbols[static_cast<std::size_t>(j)].eval(b);
    trace.base_residuals.push_back(v);
    if (std::abs(v) > opts.graph.newton.residual_tol) {
      trace.warnings.push_back("base point is off {p_" + std::to_string(j + 1) +
                               " = 0} (value " + format_number(v) + ")");
    }
  }

  std::vector<int> curv_idx;
  for (int j = r; j < n; ++j) curv_idx.push_back(j);

  std::vector<PhaseFunctionPtr> cur;
  for (const auto& s : trace.system.symbols) cur.push_back(make_polynomial_function(s));
  trace.initial_certificate = curvature_certificate(*cur.front(), b, curv_idx, opts.tols.curv);

  std::vector<bool> removed(static_cast<std::size_t>(n), false);
  auto stage_graph = [&](int stage, int i) {
    GraphOptions go = opts.graph;
    go.removed = removed;
    try {
      return solve_graph(cur[static_cast<std::size_t>(i)], i, b, go);
    } catch (const Error& e) {
      throw Error(e.kind(), "reduce: stage " + std::to_string(stage) + " (xi" +
                                std::to_string(i + 1) + "): " + e.what());
    }
  };

  int stage = 1;
  for (int i = r - 1; i >= 1; --i, ++stage) {
    ReductionStage st;
    st.removed_index = i;
    st.graph = stage_graph(stage, i);
    b.xi(i) = (*st.graph)(b.x, b.xi);
    removed[static_cast<std::size_t>(i)] = true;
    for (int j = 0; j < i; ++j) {
      cur[static_cast<std::size_t>(j)] = substitute_graph(cur[static_cast<std::size_t>(j)], st.graph);
      st.reduced.push_back(cur[static_cast<std::size_t>(j)]);
    }
    st.certificate = curvature_certificate(*cur.front(), b, curv_idx, opts.tols.curv);
    trace.stages.push_back(std::move(st));
  }

  ReductionStage last;
  last.removed_index = 0;
  last.graph = stage_graph(stage, 0);
  const Eigen::VectorXd lifted = last.graph->lift(b.x, b.xi);
  const double d1 = cur.front()->grad_xi(b.x, lifted)(0);
  const Eigen::MatrixXd hb = last.graph->hessian(b.x, b.xi);
  last.certificate = curvature_certificate_of_matrix((d1 > 0.0 ? -1.0 : 1.0) * hb, curv_idx,
                                                     opts.tols.curv);
  trace.stages.push_back(std::move(last));

  trace.success = trace.initial_certificate.passes &&
                  std::all_of(trace.stages.begin(), trace.stages.end(),
                              [](const ReductionStage& s) { return s.certificate.passes; });
  return trace;
}

// ---------------------------------------------------------------------------

namespace {

void write_certificate(std::ostream& os, const char* label, const CurvatureCertificate& c) {
  os << "  " << label << " on " << index_set_text(c.indices) << ": [";
  for (std::size_t i = 0; i < c.eigenvalues.size(); ++i) {
    if (i) os << ", ";
    os << format_number(c.eigenvalues[i]);
  }
  os << "] " << (c.passes ? "pass" : "fail") << "\n";
}

void write_matrix(std::ostream& os, const char* label, const Eigen::MatrixXd& M) {
  os << label << ":\n";
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    os << "  " << vec_text(M.row(i).transpose()) << "\n";
  }
}

}  // namespace

void write_trace_report(std::ostream& os, const ReductionTrace& trace) {
  const auto& plan = trace.system.plan;
  os << "reduction n=" << trace.n << " r=" << trace.r
     << " status=" << (trace.success ? "ok" : "certificate-failed") << "\n";
  os << "coordinates: " << (plan.orthogonal ? "orthogonal" : "explicit") << "\n";
  write_matrix(os, "Q", plan.Q);
  write_matrix(os, "L", plan.L);
  os << "base: x = " << vec_text(plan.base.x) << ", xi = " << vec_text(plan.base.xi) << "\n";
  os << "normalized symbols:\n";
  for (std::size_t j = 0; j < trace.system.symbols.size(); ++j) {
    os << "  p" << j + 1 << " = " << format_symbol(trace.system.symbols[j]) << "   (value at base "
       << format_number(trace.base_residuals[j]) << ")\n";
  }
  for (const auto& w : trace.warnings) os << "warning: " << w << "\n";
  os << "initial:\n";
  write_certificate(os, "certificate", trace.initial_certificate);

  int k = 1;
  for (const auto& st : trace.stages) {
    const GraphFunction& g = *st.graph;
    const bool final_stage = &st == &trace.stages.back();
    os << "stage " << k++ << ": xi" << st.removed_index + 1 << " = "
       << (final_stage ? "b" : "a" + std::to_string(st.removed_index + 1)) << "(x, xi~)\n";
    if (g.closed_form()) {
      os << "  graph: " << format_symbol(*g.closed_form()) << "\n";
    } else {
      os << "  graph: implicit, box half-width " << format_number(g.half_width()) << "\n";
    }
    // Samples along the first free xi-direction.
    int free = -1;
    for (int j = 0; j < trace.n; ++j) {
      if (!g.removed()[static_cast<std::size_t>(j)]) {
        free = j;
        break;
      }
    }
    os << "  samples:\n";
    for (double s : {-0.5, 0.0, 0.5}) {
      Eigen::VectorXd xi = g.base().xi;
      if (free >= 0) xi(free) += s * g.half_width();
      os << "    xi = " << vec_text(xi) << "  value = " << format_number(g(g.base().x, xi))
         << "  residual = " << format_number(g.residual(g.base().x, xi)) << "\n";
    }
    write_certificate(os, "certificate", st.certificate);
  }
}

}  // namespace qmlab

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "qmlab/error.hpp"
#include "qmlab/symbols.hpp"

namespace qmlab {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::not_evaluated: return "not-evaluated";
  }
  return "?";
}

bool AdmissibilityReport::all_pass() const {
  return std::all_of(std::begin(passes), std::end(passes),
                     [](Verdict v) { return v == Verdict::pass; });
}

Eigen::MatrixXd tangent_basis(const Eigen::VectorXd& normal) {
  const Eigen::Index n = normal.size();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr{Eigen::MatrixXd(normal)};
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
  return Q.rightCols(n - 1);
}

AdmissibilityReport check_admissibility(const std::vector<Symbol>& syms,
                                        const PhasePoint& pt,
                                        const AdmissibilityTolerances& tols) {
  require(!syms.empty(), ErrorKind::invalid_argument, "admissibility: no symbols");
  const int n = syms.front().dimension();
  const int r = static_cast<int>(syms.size());
  require(r <= n, ErrorKind::invalid_argument,
          "admissibility: r=" + std::to_string(r) + " exceeds n=" + std::to_string(n));
  for (const auto& s : syms) {
    require(s.dimension() == n, ErrorKind::invalid_argument,
            "admissibility: symbols have different dimensions");
    check_dimension(s, pt);
  }

  AdmissibilityReport rep;
  rep.tolerances = tols;

  // Condition 1: each characteristic set is a smooth hypersurface near pt.
  Eigen::MatrixXd normals(r, n);
  bool cond1 = true;
  for (int j = 0; j < r; ++j) {
    const Eigen::VectorXd g = syms[static_cast<std::size_t>(j)].grad_xi(pt);
    const double norm = g.norm();
    rep.gradient_norms.push_back(norm);
    const double scale = syms[static_cast<std::size_t>(j)].coefficient_scale();
    if (!(norm > tols.grad * scale)) {
      cond1 = false;
      normals.row(j).setZero();
    } else {
      normals.row(j) = g.transpose() / norm;
    }
  }
  rep.passes[0] = cond1 ? Verdict::pass : Verdict::fail;

  // Condition 2: unit normals linearly independent.
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(normals);
  rep.normal_min_singular_value = svd.singularValues().minCoeff();
  if (rep.gradient_norms.front() > tols.grad * syms.front().coefficient_scale()) {
    rep.passes[1] = rep.normal_min_singular_value > tols.indep ? Verdict::pass : Verdict::fail;
  } else {
    // Without a tangent space for p_1 the remaining conditions are undefined.
    rep.passes[1] = Verdict::not_evaluated;
    rep.passes[2] = Verdict::not_evaluated;
    return rep;
  }

  // Condition 3: T^T Hess(p_1) T / |grad p_1| definite, either sign.
  const Symbol& p1 = syms.front();
  const Eigen::VectorXd g1 = p1.grad_xi(pt);
  const Eigen::MatrixXd T = tangent_basis(g1);
  if (T.cols() == 0) {
    rep.passes[2] = Verdict::pass;
    return rep;
  }
  const Eigen::MatrixXd sff = T.transpose() * p1.hess_xi(pt) * T / g1.norm();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sff, Eigen::EigenvaluesOnly);
  Eigen::VectorXd ev = eig.eigenvalues();
  rep.sign_convention = ev.sum() < 0 ? -1 : 1;
  ev *= rep.sign_convention;
  std::vector<double> vals(ev.data(), ev.data() + ev.size());
  std::sort(vals.begin(), vals.end());
  rep.second_fundamental_form = vals;
  rep.passes[2] = vals.front() > tols.curv ? Verdict::pass : Verdict::fail;
  return rep;
}

}  // namespace qmlab

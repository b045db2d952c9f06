#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "qmlab/error.hpp"
#include "qmlab/symbol_text.hpp"
#include "qmlab/symbols.hpp"
#include "support.hpp"

using namespace qmlab;

namespace {

Symbol example_p2() { return parse_symbol("xi1 + xi2 - xi3 + x2^2", 3); }

double fd_first(const Symbol& s, PhasePoint pt, int i, double step) {
  PhasePoint a = pt, b = pt;
  a.xi(i) += step;
  b.xi(i) -= step;
  return (s.eval(a) - s.eval(b)) / (2 * step);
}

}  // namespace

TEST(Symbols, EvalExamples) {
  const PhasePoint pt = make_phase_point({0.3, -0.2, 0.7}, {1, 0, 0});
  EXPECT_DOUBLE_EQ(Symbol::helmholtz(3).eval(pt), 0.0);
  EXPECT_DOUBLE_EQ(example_p2().eval(make_phase_point({0, 0, 0}, {1, 0, 0})), 1.0);
  EXPECT_DOUBLE_EQ(Symbol(3).eval(pt), 0.0);
}

TEST(Symbols, EvalRejectsDimensionMismatch) {
  const PhasePoint pt = make_phase_point({0, 0}, {1, 0});
  try {
    (void)Symbol::helmholtz(3).eval(pt);
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
  }
}

TEST(Symbols, GradientExamples) {
  const PhasePoint pt = make_phase_point({0, 0, 0}, {1, 0, 0});
  EXPECT_EQ(Symbol::helmholtz(3).grad_xi(pt), Eigen::Vector3d(2, 0, 0));
  std::mt19937_64 rng(1);
  for (int t = 0; t < 5; ++t) {
    EXPECT_EQ(example_p2().grad_xi(fx::random_point(3, 2.0, rng)), Eigen::Vector3d(1, 1, -1));
  }
  EXPECT_EQ(Symbol::constant(3, 4.0).grad_xi(pt), Eigen::Vector3d::Zero());
}

TEST(Symbols, HessianExamples) {
  const PhasePoint pt = make_phase_point({0, 0, 0}, {1, 1, 0});
  EXPECT_EQ(Symbol::helmholtz(3).hess_xi(pt), 2.0 * Eigen::Matrix3d::Identity());
  EXPECT_EQ(parse_symbol("xi1 + 2*xi2 + x2^2", 3).hess_xi(pt), Eigen::Matrix3d::Zero());

  const Symbol s = parse_symbol("xi1^2*xi2", 3);
  const Eigen::MatrixXd H = s.hess_xi(pt);
  Eigen::Matrix3d expected;
  expected << 2, 2, 0, 2, 0, 0, 0, 0, 0;
  EXPECT_EQ(H, Eigen::MatrixXd(expected));
  // Finite differences of the gradient, step 1e-5.
  const double step = 1e-5;
  for (int j = 0; j < 3; ++j) {
    PhasePoint a = pt, b = pt;
    a.xi(j) += step;
    b.xi(j) -= step;
    const Eigen::VectorXd col = (s.grad_xi(a) - s.grad_xi(b)) / (2 * step);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(col(i), H(i, j), 1e-8);
  }
}

TEST(Symbols, DerivativesMatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  const double step = 1e-5;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 3;
    const Symbol s = fx::random_symbol(n, 2, 4, 6, rng);
    const PhasePoint pt = fx::random_point(n, 1.0, rng);
    const Eigen::VectorXd g = s.grad_xi(pt);
    const Eigen::MatrixXd H = s.hess_xi(pt);
    const double gscale = std::max(1.0, g.cwiseAbs().maxCoeff());
    const double hscale = std::max(1.0, H.cwiseAbs().maxCoeff());
    for (int i = 0; i < n; ++i) {
      EXPECT_NEAR(fd_first(s, pt, i, step), g(i), 1e-7 * gscale);
      for (int j = 0; j < n; ++j) {
        PhasePoint pp = pt, pm = pt, mp = pt, mm = pt;
        pp.xi(i) += step; pp.xi(j) += step;
        pm.xi(i) += step; pm.xi(j) -= step;
        mp.xi(i) -= step; mp.xi(j) += step;
        mm.xi(i) -= step; mm.xi(j) -= step;
        const double fd = (s.eval(pp) - s.eval(pm) - s.eval(mp) + s.eval(mm)) / (4 * step * step);
        EXPECT_NEAR(fd, H(i, j), 1e-5 * hscale);
      }
    }
    EXPECT_TRUE(H.isApprox(H.transpose()));
  }
}

TEST(Symbols, LinearChangeExamples) {
  const Symbol p1 = Symbol::helmholtz(3);
  EXPECT_EQ(linear_change_xi(p1, Eigen::Matrix3d::Identity()), p1);

  Eigen::Matrix3d swap;
  swap << 1, 0, 0, 0, 0, 1, 0, 1, 0;
  EXPECT_EQ(linear_change_xi(Symbol::xi(3, 1), swap), Symbol::xi(3, 2));

  // old (xi2, xi3) = (eta2 + eta3, eta3 - eta2)
  Eigen::Matrix3d Q;
  Q << 1, 0, 0, 0, 1, 1, 0, -1, 1;
  EXPECT_EQ(linear_change_xi(example_p2(), Q), parse_symbol("xi1 + 2*xi2 + x2^2", 3));

  Eigen::Matrix3d singular = Eigen::Matrix3d::Zero();
  singular(0, 0) = 1;
  EXPECT_THROW((void)linear_change_xi(p1, singular), Error);
}

TEST(Symbols, LinearChangeRoundTripOrthogonal) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 2 + trial % 3;
    const Symbol s = fx::random_symbol(n, 2, 3, 5, rng);
    const Eigen::MatrixXd Q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(Eigen::MatrixXd::Random(n, n)).householderQ();
    const Symbol back = linear_change_xi(linear_change_xi(s, Q), Q.transpose());
    // Same term set; coefficients agree to round-off.
    ASSERT_EQ(back.size(), s.size());
    for (const auto& [m, c] : s.terms()) EXPECT_NEAR(back.coefficient(m.x, m.xi), c, 1e-12);
    // Value identity q(x, xi) = s(x, Q xi).
    const PhasePoint pt = fx::random_point(n, 1.0, rng);
    PhasePoint moved = pt;
    moved.xi = Q * pt.xi;
    EXPECT_NEAR(linear_change_xi(s, Q).eval(pt), s.eval(moved), 1e-12);
  }
}

TEST(Symbols, SubstituteExactComposition) {
  const Symbol a2 = parse_symbol("-0.5*xi1 - 0.5*x2^2", 3);
  const Symbol reduced = substitute_xi(Symbol::helmholtz(3), 1, a2);
  EXPECT_EQ(reduced, parse_symbol("1.25*xi1^2 + xi3^2 + 0.5*x2^2*xi1 + 0.25*x2^4 - 1", 3));
  EXPECT_THROW((void)substitute_xi(Symbol::helmholtz(3), 1, Symbol::xi(3, 1)), Error);
}

TEST(Symbols, ArithmeticPrunesTinyTerms) {
  Symbol s = Symbol::xi(2, 0) + Symbol::constant(2, 1e-15);
  EXPECT_EQ(s.size(), 1u);
  EXPECT_TRUE((Symbol::xi(2, 0) - Symbol::xi(2, 0)).is_zero());
}

TEST(SymbolText, ParsesAndRoundTrips) {
  const Symbol s = parse_symbol(" 3.5 * x2^2 * xi1 - xi3 + |xi|^2 - 1 ", 3);
  EXPECT_DOUBLE_EQ(s.coefficient({0, 2, 0}, {1, 0, 0}), 3.5);
  EXPECT_DOUBLE_EQ(s.coefficient({0, 0, 0}, {0, 0, 1}), -1.0);
  EXPECT_DOUBLE_EQ(s.coefficient({0, 0, 0}, {2, 0, 0}), 1.0);
  EXPECT_DOUBLE_EQ(s.coefficient({0, 0, 0}, {0, 0, 0}), -1.0);
  EXPECT_EQ(parse_symbol(format_symbol(s), 3), s);
  EXPECT_EQ(max_variable_index("x2 + xi5"), 5);
}

TEST(SymbolText, ErrorsCarryPosition) {
  try {
    (void)parse_symbol("xi1 + * x2", 2);
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
    EXPECT_NE(std::string(e.what()).find("position 6"), std::string::npos) << e.what();
  }
  EXPECT_THROW((void)parse_symbol("xi4", 3), Error);
  EXPECT_THROW((void)parse_symbol("xi1^-2", 3), Error);
}

// ---------------------------------------------------------------------------

TEST(Admissibility, ModelPairPasses) {
  const std::vector<Symbol> fam{Symbol::helmholtz(2), Symbol::xi(2, 1)};
  const auto rep = check_admissibility(fam, make_phase_point({0, 0}, {1, 0}));
  EXPECT_TRUE(rep.all_pass());
  EXPECT_DOUBLE_EQ(rep.gradient_norms[0], 2.0);
  EXPECT_DOUBLE_EQ(rep.gradient_norms[1], 1.0);
  EXPECT_NEAR(rep.normal_min_singular_value, 1.0, 1e-14);
  ASSERT_EQ(rep.second_fundamental_form.size(), 1u);
  EXPECT_NEAR(rep.second_fundamental_form[0], 1.0, 1e-14);
  EXPECT_EQ(rep.sign_convention, 1);
}

TEST(Admissibility, ParallelNormalsFailCondition2) {
  const std::vector<Symbol> fam{Symbol::helmholtz(2), Symbol::xi(2, 0)};
  const auto rep = check_admissibility(fam, make_phase_point({0, 0}, {1, 0}));
  EXPECT_EQ(rep.passes[0], Verdict::pass);
  EXPECT_EQ(rep.passes[1], Verdict::fail);
}

TEST(Admissibility, DegenerateLevelSetFailsCondition1) {
  const std::vector<Symbol> fam{Symbol::helmholtz(2), Symbol::xi(2, 1).pow(2)};
  const auto rep = check_admissibility(fam, make_phase_point({0, 0}, {1, 0}));
  EXPECT_EQ(rep.passes[0], Verdict::fail);
}

TEST(Admissibility, ZeroGradientOfP1MarksRestNotEvaluated) {
  const std::vector<Symbol> fam{Symbol::xi(2, 0).pow(2), Symbol::xi(2, 1)};
  const auto rep = check_admissibility(fam, make_phase_point({0, 0}, {0, 0}));
  EXPECT_EQ(rep.passes[0], Verdict::fail);
  EXPECT_EQ(rep.passes[1], Verdict::not_evaluated);
  EXPECT_EQ(rep.passes[2], Verdict::not_evaluated);
}

TEST(Admissibility, RejectsTooManySymbols) {
  const std::vector<Symbol> fam{Symbol::helmholtz(2), Symbol::xi(2, 0), Symbol::xi(2, 1)};
  EXPECT_THROW((void)check_admissibility(fam, make_phase_point({0, 0}, {1, 0})), Error);
}

TEST(Admissibility, SphereCurvatureIsOneInEveryDimension) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int n = 2; n <= 5; ++n) {
    for (int t = 0; t < 10; ++t) {
      Eigen::VectorXd xi(n);
      for (int i = 0; i < n; ++i) xi(i) = g(rng);
      xi.normalize();
      const auto rep = check_admissibility({Symbol::helmholtz(n)},
                                           PhasePoint{Eigen::VectorXd::Zero(n), xi});
      ASSERT_EQ(rep.second_fundamental_form.size(), static_cast<std::size_t>(n - 1));
      for (double ev : rep.second_fundamental_form) EXPECT_NEAR(ev, 1.0, 1e-12);
    }
  }
}

TEST(Admissibility, NegatedP1ReportsSign) {
  const auto rep = check_admissibility({-1.0 * Symbol::helmholtz(3)},
                                       make_phase_point({0, 0, 0}, {0, 1, 0}));
  EXPECT_TRUE(rep.all_pass());
  EXPECT_EQ(rep.sign_convention, -1);
}

TEST(Admissibility, SaddleFailsCondition3) {
  const Symbol saddle = parse_symbol("xi1 + xi2^2 - xi3^2", 3);
  const auto rep = check_admissibility({saddle}, make_phase_point({0, 0, 0}, {0, 0, 0}));
  EXPECT_EQ(rep.passes[0], Verdict::pass);
  EXPECT_EQ(rep.passes[2], Verdict::fail);
}

TEST(Admissibility, InvariantUnderScalingAndRelabeling) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 4;
    std::vector<Symbol> fam{Symbol::helmholtz(n)};
    for (int j = 1; j < 3; ++j) fam.push_back(fx::random_symbol(n, 1, 2, 4, rng) + Symbol::xi(n, j));
    const PhasePoint pt = make_phase_point({0, 0, 0, 0}, {1, 0, 0, 0});
    const auto base = check_admissibility(fam, pt);

    std::vector<Symbol> scaled = fam;
    for (auto& s : scaled) s *= (rng() % 2 ? 1.0 : -1.0) * scale(rng);
    const auto rs = check_admissibility(scaled, pt);

    std::vector<Symbol> swapped{fam[0], fam[2], fam[1]};
    const auto rw = check_admissibility(swapped, pt);
    for (int c = 0; c < 3; ++c) {
      EXPECT_EQ(rs.passes[c], base.passes[c]);
      EXPECT_EQ(rw.passes[c], base.passes[c]);
    }
    EXPECT_DOUBLE_EQ(rw.gradient_norms[1], base.gradient_norms[2]);
    EXPECT_DOUBLE_EQ(rw.gradient_norms[2], base.gradient_norms[1]);
  }
}

#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "qmlab/analysis.hpp"
#include "qmlab/error.hpp"
#include "qmlab/quasimodes.hpp"

using namespace qmlab;

namespace {

constexpr double kPi = 3.14159265358979323846;

std::vector<double> p_samples() {
  std::vector<double> ps;
  for (int i = 0; i < 200; ++i) ps.push_back(2.0 + 62.0 * i / 199.0);
  ps.push_back(kInfinity);
  return ps;
}

}  // namespace

TEST(Delta, MatchesSoggeForHypersurfaces) {
  for (int n = 2; n <= 5; ++n) {
    for (double p : p_samples()) {
      EXPECT_LE(std::abs(delta_exponent(n, p, 1) - sogge_delta(n, p)), 1e-15) << n << " " << p;
    }
  }
}

TEST(Delta, Examples) {
  EXPECT_DOUBLE_EQ(delta_exponent(3, kInfinity, 2), 0.5);
  EXPECT_NEAR(delta_exponent(3, 4, 1), 0.25, 1e-15);
  // Both branches at p* = 4: 1 - 3/4 and 1/2 - 1/4.
  EXPECT_NEAR(1.0 - 3.0 / 4, 0.5 - 1.0 / 4, 1e-15);
  EXPECT_DOUBLE_EQ(sogge_delta(2, kInfinity), 0.5);
  EXPECT_DOUBLE_EQ(sogge_delta(3, 2), 0.0);
  EXPECT_DOUBLE_EQ(critical_p(3, 1), 4.0);
  EXPECT_DOUBLE_EQ(critical_p(3, 2), 6.0);
  EXPECT_DOUBLE_EQ(critical_p(2, 1), 6.0);
}

TEST(Delta, BranchesAgreeAtCriticalP) {
  for (int n = 2; n <= 6; ++n) {
    for (int r = 1; r < n; ++r) {
      const double ps = critical_p(n, r);
      const double m = n - r;
      const double hi = m / 2 - (m + 1) / ps;
      const double lo = m / 4 - m / (2 * ps);
      EXPECT_LE(std::abs(hi - lo), 1e-12);
      EXPECT_LE(std::abs(delta_exponent(n, ps * (1 - 1e-12), r) - delta_exponent(n, ps, r)), 1e-11);
    }
  }
  for (int n = 2; n <= 5; ++n) {
    const double ps = 2.0 * (n + 1) / (n - 1);
    const double d = n;
    EXPECT_LE(std::abs((d - 1) / 2 - d / ps - ((d - 1) / 4 - (d - 1) / (2 * ps))), 1e-12);
  }
}

TEST(Delta, EndpointValues) {
  for (int n = 2; n <= 6; ++n) {
    for (int r = 1; r <= n; ++r) {
      EXPECT_EQ(delta_exponent(n, 2, r), 0.0);
      EXPECT_EQ(delta_exponent(n, kInfinity, r), (n - r) / 2.0);
    }
  }
}

TEST(Delta, Monotone) {
  for (int n = 2; n <= 6; ++n) {
    for (int r = 1; r < n; ++r) {
      double prev = -1.0;
      for (double p : p_samples()) {
        const double d = delta_exponent(n, p, r);
        EXPECT_GE(d, prev - 1e-15);
        prev = d;
      }
    }
    for (double p : p_samples()) {
      for (int r = 1; r + 1 < n; ++r) {
        if (p < critical_p(n, r)) continue;
        EXPECT_GE(delta_exponent(n, p, r), delta_exponent(n, p, r + 1));
      }
    }
  }
}

TEST(Delta, RejectsInvalidQueries) {
  EXPECT_THROW((void)delta_exponent(1, 4, 1), Error);
  EXPECT_THROW((void)delta_exponent(3, 1.5, 1), Error);
  EXPECT_THROW((void)delta_exponent(3, 4, 4), Error);
  EXPECT_THROW((void)delta_exponent(3, 4, 0), Error);
  EXPECT_THROW((void)critical_p(3, 3), Error);
  EXPECT_EQ(delta_exponent(3, 4, 3), 0.0);
}

// ---------------------------------------------------------------------------

TEST(Fit, ExactLine) {
  std::vector<std::pair<double, double>> pts;
  for (int i = 0; i < 6; ++i) pts.emplace_back(i * 0.7, 0.5 * i * 0.7 + 1.0);
  const auto f = fit_exponent(pts);
  EXPECT_NEAR(f.slope, 0.5, 1e-14);
  EXPECT_NEAR(f.intercept, 1.0, 1e-14);
  EXPECT_NEAR(f.rms, 0.0, 1e-14);
}

TEST(Fit, TwoPointsInterpolate) {
  const std::vector<std::pair<double, double>> pts{{1.0, 2.0}, {3.0, 5.0}};
  const auto f = fit_exponent(pts);
  EXPECT_DOUBLE_EQ(f.slope, 1.5);
  EXPECT_NEAR(f.rms, 0.0, 1e-15);
}

TEST(Fit, NoisySquareRoot) {
  std::mt19937_64 rng(0);
  std::normal_distribution<double> noise(0.0, 0.01);
  std::vector<std::pair<double, double>> pts;
  for (double lam : {64.0, 96.0, 128.0, 192.0, 256.0, 384.0, 512.0}) {
    pts.emplace_back(std::log(lam), std::log(std::sqrt(lam) * (1 + noise(rng))));
  }
  const auto f = fit_exponent(pts);
  EXPECT_GE(f.slope, 0.45);
  EXPECT_LE(f.slope, 0.55);
}

TEST(Fit, DegenerateAbscissae) {
  const std::vector<std::pair<double, double>> pts{{1.0, 2.0}, {1.0, 5.0}};
  EXPECT_THROW((void)fit_exponent(pts), Error);
  const std::vector<std::pair<double, double>> one{{1.0, 2.0}};
  EXPECT_THROW((void)fit_exponent(one), Error);
}

// ---------------------------------------------------------------------------

TEST(LpNorm, Constants) {
  const TorusGrid g(2, 16);
  GridFunction one(g);
  for (auto& z : one.values()) z = 1.0;
  EXPECT_NEAR(lp_norm(one, 2), 2 * kPi, 1e-12);
  EXPECT_NEAR(lp_norm(one, 4), std::pow(4 * kPi * kPi, 0.25), 1e-12);
  EXPECT_DOUBLE_EQ(lp_norm(one, kInfinity), 1.0);
  EXPECT_THROW((void)lp_norm(one, 0.5), Error);
}

TEST(LpNorm, PlaneWaveSup) {
  const TorusGrid g(2, 32);
  const auto q = make_plane_wave(g, {3, -2});
  EXPECT_NEAR(lp_norm(q.u, kInfinity), 1.0, 1e-12);
  EXPECT_NEAR(lp_norm(q.u, 2), 2 * kPi, 1e-12);
}

TEST(LpNorm, ClusterPeakIsPointCount) {
  const TorusGrid g(2, 32);
  const auto q = make_cluster(g, 5, 1);
  EXPECT_NEAR(lp_norm(q.u, kInfinity), 36.0, 1e-9);
}

TEST(LpNorm, LargeExponentDoesNotOverflow) {
  const TorusGrid g(2, 128);
  const auto q = make_cluster(g, 20, 1);
  const double v = lp_norm(q.u, 400);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_LE(v, lp_norm(q.u, kInfinity) * std::pow(4 * kPi * kPi, 1.0 / 400) * (1 + 1e-12));
}

TEST(LpNorm, HolderInterpolation) {
  const TorusGrid g(2, 128);
  std::vector<Quasimode> qs;
  qs.push_back(make_cluster(g, 20, 1));
  qs.push_back(make_knapp(g, 25));
  qs.push_back(make_plane_wave(g, {4, 1}));
  const TorusGrid g3(3, 32);
  qs.push_back(make_tensor_joint(g3, 2, 6, QuasimodeKind::cluster, 1.0));
  for (const auto& q : qs) {
    const double l2 = lp_norm(q.u, 2), linf = lp_norm(q.u, kInfinity);
    for (double p : {2.5, 3.0, 4.0, 6.0, 8.0, 17.0}) {
      EXPECT_LE(lp_norm(q.u, p), std::pow(l2, 2 / p) * std::pow(linf, 1 - 2 / p) * (1 + 1e-12));
    }
  }
}

// ---------------------------------------------------------------------------

TEST(FamilyExponent, Values) {
  QuasimodeSpec s;
  s.kind = QuasimodeKind::cluster;
  s.n = 2;
  EXPECT_DOUBLE_EQ(*family_exponent(s, kInfinity), 0.5);
  EXPECT_NEAR(*family_exponent(s, 6), 1.0 / 6, 1e-15);
  EXPECT_FALSE(family_exponent(s, 4));
  s.kind = QuasimodeKind::knapp;
  EXPECT_DOUBLE_EQ(*family_exponent(s, kInfinity), 0.25);
  EXPECT_DOUBLE_EQ(*family_exponent(s, 2), 0.0);
  s.kind = QuasimodeKind::tensor_joint;
  s.n = 3;
  s.r = 2;
  s.inner = QuasimodeKind::cluster;
  EXPECT_DOUBLE_EQ(*family_exponent(s, kInfinity), 0.5);
  s.kind = QuasimodeKind::plane_wave;
  EXPECT_DOUBLE_EQ(*family_exponent(s, kInfinity), 0.0);
}

TEST(Sweep, SmallClusterSweep) {
  QuasimodeSpec s;
  s.kind = QuasimodeKind::cluster;
  s.n = 2;
  s.W = 1.0;
  const auto rep = run_sweep(s, {Symbol::helmholtz(2)}, {2.0, 6.0, kInfinity},
                             {16, 24, 32, 48, 64});
  ASSERT_EQ(rep.results.size(), 3u);
  for (const auto& res : rep.results) {
    EXPECT_EQ(res.rows.size(), 5u);
    EXPECT_EQ(res.r, 1);
    for (const auto& row : res.rows) EXPECT_DOUBLE_EQ(row.h, 1 / row.lambda);
  }
  EXPECT_NEAR(rep.results[0].fit.slope, 0.0, 1e-12);
  EXPECT_TRUE(rep.results[2].two_sided);
  EXPECT_FALSE(rep.results[1].two_sided);
  EXPECT_DOUBLE_EQ(rep.results[2].expected, 0.5);
  ASSERT_EQ(rep.defects.size(), 1u);
  for (std::size_t i = 0; i < rep.defects[0].size(); ++i) {
    const double h = 1.0 / rep.results[0].rows[i].lambda;
    EXPECT_LE(rep.defects[0][i], 2 * h + h * h + 1e-12);
  }
}

TEST(Sweep, ThreadCountDoesNotChangeOutput) {
  QuasimodeSpec s;
  s.kind = QuasimodeKind::knapp;
  s.n = 2;
  const std::vector<double> lambdas{16, 24, 32, 48, 64};
  SweepOptions one, four;
  four.threads = 4;
  std::ostringstream a, b, c;
  write_sweep_csv(a, run_sweep(s, {}, {4.0, kInfinity}, lambdas, one));
  write_sweep_csv(b, run_sweep(s, {}, {4.0, kInfinity}, lambdas, four));
  write_sweep_csv(c, run_sweep(s, {}, {4.0, kInfinity}, lambdas, one));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str(), c.str());
  EXPECT_EQ(a.str().rfind("lambda,h,p,lp_norm,l2_norm,ratio,log_lambda,log_ratio\n", 0), 0u);
  EXPECT_NE(a.str().find("# {\"family\":\"knapp\""), std::string::npos) << a.str();
}

TEST(Sweep, RejectsBadInput) {
  QuasimodeSpec s;
  EXPECT_THROW((void)run_sweep(s, {}, {kInfinity}, {16, 24, 32}), Error);
  EXPECT_THROW((void)run_sweep(s, {}, {kInfinity}, {16, 24, 24, 32}), Error);
  EXPECT_THROW((void)run_sweep(s, {}, {1.5}, {16, 24, 32, 48}), Error);
  SweepOptions small;
  small.grid.max_points = 64;
  try {
    (void)run_sweep(s, {}, {kInfinity}, {16, 24, 32, 48}, small);
    FAIL() << "expected a grid-limit rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::precondition);
    EXPECT_NE(std::string(e.what()).find("lambda=16"), std::string::npos) << e.what();
  }
}

// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qmlab/analysis.hpp"
#include "qmlab/error.hpp"
#include "qmlab/quantization.hpp"
#include "qmlab/quasimodes.hpp"
#include "qmlab/reduction.hpp"
#include "qmlab/symbol_text.hpp"
#include "qmlab/symbols.hpp"

using namespace qmlab;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

void note(Outcome& o, bool ok, const std::string& what) {
  if (!ok) o.pass = false;
  if (!o.detail.empty()) o.detail += "; ";
  o.detail += what + (ok ? "" : " [FAILED]");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Symbol random_symbol(int n, int dx, int dxi, int terms, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  std::uniform_int_distribution<int> axis(0, n - 1);
  Symbol s(n);
  for (int t = 0; t < terms; ++t) {
    MultiIndex bx(static_cast<std::size_t>(n), 0), ba(static_cast<std::size_t>(n), 0);
    const int ex = std::uniform_int_distribution<int>(0, dx)(rng);
    const int ea = std::uniform_int_distribution<int>(0, dxi)(rng);
    for (int i = 0; i < ex; ++i) ++bx[static_cast<std::size_t>(axis(rng))];
    for (int i = 0; i < ea; ++i) ++ba[static_cast<std::size_t>(axis(rng))];
    s.add_term(coef(rng), bx, ba);
  }
  return s;
}

PhasePoint unit_point(int n) {
  PhasePoint pt{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  pt.xi(0) = 1.0;
  return pt;
}

// ---------------------------------------------------------------------------

Outcome exponent_table() {
  Outcome o;
  double sogge_gap = 0.0;
  for (int n = 2; n <= 5; ++n) {
    std::vector<double> ps;
    for (int i = 0; i < 200; ++i) ps.push_back(2.0 + 62.0 * i / 199.0);
    ps.push_back(kInfinity);
    for (double p : ps) {
      sogge_gap = std::max(sogge_gap, std::abs(delta_exponent(n, p, 1) - sogge_delta(n, p)));
    }
  }
  note(o, sogge_gap <= 1e-15, "max |delta(n,p,1) - sogge| = " + num(sogge_gap));

  double jump = 0.0;
  bool ends = true;
  for (int n = 2; n <= 6; ++n) {
    for (int r = 1; r < n; ++r) {
      const double ps = critical_p(n, r), m = n - r;
      jump = std::max(jump, std::abs((m / 2 - (m + 1) / ps) - (m / 4 - m / (2 * ps))));
      jump = std::max(jump, std::abs(delta_exponent(n, ps, r) -
                                     delta_exponent(n, std::nextafter(ps, 0.0), r)));
    }
    for (int r = 1; r <= n; ++r) {
      ends = ends && delta_exponent(n, 2, r) == 0.0 &&
             delta_exponent(n, kInfinity, r) == (n - r) / 2.0;
    }
  }
  note(o, jump <= 1e-12, "branch gap at p* = " + num(jump));
  note(o, ends, "delta(n,2,r) = 0 and delta(n,inf,r) = (n-r)/2");
  return o;
}

Outcome quantization_exactness() {
  Outcome o;
  const Symbol helm = Symbol::helmholtz(2);
  const TorusGrid g64(2, 64);
  const auto pw = make_plane_wave(g64, {3, 4});
  const double eig = apply_operator(helm, pw.u, 0.2).l2_norm() / pw.u.l2_norm();
  note(o, eig <= 1e-12, "plane-wave residual " + num(eig));

  std::mt19937_64 rng(2);
  std::normal_distribution<double> d;
  GridFunction u(g64);
  for (auto& z : u.values()) z = Complex(d(rng), d(rng));
  const double parseval =
      std::abs(semiclassical_fourier(u, 0.1).l2_norm() - u.l2_norm()) / u.l2_norm();
  note(o, parseval <= 1e-12, "Parseval " + num(parseval));

  double worst = 0.0;
  int max_n = 0;
  const std::vector<double> xi0{0.5, 0.25};
  const double h = 1.0 / 16;
  const TorusGrid grid = wave_packet_grid(2, xi0, h);
  max_n = grid.points_per_axis();
  const GridFunction packet = make_wave_packet(grid, xi0, h);
  for (int pair = 0; pair < 20; ++pair) {
    const Symbol p = random_symbol(2, 2, 2, 5, rng);
    const Symbol q = random_symbol(2, 2, 2, 5, rng);
    const GridFunction lhs = apply_operator(p, apply_operator(q, packet, h), h);
    const GridFunction rhs = apply_expansion(moyal_compose(p, q, 16), packet, h);
    worst = std::max(worst, (lhs - rhs).l2_norm() / packet.l2_norm());
  }
  note(o, worst <= 1e-8 && max_n <= 256,
       "Moyal identity worst " + num(worst) + " over 20 pairs at N=" + std::to_string(max_n));
  return o;
}

Outcome commutator_scaling() {
  Outcome o;
  std::mt19937_64 rng(3);
  const std::vector<double> xi0{0.25, 0.0};
  std::vector<double> hs;
  for (int e = 4; e <= 9; ++e) hs.push_back(std::ldexp(1.0, -e));
  std::vector<GridFunction> packets;
  for (double h : hs) packets.push_back(make_wave_packet(wave_packet_grid(2, xi0, h), xi0, h));
  double worst = -kInfinity;
  int commuting = 0;
  for (int pair = 0; pair < 20; ++pair) {
    const Symbol p = random_symbol(2, 2, 2, 4, rng);
    const Symbol q = random_symbol(2, 2, 2, 4, rng);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < hs.size(); ++i) {
      const double c = commutator_defect(p, q, packets[i], hs[i]);
      if (c > 0.0) pts.emplace_back(std::log(1 / hs[i]), std::log(c));
    }
    if (pts.size() < hs.size() || std::exp(pts.front().second) < 1e-12) {
      ++commuting;
      continue;
    }
    worst = std::max(worst, fit_exponent(pts).slope);
  }
  note(o, worst <= -0.9, "worst slope " + num(worst) + " over " +
                             std::to_string(20 - commuting) + " non-commuting pairs, h=2^-4..2^-9");
  return o;
}

Outcome strong_quasimodes() {
  Outcome o;
  const Symbol helm = Symbol::helmholtz(2);
  DefectOptions freq;
  freq.operator_route = false;
  bool all = true;
  double worst = 0.0;
  for (double lam : {32.0, 64.0, 128.0, 256.0, 512.0}) {
    const TorusGrid grid(2, grid_points_for(lam, 4.0));
    const Quasimode q = make_cluster(grid, lam, 1.0);
    const DefectReport rep = defect_report({helm}, q, 3, freq);
    const double wh = q.h;
    for (int k = 1; k <= 3; ++k) {
      const DefectEntry& e = rep.at({k});
      const double bound = std::pow(2 * wh + wh * wh, k);
      all = all && *e.exact <= bound && *e.window_sup <= bound;
      worst = std::max(worst, *e.window_sup / bound);
    }
  }
  note(o, all, "defect_k <= (2Wh+(Wh)^2)^k for lambda=32..512, k=1..3 (worst sup/bound " +
                   num(worst) + ")");
  const TorusGrid small(2, 32);
  const Quasimode q5 = make_cluster(small, 5.0, 1.0);
  const double d1 = *defect_report({helm}, q5, 1, freq).at({1}).window_sup;
  note(o, std::abs(d1 - 9.0 / 25.0) <= 1e-12, "lambda=5 defect_1 = " + num(d1) + " (9/25)");
  return o;
}

Outcome reduction_pipeline(std::vector<std::string>& warnings) {
  Outcome o;
  const std::vector<Symbol> fam{Symbol::helmholtz(3), parse_symbol("xi1 + xi2 - xi3 + x2^2", 3)};
  Eigen::Matrix3d Q;
  Q << 1, 0, 0, 0, 1, 1, 0, -1, 1;
  ReduceOptions explicit_q;
  explicit_q.coordinate_change = Q;
  const ReductionTrace tr = reduce_all(fam, unit_point(3), explicit_q);
  const auto& a2 = tr.stages.front().graph->closed_form();
  const bool graph_ok = a2 && *a2 == parse_symbol("-0.5*xi1 - 0.5*x2^2", 3);
  note(o, graph_ok, "a2 = " + (a2 ? format_symbol(*a2) : std::string("implicit")));

  bool certs = tr.success && tr.initial_certificate.passes;
  for (const auto& st : tr.stages) {
    for (double ev : st.certificate.eigenvalues) certs = certs && ev > 0.0;
  }
  const ReductionTrace orth = reduce_all(fam, unit_point(3));
  certs = certs && orth.success;
  note(o, certs, "explicit and orthogonal traces complete with positive certificates");
  for (const auto& w : tr.warnings) warnings.push_back("reduce: " + w);

  const Symbol direct = substitute_xi(Symbol::helmholtz(3), 1, parse_symbol("-0.5*xi1 - 0.5*x2^2", 3));
  const double err = std::max(
      {std::abs(direct.coefficient({0, 0, 0}, {2, 0, 0}) - 1.25),
       std::abs(direct.coefficient({0, 0, 0}, {0, 0, 2}) - 1.0),
       std::abs(direct.coefficient({0, 2, 0}, {1, 0, 0}) - 0.5),
       std::abs(direct.coefficient({0, 4, 0}, {0, 0, 0}) - 0.25)});
  note(o, err <= 1e-12, "direct substitution monomials 5/4, 1, 1/2, 1/4 (err " + num(err) + ")");
  const double c0 = direct.coefficient({0, 0, 0}, {0, 0, 0});
  if (c0 != 0.0) {
    warnings.push_back("direct substitution leaves a constant term " + format_number(c0) +
                       " absent from the displayed reduced symbol");
  }

  std::vector<Symbol> model{Symbol::helmholtz(4), Symbol::xi(4, 1), Symbol::xi(4, 2)};
  const ReductionTrace mt = reduce_all(model, unit_point(4));
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> d(-0.1, 0.1);
  double berr = 0.0;
  for (int s = 0; s < 100; ++s) {
    Eigen::Vector4d x, xi(0, 0, 0, d(rng));
    for (int i = 0; i < 4; ++i) x(i) = d(rng);
    berr = std::max(berr, std::abs(mt.final_graph()(x, xi) - std::sqrt(1 - xi(3) * xi(3))));
  }
  note(o, mt.success && berr <= 1e-10, "model b = sqrt(1-xi4^2), err " + num(berr));
  return o;
}

Outcome sharpness_sweeps() {
  Outcome o;
  const std::vector<double> big{64, 96, 128, 192, 256, 384, 512};
  auto check_upper = [&](const SweepReport& rep, const std::string& name) {
    bool ok = true;
    std::string s;
    for (const auto& r : rep.results) {
      ok = ok && r.fit.slope <= r.expected + 0.15;
      s += (s.empty() ? "" : ",") + num(r.fit.slope);
    }
    note(o, ok, name + " upper bound at p=2,p*,inf (slopes " + s + ")");
  };

  QuasimodeSpec cl;
  cl.kind = QuasimodeKind::cluster;
  cl.n = 2;
  const double ps2 = critical_p(2, 1);
  const auto a = run_sweep(cl, {}, {2.0, ps2, kInfinity}, big);
  const double sa = a.results.back().fit.slope;
  note(o, std::abs(sa - 0.5) <= 0.15, "(a) cluster slope " + num(sa));
  check_upper(a, "(d) cluster");

  QuasimodeSpec kn;
  kn.kind = QuasimodeKind::knapp;
  kn.n = 2;
  const auto b = run_sweep(kn, {}, {2.0, ps2, kInfinity}, big);
  const double sb = b.results.back().fit.slope;
  note(o, std::abs(sb - 0.25) <= 0.1, "(b) Knapp slope " + num(sb));
  check_upper(b, "(d) Knapp");

  QuasimodeSpec tj;
  tj.kind = QuasimodeKind::tensor_joint;
  tj.inner = QuasimodeKind::cluster;
  tj.n = 3;
  tj.r = 2;
  SweepOptions small;
  small.grid.factor = 4.0;
  small.grid.max_points = 256;
  const std::vector<Symbol> syms{Symbol::helmholtz(3), Symbol::xi(3, 1)};
  const auto c = run_sweep(tj, syms, {2.0, critical_p(3, 2), kInfinity}, {16, 24, 32, 48, 64},
                           small);
  const double sc = c.results.back().fit.slope;
  bool zero = true;
  for (double v : c.defects[1]) zero = zero && v == 0.0;
  note(o, std::abs(sc - delta_exponent(3, kInfinity, 2)) <= 0.15 && zero,
       "(c) tensor slope " + num(sc) + ", xi2-defect exactly 0: " + (zero ? "yes" : "no"));
  check_upper(c, "(d) tensor");
  return o;
}

Outcome admissibility_gate() {
  Outcome o;
  const PhasePoint pt = make_phase_point({0, 0}, {1, 0});
  const auto model = check_admissibility({Symbol::helmholtz(2), Symbol::xi(2, 1)}, pt);
  note(o, model.all_pass(), "model pair passes 1-3");
  const auto par = check_admissibility({Symbol::helmholtz(2), Symbol::xi(2, 0)}, pt);
  note(o, par.passes[1] == Verdict::fail, "parallel normals fail condition 2");
  const auto deg = check_admissibility({parse_symbol("xi2^2", 2)}, pt);
  note(o, deg.passes[0] == Verdict::fail, "xi2^2 fails condition 1");
  return o;
}

Outcome localization_contract() {
  Outcome o;
  const Symbol helm = Symbol::helmholtz(2);
  DefectOptions freq;
  freq.operator_route = false;
  double worst = 0.0;
  for (double lam : {32.0, 64.0, 128.0}) {
    const TorusGrid grid(2, grid_points_for(lam, 8.0));
    QuasimodeSpec spec;
    spec.kind = QuasimodeKind::localized;
    spec.inner = QuasimodeKind::cluster;
    spec.n = 2;
    spec.lambda = lam;
    spec.localize.x_width = 0.5;
    const Quasimode loc = build_quasimode(grid, spec);
    const Quasimode base = make_cluster(grid, lam, 1.0);
    const double r = defect_report({helm}, loc.u, loc.h, 1, freq).at({1}).value() /
                     defect_report({helm}, base, 1, freq).at({1}).value();
    worst = std::max(worst, r);
  }
  note(o, worst <= 10.0, "worst localized/unlocalized defect ratio " + num(worst) +
                             " over lambda=32,64,128");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome(std::vector<std::string>&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "exponent-table identities", 1, [](auto&) { return exponent_table(); }},
      {2, "quantization exactness", 30, [](auto&) { return quantization_exactness(); }},
      {3, "commutation scaling", 120, [](auto&) { return commutator_scaling(); }},
      {4, "strong-quasimode inequality", 60, [](auto&) { return strong_quasimodes(); }},
      {5, "reduction pipeline", 10, [](auto& w) { return reduction_pipeline(w); }},
      {6, "sharpness sweeps", 780, [](auto&) { return sharpness_sweeps(); }},
      {7, "admissibility gate", 1, [](auto&) { return admissibility_gate(); }},
      {8, "localization contract", 60, [](auto&) { return localization_contract(); }},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    std::vector<std::string> warnings;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run(warnings);
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = out.pass && in_time;
    if (!pass) ++failures;
    for (const auto& w : warnings) std::printf("WARN  %d %s\n", c.id, w.c_str());
    std::printf("%s  %d %s: %s (%.2f s of %.0f s)\n", pass ? "PASS" : "FAIL", c.id, c.name,
                out.detail.c_str(), secs, c.budget_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

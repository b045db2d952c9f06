#include "qmlab/quasimodes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qmlab/error.hpp"

namespace qmlab {

namespace {

void check_headroom(const TorusGrid& grid, const LatticeWindow& window) {
  require(!window.points.empty(), ErrorKind::precondition,
          "empty lattice window (" + window.rule + ")");
  const int limit = grid.headroom_limit();
  for (const auto& k : window.points) {
    require(static_cast<int>(k.size()) == grid.dimension(), ErrorKind::invalid_argument,
            "lattice point dimension does not match grid");
    for (int v : k) {
      if (std::abs(v) > limit) {
        fail(ErrorKind::precondition,
             "aliasing: lattice point component " + std::to_string(v) + " exceeds N/4 = " +
                 std::to_string(limit) + " (" + window.rule + ")");
      }
    }
  }
}

void check_lambda(double lambda) {
  require(std::isfinite(lambda) && lambda >= 1.0, ErrorKind::invalid_argument,
          "lambda must be >= 1");
}

std::string describe(const char* what, double a, double b) {
  return std::string(what) + " [" + std::to_string(a) + ", " + std::to_string(b) + "]";
}

}  // namespace

const char* to_string(QuasimodeKind k) {
  switch (k) {
    case QuasimodeKind::plane_wave: return "plane_wave";
    case QuasimodeKind::cluster: return "cluster";
    case QuasimodeKind::knapp: return "knapp";
    case QuasimodeKind::tensor_joint: return "tensor_joint";
    case QuasimodeKind::localized: return "localized";
  }
  return "?";
}

QuasimodeKind quasimode_kind_from_string(const std::string& s) {
  for (auto k : {QuasimodeKind::plane_wave, QuasimodeKind::cluster, QuasimodeKind::knapp,
                 QuasimodeKind::tensor_joint, QuasimodeKind::localized}) {
    if (s == to_string(k)) return k;
  }
  fail(ErrorKind::invalid_argument, "unknown quasimode kind '" + s + "'");
}

GridFunction synthesize(const TorusGrid& grid, const LatticeWindow& window,
                        const std::vector<double>& x0) {
  check_headroom(grid, window);
  const int n = grid.dimension();
  require(x0.empty() || static_cast<int>(x0.size()) == n, ErrorKind::invalid_argument,
          "phase centre has wrong dimension");
  FrequencyFunction F(grid, 1.0);
  const double amp = std::pow(2.0 * std::numbers::pi, 0.5 * n);
  for (const auto& k : window.points) {
    double phase = 0.0;
    for (int a = 0; a < n && !x0.empty(); ++a) {
      phase -= k[static_cast<std::size_t>(a)] * x0[static_cast<std::size_t>(a)];
    }
    F.at(k) += std::polar(amp, phase);
  }
  return inverse_semiclassical_fourier(F);
}

Quasimode make_plane_wave(const TorusGrid& grid, const LatticePoint& k) {
  LatticeWindow w{{k}, "plane wave"};
  GridFunction u = synthesize(grid, w);
  double norm = 0.0;
  for (int v : k) norm += static_cast<double>(v) * v;
  norm = std::sqrt(norm);
  return Quasimode{std::move(u), norm >= 1.0 ? 1.0 / norm : 1.0, std::move(w)};
}

Quasimode make_cluster(const TorusGrid& grid, double lambda, double W,
                       const std::vector<double>& x0) {
  check_lambda(lambda);
  require(W > 0.0, ErrorKind::invalid_argument, "cluster width W must be positive");
  LatticeWindow w{annulus_points(grid.dimension(), lambda - W, lambda),
                  describe("annulus |k| in", std::max(0.0, lambda - W), lambda)};
  GridFunction u = synthesize(grid, w, x0);
  return Quasimode{std::move(u), 1.0 / lambda, std::move(w)};
}

Quasimode make_knapp(const TorusGrid& grid, double lambda) {
  require(std::isfinite(lambda), ErrorKind::invalid_argument, "lambda must be finite");
  LatticeWindow w{knapp_points(grid.dimension(), lambda),
                  "knapp cap lambda=" + std::to_string(lambda)};
  require(!w.points.empty(), ErrorKind::precondition,
          "empty Knapp cap at lambda=" + std::to_string(lambda));
  check_lambda(lambda);
  GridFunction u = synthesize(grid, w);
  return Quasimode{std::move(u), 1.0 / lambda, std::move(w)};
}

Quasimode make_tensor_joint(const TorusGrid& grid, int r, double lambda, QuasimodeKind inner,
                            double W) {
  const int n = grid.dimension();
  require(r >= 2 && r <= n, ErrorKind::invalid_argument,
          "tensor rank r=" + std::to_string(r) + " outside 2..n=" + std::to_string(n));
  require(inner == QuasimodeKind::cluster || inner == QuasimodeKind::knapp,
          ErrorKind::invalid_argument, "tensor inner kind must be cluster or knapp");
  check_lambda(lambda);
  const int d = n - r + 1;
  // Active axes: 0 and r..n-1; axes 1..r-1 carry zero frequency.
  std::vector<int> active{0};
  for (int a = r; a < n; ++a) active.push_back(a);

  std::vector<LatticePoint> inner_pts;
  std::string rule;
  if (inner == QuasimodeKind::cluster) {
    require(W > 0.0, ErrorKind::invalid_argument, "cluster width W must be positive");
    inner_pts = annulus_points(d, lambda - W, lambda);
    rule = describe("tensor cluster |k| in", std::max(0.0, lambda - W), lambda);
  } else {
    inner_pts = knapp_points(d, lambda);
    rule = "tensor knapp cap lambda=" + std::to_string(lambda);
  }
  LatticeWindow w{{}, rule + " r=" + std::to_string(r)};
  w.points.reserve(inner_pts.size());
  for (const auto& kp : inner_pts) {
    LatticePoint k(static_cast<std::size_t>(n), 0);
    for (int j = 0; j < d; ++j) {
      k[static_cast<std::size_t>(active[static_cast<std::size_t>(j)])] = kp[static_cast<std::size_t>(j)];
    }
    w.points.push_back(std::move(k));
  }
  GridFunction u = synthesize(grid, w);
  return Quasimode{std::move(u), 1.0 / lambda, std::move(w)};
}

Quasimode build_quasimode(const TorusGrid& grid, const QuasimodeSpec& spec) {
  require(spec.n == grid.dimension(), ErrorKind::invalid_argument,
          "quasimode spec dimension does not match grid");
  require(spec.r >= 1 && spec.r <= spec.n, ErrorKind::invalid_argument,
          "quasimode rank r must satisfy 1 <= r <= n");
  switch (spec.kind) {
    case QuasimodeKind::plane_wave:
      return make_plane_wave(grid, spec.k);
    case QuasimodeKind::cluster:
      return make_cluster(grid, spec.lambda, spec.W, spec.x0);
    case QuasimodeKind::knapp:
      return make_knapp(grid, spec.lambda);
    case QuasimodeKind::tensor_joint:
      return make_tensor_joint(grid, spec.r, spec.lambda, spec.inner, spec.W);
    case QuasimodeKind::localized: {
      QuasimodeSpec base = spec;
      base.kind = spec.inner;
      require(base.kind != QuasimodeKind::localized, ErrorKind::invalid_argument,
              "localized quasimode needs a non-localized inner kind");
      Quasimode q = build_quasimode(grid, base);
      q.u = localize(q.u, spec.localize, q.h);
      q.window.reset();
      return q;
    }
  }
  fail(ErrorKind::invalid_argument, "unknown quasimode kind");
}

double plateau(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  auto f = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
  const double a = f(2.0 - t);
  return a / (a + f(t - 1.0));
}

GridFunction localize(const GridFunction& u, const LocalizeParams& params, double h) {
  const TorusGrid& grid = u.grid();
  const int n = grid.dimension();
  GridFunction out = u;

  if (params.xi_width) {
    const double w = *params.xi_width;
    require(w > 0.0, ErrorKind::invalid_argument, "frequency cutoff width must be positive");
    std::vector<double> centre = params.xi_center;
    if (centre.empty()) centre.assign(static_cast<std::size_t>(n), 0.0);
    require(static_cast<int>(centre.size()) == n, ErrorKind::invalid_argument,
            "frequency cutoff centre has wrong dimension");
    const double reach = h * grid.headroom_limit();
    for (double c : centre) {
      if (std::abs(c) + 2.0 * w > reach) {
        fail(ErrorKind::precondition,
             "frequency cutoff reaches |xi_i| = " + std::to_string(std::abs(c) + 2.0 * w) +
                 " beyond the headroom h N/4 = " + std::to_string(reach));
      }
    }
    out = apply_multiplier(
        [&](std::span<const double> xi) {
          double d2 = 0.0;
          for (int a = 0; a < n; ++a) {
            const double d = xi[static_cast<std::size_t>(a)] - centre[static_cast<std::size_t>(a)];
            d2 += d * d;
          }
          return plateau(std::sqrt(d2) / w);
        },
        out, h);
  }

  if (params.x_width) {
    const double w = *params.x_width;
    require(w > 0.0, ErrorKind::invalid_argument, "spatial cutoff width must be positive");
    require(2.0 * w < std::numbers::pi, ErrorKind::precondition,
            "spatial cutoff support exceeds the fundamental domain");
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (std::size_t flat = 0; flat < grid.size(); ++flat) {
      grid.unflatten(flat, idx);
      double r2 = 0.0;
      for (int a = 0; a < n; ++a) {
        const double x = grid.coordinate(idx[static_cast<std::size_t>(a)]);
        r2 += x * x;
      }
      out[flat] *= plateau(std::sqrt(r2) / w);
    }
  }
  return out;
}

double DefectEntry::value() const {
  if (exact) return *exact;
  if (defect) return *defect;
  fail(ErrorKind::invalid_argument, "defect entry has no value");
}

double DefectEntry::normalized(double h) const {
  int total = 0;
  for (int v : k) total += v;
  return value() / std::pow(h, total);
}

const DefectEntry& DefectReport::at(const MultiIndex& k) const {
  for (const auto& e : entries) {
    if (e.k == k) return e;
  }
  fail(ErrorKind::invalid_argument, "defect report has no such multi-index");
}

namespace {

std::vector<MultiIndex> defect_indices(int r, int kmax) {
  std::vector<MultiIndex> out;
  MultiIndex k(static_cast<std::size_t>(r), 0);
  while (true) {
    int s = 0;
    for (int v : k) s += v;
    if (s <= kmax) out.push_back(k);
    int a = r - 1;
    while (a >= 0) {
      if (++k[static_cast<std::size_t>(a)] <= kmax) break;
      k[static_cast<std::size_t>(a)] = 0;
      --a;
    }
    if (a < 0) break;
  }
  std::stable_sort(out.begin(), out.end(), [](const MultiIndex& a, const MultiIndex& b) {
    int sa = 0, sb = 0;
    for (int v : a) sa += v;
    for (int v : b) sb += v;
    return sa < sb;
  });
  return out;
}

void check_defect_inputs(const std::vector<Symbol>& syms, int n, int kmax) {
  require(!syms.empty(), ErrorKind::invalid_argument, "defect report: no symbols");
  require(kmax >= 1, ErrorKind::invalid_argument, "defect report: kmax must be >= 1");
  for (const auto& s : syms) {
    require(s.dimension() == n, ErrorKind::invalid_argument,
            "defect report: symbol dimension does not match grid");
  }
}

}  // namespace

DefectReport defect_report(const std::vector<Symbol>& syms, const GridFunction& u, double h,
                           int kmax, const DefectOptions& opts) {
  check_defect_inputs(syms, u.grid().dimension(), kmax);
  const double norm = u.l2_norm();
  require(norm > 0.0, ErrorKind::invalid_argument, "defect report of the zero function");
  const bool x_free = std::none_of(syms.begin(), syms.end(),
                                   [](const Symbol& s) { return s.depends_on_x(); });
  require(opts.operator_route || x_free, ErrorKind::invalid_argument,
          "defect report: frequency route needs x-independent symbols");
  DefectReport rep;
  rep.kmax = kmax;
  rep.h = h;
  const int r = static_cast<int>(syms.size());
  for (const MultiIndex& k : defect_indices(r, kmax)) {
    DefectEntry e;
    e.k = k;
    if (opts.operator_route) {
      std::vector<const Symbol*> ops;
      for (int j = r - 1; j >= 0; --j) {
        for (int t = 0; t < k[static_cast<std::size_t>(j)]; ++t) {
          ops.push_back(&syms[static_cast<std::size_t>(j)]);
        }
      }
      e.defect = apply_chain(ops, u, h, opts.apply).l2_norm() / norm;
    }
    rep.entries.push_back(std::move(e));
  }
  if (!x_free) return rep;

  // Exact multipliers on the full spectrum.
  const FrequencyFunction F = semiclassical_fourier(u, h);
  const auto coeffs = F.coefficients();
  const TorusGrid& grid = u.grid();
  const int n = grid.dimension();
  const int N = grid.points_per_axis();
  std::vector<std::vector<double>> mult(syms.size(), std::vector<double>(coeffs.size()));
  std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
  std::vector<double> xi(static_cast<std::size_t>(n));
  for (std::size_t f = 0; f < coeffs.size(); ++f) {
    std::size_t rest = f;
    for (int a = n - 1; a >= 0; --a) {
      const int bin = static_cast<int>(rest % static_cast<std::size_t>(N));
      rest /= static_cast<std::size_t>(N);
      xi[static_cast<std::size_t>(a)] = h * grid.frequency_of_bin(bin);
    }
    for (std::size_t j = 0; j < syms.size(); ++j) mult[j][f] = std::abs(syms[j].eval(zero, xi));
  }
  double base = 0.0;
  for (const Complex& c : coeffs) base += std::norm(c);
  for (auto& e : rep.entries) {
    double sum2 = 0.0;
    for (std::size_t f = 0; f < coeffs.size(); ++f) {
      double v = 1.0;
      for (std::size_t j = 0; j < syms.size(); ++j) {
        for (int t = 0; t < e.k[j]; ++t) v *= mult[j][f];
      }
      sum2 += v * v * std::norm(coeffs[f]);
    }
    e.exact = std::sqrt(sum2 / base);
  }
  return rep;
}

DefectReport defect_report(const std::vector<Symbol>& syms, const Quasimode& q, int kmax,
                           const DefectOptions& opts) {
  const int n = q.u.grid().dimension();
  check_defect_inputs(syms, n, kmax);
  DefectReport rep = defect_report(syms, q.u, q.h, kmax, opts);
  const bool x_free = std::none_of(syms.begin(), syms.end(),
                                   [](const Symbol& s) { return s.depends_on_x(); });
  if (!x_free || !q.window) return rep;

  // Multiplier values |p_j(h k)| on the window.
  const std::size_t r = syms.size();
  const std::size_t m = q.window->points.size();
  std::vector<std::vector<double>> mult(r, std::vector<double>(m));
  std::vector<double> zero(static_cast<std::size_t>(n), 0.0);
  std::vector<double> xi(static_cast<std::size_t>(n));
  for (std::size_t p = 0; p < m; ++p) {
    for (int a = 0; a < n; ++a) {
      xi[static_cast<std::size_t>(a)] = q.h * q.window->points[p][static_cast<std::size_t>(a)];
    }
    for (std::size_t j = 0; j < r; ++j) mult[j][p] = std::abs(syms[j].eval(zero, xi));
  }
  for (auto& e : rep.entries) {
    double sum2 = 0.0;
    double sup = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      double v = 1.0;
      for (std::size_t j = 0; j < r; ++j) {
        for (int t = 0; t < e.k[j]; ++t) v *= mult[j][p];
      }
      sum2 += v * v;
      sup = std::max(sup, v);
    }
    e.exact = std::sqrt(sum2 / static_cast<double>(m));
    e.window_sup = sup;
  }
  return rep;
}

GridFunction make_wave_packet(const TorusGrid& grid, const std::vector<double>& xi0, double h,
                              double sigma) {
  const int n = grid.dimension();
  require(static_cast<int>(xi0.size()) == n, ErrorKind::invalid_argument,
          "wave packet: xi0 must have n entries");
  require(h > 0.0 && sigma > 0.0, ErrorKind::invalid_argument,
          "wave packet: h and sigma must be positive");
  GridFunction u(grid);
  std::vector<int> idx(static_cast<std::size_t>(n));
  for (std::size_t f = 0; f < grid.size(); ++f) {
    grid.unflatten(f, idx);
    double r2 = 0.0, phase = 0.0;
    for (int a = 0; a < n; ++a) {
      const double x = grid.coordinate(idx[static_cast<std::size_t>(a)]);
      r2 += x * x;
      phase += xi0[static_cast<std::size_t>(a)] * x / h;
    }
    u[f] = std::polar(std::exp(-r2 / (2 * sigma * sigma)), phase);
  }
  return u;
}

TorusGrid wave_packet_grid(int n, const std::vector<double>& xi0, double h) {
  double kmax = 0.0;
  for (double v : xi0) kmax = std::max(kmax, std::abs(v) / h);
  return TorusGrid(n, grid_points_for(kmax + 32.0, 4.0));
}

}  // namespace qmlab

#include "qmlab/quantization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fft.hpp"
#include "qmlab/error.hpp"

namespace qmlab {

namespace {

using detail::fft_inplace;
using detail::FftDirection;

void check_h(double h) {
  require(h > 0.0 && h <= 1.0, ErrorKind::invalid_argument,
          "semiclassical parameter h must lie in (0, 1]");
}

void check_symbol_grid(const Symbol& sym, const GridFunction& u) {
  require(sym.dimension() == u.grid().dimension(), ErrorKind::invalid_argument,
          "dimension mismatch: symbol n=" + std::to_string(sym.dimension()) + ", grid n=" +
              std::to_string(u.grid().dimension()));
}

std::vector<Complex> raw_spectrum(const GridFunction& u) {
  std::vector<Complex> s(u.values().begin(), u.values().end());
  fft_inplace(s, u.grid(), FftDirection::forward);
  return s;
}

// Inverse of raw_spectrum, including the 1/N^n normalization.
GridFunction from_raw_spectrum(const TorusGrid& grid, std::vector<Complex> s) {
  fft_inplace(s, grid, FftDirection::backward);
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& v : s) v *= scale;
  return GridFunction(grid, std::move(s));
}

// Iterates the flat indices of a grid while tracking the per-axis index.
template <class F>
void for_each_index(const TorusGrid& grid, F&& f) {
  const int n = grid.dimension();
  const int N = grid.points_per_axis();
  std::vector<int> idx(static_cast<std::size_t>(n), 0);
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    f(flat, std::span<const int>(idx));
    for (int a = n - 1; a >= 0; --a) {
      if (++idx[static_cast<std::size_t>(a)] < N) break;
      idx[static_cast<std::size_t>(a)] = 0;
    }
  }
}

struct BandEnergy {
  double total = 0.0;
  double outside = 0.0;
};

BandEnergy band_energy(const TorusGrid& grid, std::span<const Complex> s) {
  const int limit = grid.headroom_limit();
  BandEnergy b;
  for_each_index(grid, [&](std::size_t flat, std::span<const int> bins) {
    const double e = std::norm(s[flat]);
    b.total += e;
    for (int m : bins) {
      if (std::abs(grid.frequency_of_bin(m)) > limit) {
        b.outside += e;
        break;
      }
    }
  });
  return b;
}

double out_of_band_from_spectrum(const TorusGrid& grid, std::span<const Complex> s) {
  const BandEnergy b = band_energy(grid, s);
  return b.total > 0.0 ? std::sqrt(b.outside / b.total) : 0.0;
}

// Out-of-band amplitude at or below `noise_floor` (spectral units) is
// round-off from an earlier application, not aliasing.
void check_alias(const TorusGrid& grid, std::span<const Complex> s, const ApplyOptions& opts,
                 double noise_floor = 0.0) {
  const BandEnergy b = band_energy(grid, s);
  const double frac = b.total > 0.0 ? std::sqrt(b.outside / b.total) : 0.0;
  if (frac > opts.alias_tol && std::sqrt(b.outside) > noise_floor) {
    fail(ErrorKind::precondition,
         "aliasing risk: relative amplitude " + std::to_string(frac) +
             " beyond |k_i| > N/4 (N=" + std::to_string(grid.points_per_axis()) + ")");
  }
}

// Crude operator-norm bound for sym(x, hD) on the grid: |x_i| <= pi and
// |h k_i| <= h N / 2.
double operator_bound(const Symbol& sym, const TorusGrid& grid, double h) {
  const double kmax = h * grid.points_per_axis() / 2.0;
  double s = 0.0;
  for (const auto& [m, c] : sym.terms()) {
    double t = std::abs(c);
    for (int e : m.x) t *= std::pow(std::numbers::pi, e);
    for (int e : m.xi) t *= std::pow(kmax, e);
    s += t;
  }
  return s;
}

// Values of an x-only polynomial at every grid point.
std::vector<double> x_polynomial_on_grid(const Symbol& coeff, const TorusGrid& grid) {
  const int n = grid.dimension();
  const int N = grid.points_per_axis();
  std::vector<double> out(grid.size(), 0.0);
  for (const auto& [m, c] : coeff.terms()) {
    // Per-axis tables of x_a^e over the grid coordinates.
    std::vector<std::vector<double>> tables(static_cast<std::size_t>(n));
    for (int a = 0; a < n; ++a) {
      auto& t = tables[static_cast<std::size_t>(a)];
      t.resize(static_cast<std::size_t>(N));
      const int e = m.x[static_cast<std::size_t>(a)];
      for (int i = 0; i < N; ++i) t[static_cast<std::size_t>(i)] = std::pow(grid.coordinate(i), e);
    }
    const double coef = c;
    for_each_index(grid, [&](std::size_t flat, std::span<const int> idx) {
      double v = coef;
      for (int a = 0; a < n; ++a) {
        v *= tables[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
      }
      out[flat] += v;
    });
  }
  return out;
}

// (h k)^alpha over all FFT bins.
std::vector<double> xi_monomial_on_bins(const MultiIndex& alpha, const TorusGrid& grid, double h) {
  const int n = grid.dimension();
  const int N = grid.points_per_axis();
  std::vector<std::vector<double>> tables(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    auto& t = tables[static_cast<std::size_t>(a)];
    t.resize(static_cast<std::size_t>(N));
    for (int b = 0; b < N; ++b) {
      t[static_cast<std::size_t>(b)] =
          std::pow(h * grid.frequency_of_bin(b), alpha[static_cast<std::size_t>(a)]);
    }
  }
  std::vector<double> out(grid.size());
  for_each_index(grid, [&](std::size_t flat, std::span<const int> bins) {
    double v = 1.0;
    for (int a = 0; a < n; ++a) {
      v *= tables[static_cast<std::size_t>(a)][static_cast<std::size_t>(bins[static_cast<std::size_t>(a)])];
    }
    out[flat] = v;
  });
  return out;
}

bool is_zero_index(const MultiIndex& m) {
  return std::all_of(m.begin(), m.end(), [](int e) { return e == 0; });
}

void multi_indices_of_degree(int n, int k, MultiIndex& cur, int axis,
                             std::vector<MultiIndex>& out) {
  if (axis == n - 1) {
    cur[static_cast<std::size_t>(axis)] = k;
    out.push_back(cur);
    return;
  }
  for (int e = k; e >= 0; --e) {
    cur[static_cast<std::size_t>(axis)] = e;
    multi_indices_of_degree(n, k - e, cur, axis + 1, out);
  }
}

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

}  // namespace

FrequencyFunction semiclassical_fourier(const GridFunction& u, double h) {
  check_h(h);
  const TorusGrid& grid = u.grid();
  std::vector<Complex> s = raw_spectrum(u);
  // exp(-i k x_j) with x_j = -pi + j dx contributes (-1)^k per axis; bins and
  // frequencies differ by N (even), so the parity of the bin index suffices.
  const double scale = std::pow(grid.spacing() / grid.points_per_axis(), 0.5 * grid.dimension());
  for_each_index(grid, [&](std::size_t flat, std::span<const int> bins) {
    int parity = 0;
    for (int b : bins) parity += b;
    s[flat] *= (parity % 2 == 0 ? scale : -scale);
  });
  return FrequencyFunction(grid, h, std::move(s));
}

GridFunction inverse_semiclassical_fourier(const FrequencyFunction& F) {
  const TorusGrid& grid = F.grid();
  std::vector<Complex> s(F.coefficients().begin(), F.coefficients().end());
  const double scale = std::pow(grid.spacing() / grid.points_per_axis(), 0.5 * grid.dimension());
  const double inv = 1.0 / scale;
  for_each_index(grid, [&](std::size_t flat, std::span<const int> bins) {
    int parity = 0;
    for (int b : bins) parity += b;
    s[flat] *= (parity % 2 == 0 ? inv : -inv);
  });
  return from_raw_spectrum(grid, std::move(s));
}

double out_of_band_fraction(const GridFunction& u) {
  const std::vector<Complex> s = raw_spectrum(u);
  return out_of_band_from_spectrum(u.grid(), s);
}

namespace {

GridFunction apply_operator_impl(const Symbol& sym, const GridFunction& u, double h,
                                 const ApplyOptions& opts, double noise_floor) {
  check_h(h);
  check_symbol_grid(sym, u);
  const TorusGrid& grid = u.grid();
  GridFunction out(grid);
  if (sym.is_zero()) return out;

  const std::vector<MultiIndex> alphas = sym.xi_exponents();
  const bool needs_spectrum =
      std::any_of(alphas.begin(), alphas.end(), [](const MultiIndex& a) { return !is_zero_index(a); });
  std::vector<Complex> spectrum;
  if (needs_spectrum) {
    spectrum = raw_spectrum(u);
    check_alias(grid, spectrum, opts, noise_floor);
  }

  for (const MultiIndex& alpha : alphas) {
    const Symbol coeff = sym.x_coefficient_of(alpha);
    std::vector<Complex> v;
    if (is_zero_index(alpha)) {
      v.assign(u.values().begin(), u.values().end());
    } else {
      const std::vector<double> mult = xi_monomial_on_bins(alpha, grid, h);
      std::vector<Complex> t(spectrum.size());
      for (std::size_t i = 0; i < t.size(); ++i) t[i] = spectrum[i] * mult[i];
      GridFunction g = from_raw_spectrum(grid, std::move(t));
      v.assign(g.values().begin(), g.values().end());
    }
    if (coeff.depends_on_x()) {
      const std::vector<double> c = x_polynomial_on_grid(coeff, grid);
      for (std::size_t i = 0; i < v.size(); ++i) out[i] += c[i] * v[i];
    } else {
      const double c = coeff.terms().begin()->second;
      for (std::size_t i = 0; i < v.size(); ++i) out[i] += c * v[i];
    }
  }
  return out;
}

}  // namespace

GridFunction apply_operator(const Symbol& sym, const GridFunction& u, double h,
                            const ApplyOptions& opts) {
  return apply_operator_impl(sym, u, h, opts, 0.0);
}

GridFunction apply_chain(const std::vector<const Symbol*>& ops, const GridFunction& u, double h,
                         const ApplyOptions& opts) {
  GridFunction v = u;
  double floor = 0.0;
  for (const Symbol* sym : ops) {
    require(sym != nullptr, ErrorKind::invalid_argument, "apply_chain: null symbol");
    // Round-off left by earlier applications, in unnormalized DFT units; it
    // is carried forward amplified by the operator bound.
    const double prev = std::sqrt(static_cast<double>(v.grid().size()) / v.grid().cell_volume()) *
                        v.l2_norm();
    v = apply_operator_impl(*sym, v, h, opts, floor);
    floor = operator_bound(*sym, v.grid(), h) * (floor + 1e-13 * prev);
  }
  return v;
}

GridFunction apply_power(const Symbol& sym, int k, const GridFunction& u, double h,
                         const ApplyOptions& opts) {
  require(k >= 0, ErrorKind::invalid_argument, "negative operator power");
  return apply_chain(std::vector<const Symbol*>(static_cast<std::size_t>(k), &sym), u, h, opts);
}

GridFunction apply_multiplier(const std::function<double(std::span<const double>)>& m,
                              const GridFunction& u, double h) {
  check_h(h);
  const TorusGrid& grid = u.grid();
  std::vector<Complex> s = raw_spectrum(u);
  std::vector<double> xi(static_cast<std::size_t>(grid.dimension()));
  for_each_index(grid, [&](std::size_t flat, std::span<const int> bins) {
    for (std::size_t a = 0; a < xi.size(); ++a) xi[a] = h * grid.frequency_of_bin(bins[a]);
    s[flat] *= m(xi);
  });
  return from_raw_spectrum(grid, std::move(s));
}

CompositionExpansion moyal_compose(const Symbol& p, const Symbol& q, int h_degree_cap) {
  require(p.dimension() == q.dimension(), ErrorKind::invalid_argument,
          "composition: symbol dimensions differ");
  require(h_degree_cap >= 0, ErrorKind::invalid_argument, "composition: negative degree cap");
  const int n = p.dimension();
  CompositionExpansion e;
  e.termination_degree = std::min(p.degree_xi(), q.degree_x());
  e.truncated = h_degree_cap < e.termination_degree;
  const int last = std::min(e.termination_degree, h_degree_cap);

  for (int k = 0; k <= last; ++k) {
    Symbol sum(n);
    std::vector<MultiIndex> alphas;
    MultiIndex cur(static_cast<std::size_t>(n), 0);
    multi_indices_of_degree(n, k, cur, 0, alphas);
    for (const MultiIndex& alpha : alphas) {
      Symbol dp = p;
      Symbol dq = q;
      double alpha_fact = 1.0;
      for (int i = 0; i < n; ++i) {
        const int a = alpha[static_cast<std::size_t>(i)];
        for (int j = 0; j < a; ++j) {
          dp = dp.d_xi(i);
          dq = dq.d_x(i);
        }
        alpha_fact *= factorial(a);
      }
      if (dp.is_zero() || dq.is_zero()) continue;
      sum += (1.0 / alpha_fact) * (dp * dq);
    }
    // (1/i)^k = (-i)^k cycles through 1, -i, -1, i.
    CompositionTerm term{k, Symbol(n), Symbol(n)};
    switch (k % 4) {
      case 0: term.real = sum; break;
      case 1: term.imag = -1.0 * sum; break;
      case 2: term.real = -1.0 * sum; break;
      case 3: term.imag = sum; break;
    }
    if (!term.real.is_zero() || !term.imag.is_zero()) e.terms.push_back(std::move(term));
  }
  return e;
}

GridFunction apply_expansion(const CompositionExpansion& e, const GridFunction& u, double h,
                             const ApplyOptions& opts) {
  GridFunction out(u.grid());
  for (const auto& t : e.terms) {
    const double hk = std::pow(h, t.h_power);
    if (!t.real.is_zero()) out += apply_operator(t.real, u, h, opts) * Complex(hk, 0.0);
    if (!t.imag.is_zero()) out += apply_operator(t.imag, u, h, opts) * Complex(0.0, hk);
  }
  return out;
}

double commutator_defect(const Symbol& p, const Symbol& q, const GridFunction& u, double h,
                         const ApplyOptions& opts) {
  const double norm = u.l2_norm();
  require(norm > 0.0, ErrorKind::invalid_argument, "commutator defect of the zero function");
  GridFunction pq = apply_operator(p, apply_operator(q, u, h, opts), h, opts);
  pq -= apply_operator(q, apply_operator(p, u, h, opts), h, opts);
  return pq.l2_norm() / norm;
}

namespace {

struct ChebyshevAxis {
  std::vector<double> nodes;
  // weights[i * M + m] = Lagrange basis m evaluated at grid coordinate i.
  std::vector<double> basis;
};

ChebyshevAxis chebyshev_axis(int M, const TorusGrid& grid) {
  ChebyshevAxis ax;
  const int N = grid.points_per_axis();
  ax.nodes.resize(static_cast<std::size_t>(M));
  std::vector<double> w(static_cast<std::size_t>(M));
  for (int m = 0; m < M; ++m) {
    ax.nodes[static_cast<std::size_t>(m)] = std::numbers::pi * std::cos(std::numbers::pi * m / (M - 1));
    w[static_cast<std::size_t>(m)] = ((m % 2 == 0) ? 1.0 : -1.0) * ((m == 0 || m == M - 1) ? 0.5 : 1.0);
  }
  ax.basis.assign(static_cast<std::size_t>(N) * static_cast<std::size_t>(M), 0.0);
  for (int i = 0; i < N; ++i) {
    const double x = grid.coordinate(i);
    double* row = ax.basis.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(M);
    int exact = -1;
    for (int m = 0; m < M; ++m) {
      if (x == ax.nodes[static_cast<std::size_t>(m)]) exact = m;
    }
    if (exact >= 0) {
      row[exact] = 1.0;
      continue;
    }
    double denom = 0.0;
    for (int m = 0; m < M; ++m) {
      const double t = w[static_cast<std::size_t>(m)] / (x - ax.nodes[static_cast<std::size_t>(m)]);
      row[m] = t;
      denom += t;
    }
    for (int m = 0; m < M; ++m) row[m] /= denom;
  }
  return ax;
}

// Barycentric interpolation of samples f(nodes) at a single point.
double interpolate_1d(const std::vector<double>& nodes, const std::vector<double>& f, double x) {
  const int M = static_cast<int>(nodes.size());
  double num = 0.0;
  double den = 0.0;
  for (int m = 0; m < M; ++m) {
    const double d = x - nodes[static_cast<std::size_t>(m)];
    if (d == 0.0) return f[static_cast<std::size_t>(m)];
    const double w = ((m % 2 == 0) ? 1.0 : -1.0) * ((m == 0 || m == M - 1) ? 0.5 : 1.0) / d;
    num += w * f[static_cast<std::size_t>(m)];
    den += w;
  }
  return num / den;
}

}  // namespace

GridFunction apply_sampled_symbol(
    const std::function<double(std::span<const double>, std::span<const double>)>& a,
    const std::vector<bool>& x_dependence, const GridFunction& u, double h,
    const ParametrixOptions& opts, double* interp_error) {
  check_h(h);
  const TorusGrid& grid = u.grid();
  const int n = grid.dimension();
  require(static_cast<int>(x_dependence.size()) == n, ErrorKind::invalid_argument,
          "x-dependence mask has wrong length");
  std::vector<int> deps;
  for (int i = 0; i < n; ++i) {
    if (x_dependence[static_cast<std::size_t>(i)]) deps.push_back(i);
  }
  const int d = static_cast<int>(deps.size());
  const std::vector<Complex> spectrum = raw_spectrum(u);
  check_alias(grid, spectrum, opts.apply);

  std::vector<double> xbuf(static_cast<std::size_t>(n), 0.0);
  std::vector<double> xibuf(static_cast<std::size_t>(n), 0.0);

  auto multiplier_pass = [&](std::span<const double> xnode) {
    std::vector<Complex> t(spectrum.size());
    for_each_index(grid, [&](std::size_t flat, std::span<const int> bins) {
      for (int ax = 0; ax < n; ++ax) {
        xibuf[static_cast<std::size_t>(ax)] = h * grid.frequency_of_bin(bins[static_cast<std::size_t>(ax)]);
      }
      t[flat] = spectrum[flat] * a(xnode, xibuf);
    });
    return from_raw_spectrum(grid, std::move(t));
  };

  if (d == 0) {
    if (interp_error) *interp_error = 0.0;
    return multiplier_pass(xbuf);
  }

  const int M = opts.nodes_per_axis;
  require(M >= 3, ErrorKind::invalid_argument, "need at least 3 Chebyshev nodes per axis");
  const ChebyshevAxis axis = chebyshev_axis(M, grid);

  // Interpolation error of a in x along each dependent axis, sampled at grid
  // coordinates for a spread of occupied frequencies.
  {
    double max_a = 0.0;
    double max_err = 0.0;
    const int N = grid.points_per_axis();
    const auto stride_k = std::max<std::size_t>(1, grid.size() / 512);
    for (std::size_t flat = 0; flat < grid.size(); flat += stride_k) {
      std::vector<int> bins(static_cast<std::size_t>(n));
      grid.unflatten(flat, bins);
      for (int ax = 0; ax < n; ++ax) {
        xibuf[static_cast<std::size_t>(ax)] = h * grid.frequency_of_bin(bins[static_cast<std::size_t>(ax)]);
      }
      for (int dep : deps) {
        std::fill(xbuf.begin(), xbuf.end(), 0.0);
        std::vector<double> samples(static_cast<std::size_t>(M));
        for (int m = 0; m < M; ++m) {
          xbuf[static_cast<std::size_t>(dep)] = axis.nodes[static_cast<std::size_t>(m)];
          samples[static_cast<std::size_t>(m)] = a(xbuf, xibuf);
        }
        for (int i = 0; i < N; i += std::max(1, N / 64)) {
          const double x = grid.coordinate(i) + 0.5 * grid.spacing();
          xbuf[static_cast<std::size_t>(dep)] = x;
          const double exact = a(xbuf, xibuf);
          max_a = std::max(max_a, std::abs(exact));
          max_err = std::max(max_err, std::abs(exact - interpolate_1d(axis.nodes, samples, x)));
        }
      }
    }
    const double rel = max_a > 0.0 ? max_err / max_a : 0.0;
    if (interp_error) *interp_error = rel;
    if (rel > opts.interpolation_tol) {
      fail(ErrorKind::precondition,
           "sampled symbol not resolved by " + std::to_string(M) +
               " Chebyshev nodes (relative error " + std::to_string(rel) + ")");
    }
  }

  GridFunction out(grid);
  std::vector<int> node_idx(static_cast<std::size_t>(d), 0);
  while (true) {
    std::fill(xbuf.begin(), xbuf.end(), 0.0);
    for (int j = 0; j < d; ++j) {
      xbuf[static_cast<std::size_t>(deps[static_cast<std::size_t>(j)])] =
          axis.nodes[static_cast<std::size_t>(node_idx[static_cast<std::size_t>(j)])];
    }
    const std::vector<double> xnode = xbuf;
    const GridFunction v = multiplier_pass(xnode);
    for_each_index(grid, [&](std::size_t flat, std::span<const int> idx) {
      double w = 1.0;
      for (int j = 0; j < d; ++j) {
        const int gi = idx[static_cast<std::size_t>(deps[static_cast<std::size_t>(j)])];
        w *= axis.basis[static_cast<std::size_t>(gi) * static_cast<std::size_t>(M) +
                        static_cast<std::size_t>(node_idx[static_cast<std::size_t>(j)])];
      }
      if (w != 0.0) out[flat] += w * v[flat];
    });
    int j = d - 1;
    while (j >= 0 && ++node_idx[static_cast<std::size_t>(j)] == M) {
      node_idx[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
  return out;
}

double parametrix_residual(const Symbol& p, const GridFunction& u, double h, double lower_bound,
                           const ParametrixOptions& opts) {
  check_h(h);
  check_symbol_grid(p, u);
  const TorusGrid& grid = u.grid();
  const int n = grid.dimension();
  const double norm = u.l2_norm();
  require(norm > 0.0, ErrorKind::invalid_argument, "parametrix residual of the zero function");

  // Ellipticity on occupied frequencies x sampled points of the fundamental domain.
  {
    const std::vector<Complex> s = raw_spectrum(u);
    double smax = 0.0;
    for (const auto& v : s) smax = std::max(smax, std::abs(v));
    std::vector<std::size_t> occupied;
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (std::abs(s[i]) > 1e-10 * smax) occupied.push_back(i);
    }
    const std::size_t kstride = std::max<std::size_t>(1, occupied.size() / 2048);
    const int N = grid.points_per_axis();
    const int xstride = std::max(1, N / 16);
    std::vector<double> x(static_cast<std::size_t>(n));
    std::vector<double> xi(static_cast<std::size_t>(n));
    std::vector<int> bins(static_cast<std::size_t>(n));
    std::vector<int> xi_idx(static_cast<std::size_t>(n));
    double minabs = std::numeric_limits<double>::infinity();
    for (std::size_t o = 0; o < occupied.size(); o += kstride) {
      grid.unflatten(occupied[o], bins);
      for (int a = 0; a < n; ++a) {
        xi[static_cast<std::size_t>(a)] = h * grid.frequency_of_bin(bins[static_cast<std::size_t>(a)]);
      }
      std::fill(xi_idx.begin(), xi_idx.end(), 0);
      while (true) {
        for (int a = 0; a < n; ++a) x[static_cast<std::size_t>(a)] = grid.coordinate(xi_idx[static_cast<std::size_t>(a)]);
        minabs = std::min(minabs, std::abs(p.eval(x, xi)));
        int a = n - 1;
        while (a >= 0) {
          xi_idx[static_cast<std::size_t>(a)] += xstride;
          if (xi_idx[static_cast<std::size_t>(a)] < N) break;
          xi_idx[static_cast<std::size_t>(a)] = 0;
          --a;
        }
        if (a < 0) break;
      }
    }
    if (!(minabs > lower_bound)) {
      fail(ErrorKind::precondition,
           "ellipticity violated: sampled min |p(x, hk)| = " + std::to_string(minabs) +
               " <= " + std::to_string(lower_bound));
    }
  }

  const GridFunction w = apply_operator(p, u, h, opts.apply);
  std::vector<bool> deps(static_cast<std::size_t>(n), false);
  for (const auto& [m, c] : p.terms()) {
    for (int a = 0; a < n; ++a) {
      if (m.x[static_cast<std::size_t>(a)] > 0) deps[static_cast<std::size_t>(a)] = true;
    }
  }
  auto reciprocal = [&p](std::span<const double> x, std::span<const double> xi) {
    return 1.0 / p.eval(x, xi);
  };
  GridFunction back = apply_sampled_symbol(reciprocal, deps, w, h, opts);
  back -= u;
  return back.l2_norm() / norm;
}

}  // namespace qmlab

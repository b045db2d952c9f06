#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "qmlab/grid.hpp"
#include "qmlab/symbols.hpp"

namespace qmlab::fx {

/// Random symbol with `terms` monomials, total x-degree <= dx and total
/// xi-degree <= dxi, coefficients uniform in [-1, 1].
inline Symbol random_symbol(int n, int dx, int dxi, int terms, std::mt19937_64& rng) {
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

inline PhasePoint random_point(int n, double scale, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-scale, scale);
  PhasePoint pt{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    pt.x(i) = d(rng);
    pt.xi(i) = d(rng);
  }
  return pt;
}

/// Direct (non-FFT) plane wave exp(i<k, x>) on the grid.
inline GridFunction plane_wave_direct(const TorusGrid& g, const std::vector<int>& k) {
  GridFunction u(g);
  std::vector<int> idx(static_cast<std::size_t>(g.dimension()));
  for (std::size_t f = 0; f < g.size(); ++f) {
    g.unflatten(f, idx);
    double phase = 0.0;
    for (int a = 0; a < g.dimension(); ++a) {
      phase += k[static_cast<std::size_t>(a)] * g.coordinate(idx[static_cast<std::size_t>(a)]);
    }
    u[f] = std::polar(1.0, phase);
  }
  return u;
}

inline double l2_distance(const GridFunction& a, const GridFunction& b) { return (a - b).l2_norm(); }

}  // namespace qmlab::fx

namespace qmlab::fx {

/// exp(-|x|^2 / (2 sigma^2)) exp(i <xi0, x> / h): negligible at the boundary
/// of [-pi, pi)^n for sigma <= 0.35 and spectrally confined to |k - xi0/h| <~ 30.
inline GridFunction gaussian_packet(const TorusGrid& g, const std::vector<double>& xi0, double h,
                                    double sigma = 0.35) {
  GridFunction u(g);
  std::vector<int> idx(static_cast<std::size_t>(g.dimension()));
  for (std::size_t f = 0; f < g.size(); ++f) {
    g.unflatten(f, idx);
    double r2 = 0.0, phase = 0.0;
    for (int a = 0; a < g.dimension(); ++a) {
      const double x = g.coordinate(idx[static_cast<std::size_t>(a)]);
      r2 += x * x;
      phase += xi0[static_cast<std::size_t>(a)] * x / h;
    }
    u[f] = std::polar(std::exp(-r2 / (2 * sigma * sigma)), phase);
  }
  return u;
}

/// Grid with headroom for a packet at frequency xi0 / h.
inline TorusGrid packet_grid(int n, const std::vector<double>& xi0, double h) {
  double kmax = 0.0;
  for (double v : xi0) kmax = std::max(kmax, std::abs(v) / h);
  return TorusGrid(n, grid_points_for(kmax + 32.0, 4.0));
}

}  // namespace qmlab::fx

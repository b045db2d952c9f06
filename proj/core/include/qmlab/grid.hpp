#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace qmlab {

using Complex = std::complex<double>;
using LatticePoint = std::vector<int>;

/// Uniform periodic grid on the fundamental domain [-pi, pi)^n with N points
/// per axis.  Values are stored row-major: the last axis varies fastest.
class TorusGrid {
 public:
  TorusGrid(int dimension, int points_per_axis);

  int dimension() const { return n_; }
  int points_per_axis() const { return N_; }
  double spacing() const { return 2.0 * std::numbers::pi / N_; }
  std::size_t size() const { return size_; }
  /// Riemann-sum cell volume (2 pi / N)^n.
  double cell_volume() const;
  double coordinate(int i) const { return -std::numbers::pi + i * spacing(); }

  /// Largest |k_i| admitted with the 2x headroom rule.
  int headroom_limit() const { return N_ / 4; }

  /// Integer frequency carried by FFT bin m in {0..N-1}.
  int frequency_of_bin(int m) const { return m < N_ / 2 ? m : m - N_; }
  int bin_of_frequency(int k) const { return k >= 0 ? k : k + N_; }

  /// Flat index of the FFT bin holding lattice point k; k must satisfy
  /// -N/2 <= k_i < N/2.
  std::size_t flat_index_of_frequency(std::span<const int> k) const;
  /// Multi-index (per-axis bin or grid index) of a flat index.
  void unflatten(std::size_t flat, std::span<int> out) const;

  bool contains_frequency(std::span<const int> k) const;

  friend bool operator==(const TorusGrid&, const TorusGrid&) = default;

 private:
  int n_;
  int N_;
  std::size_t size_;
};

/// Smallest power of two >= max(4, ceil(factor * lambda)).
int grid_points_for(double lambda, double factor);

class GridFunction {
 public:
  explicit GridFunction(const TorusGrid& grid);
  GridFunction(const TorusGrid& grid, std::vector<Complex> values);

  const TorusGrid& grid() const { return grid_; }
  std::span<Complex> values() { return values_; }
  std::span<const Complex> values() const { return values_; }
  Complex& operator[](std::size_t i) { return values_[i]; }
  const Complex& operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const { return values_.size(); }

  /// (sum |u|^2 cell)^(1/2), summed in storage order.
  double l2_norm() const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(Complex c);
  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(GridFunction a, Complex c) { return a *= c; }
  friend GridFunction operator*(Complex c, GridFunction a) { return a *= c; }

 private:
  TorusGrid grid_;
  std::vector<Complex> values_;
};

/// Coefficients of the semiclassical Fourier transform on the integer lattice,
/// stored in FFT bin order.  Lattice point k carries semiclassical frequency
/// xi = h k.  Normalized so that the l2 norm of the coefficients equals the
/// L2 norm of the grid function; the plane wave exp(i<k,x>) has coefficient
/// (2 pi)^(n/2) at k.
class FrequencyFunction {
 public:
  FrequencyFunction(const TorusGrid& grid, double h);
  FrequencyFunction(const TorusGrid& grid, double h, std::vector<Complex> coefficients);

  const TorusGrid& grid() const { return grid_; }
  double h() const { return h_; }
  std::span<Complex> coefficients() { return coeffs_; }
  std::span<const Complex> coefficients() const { return coeffs_; }

  Complex at(std::span<const int> k) const;
  Complex& at(std::span<const int> k);

  double l2_norm() const;

 private:
  TorusGrid grid_;
  double h_;
  std::vector<Complex> coeffs_;
};

}  // namespace qmlab

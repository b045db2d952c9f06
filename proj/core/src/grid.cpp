#include "qmlab/grid.hpp"

#include <bit>
#include <cmath>
#include <string>

#include "qmlab/error.hpp"

namespace qmlab {

TorusGrid::TorusGrid(int dimension, int points_per_axis)
    : n_(dimension), N_(points_per_axis), size_(1) {
  require(dimension >= 1, ErrorKind::invalid_argument, "grid dimension must be >= 1");
  require(points_per_axis >= 4 && std::has_single_bit(static_cast<unsigned>(points_per_axis)),
          ErrorKind::invalid_argument,
          "points per axis must be a power of two >= 4, got " + std::to_string(points_per_axis));
  for (int a = 0; a < n_; ++a) size_ *= static_cast<std::size_t>(N_);
}

double TorusGrid::cell_volume() const { return std::pow(spacing(), n_); }

std::size_t TorusGrid::flat_index_of_frequency(std::span<const int> k) const {
  require(static_cast<int>(k.size()) == n_, ErrorKind::invalid_argument,
          "lattice point has wrong dimension");
  std::size_t idx = 0;
  for (int a = 0; a < n_; ++a) {
    require(k[a] >= -N_ / 2 && k[a] < N_ / 2, ErrorKind::precondition,
            "lattice point outside the grid's frequency range");
    idx = idx * static_cast<std::size_t>(N_) + static_cast<std::size_t>(bin_of_frequency(k[a]));
  }
  return idx;
}

void TorusGrid::unflatten(std::size_t flat, std::span<int> out) const {
  for (int a = n_ - 1; a >= 0; --a) {
    out[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(N_));
    flat /= static_cast<std::size_t>(N_);
  }
}

bool TorusGrid::contains_frequency(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != n_) return false;
  for (int v : k) {
    if (v < -N_ / 2 || v >= N_ / 2) return false;
  }
  return true;
}

int grid_points_for(double lambda, double factor) {
  const double want = std::max(4.0, std::ceil(factor * lambda));
  int N = 4;
  while (N < want) N *= 2;
  return N;
}

GridFunction::GridFunction(const TorusGrid& grid) : grid_(grid), values_(grid.size()) {}

GridFunction::GridFunction(const TorusGrid& grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
  require(values_.size() == grid_.size(), ErrorKind::invalid_argument,
          "grid function: value count does not match grid");
}

double GridFunction::l2_norm() const {
  double s = 0.0;
  for (const auto& v : values_) s += std::norm(v);
  return std::sqrt(s * grid_.cell_volume());
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  require(o.grid_ == grid_, ErrorKind::invalid_argument, "grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  require(o.grid_ == grid_, ErrorKind::invalid_argument, "grid mismatch");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= o.values_[i];
  return *this;
}

GridFunction& GridFunction::operator*=(Complex c) {
  for (auto& v : values_) v *= c;
  return *this;
}

FrequencyFunction::FrequencyFunction(const TorusGrid& grid, double h)
    : grid_(grid), h_(h), coeffs_(grid.size()) {
  require(h > 0.0 && h <= 1.0, ErrorKind::invalid_argument, "h must lie in (0, 1]");
}

FrequencyFunction::FrequencyFunction(const TorusGrid& grid, double h,
                                     std::vector<Complex> coefficients)
    : grid_(grid), h_(h), coeffs_(std::move(coefficients)) {
  require(h > 0.0 && h <= 1.0, ErrorKind::invalid_argument, "h must lie in (0, 1]");
  require(coeffs_.size() == grid_.size(), ErrorKind::invalid_argument,
          "frequency function: coefficient count does not match grid");
}

Complex FrequencyFunction::at(std::span<const int> k) const {
  return coeffs_[grid_.flat_index_of_frequency(k)];
}

Complex& FrequencyFunction::at(std::span<const int> k) {
  return coeffs_[grid_.flat_index_of_frequency(k)];
}

double FrequencyFunction::l2_norm() const {
  double s = 0.0;
  for (const auto& v : coeffs_) s += std::norm(v);
  return std::sqrt(s);
}

}  // namespace qmlab

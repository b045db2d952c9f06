#include <cmath>
#include <string>

#include "qmlab/error.hpp"
#include "qmlab/quasimodes.hpp"

namespace qmlab {

namespace {

constexpr double kShellSlack = 1e-9;

template <class Accept>
void enumerate_box(int n, const std::vector<int>& lo, const std::vector<int>& hi,
                   Accept&& accept, std::vector<LatticePoint>& out) {
  LatticePoint k(lo.begin(), lo.end());
  while (true) {
    if (accept(k)) out.push_back(k);
    int a = n - 1;
    while (a >= 0) {
      const auto ua = static_cast<std::size_t>(a);
      if (++k[ua] <= hi[ua]) break;
      k[ua] = lo[ua];
      --a;
    }
    if (a < 0) break;
  }
}

long long norm2(const LatticePoint& k) {
  long long s = 0;
  for (int v : k) s += static_cast<long long>(v) * v;
  return s;
}

}  // namespace

std::vector<LatticePoint> annulus_points(int n, double inner, double outer) {
  require(n >= 1, ErrorKind::invalid_argument, "annulus: dimension must be >= 1");
  require(outer >= 0.0 && inner <= outer, ErrorKind::invalid_argument,
          "annulus: need inner <= outer and outer >= 0");
  const double lo2 = inner > 0.0 ? inner * inner : 0.0;
  const double hi2 = outer * outer;
  const int R = static_cast<int>(std::floor(outer + kShellSlack));
  std::vector<int> lo(static_cast<std::size_t>(n), -R);
  std::vector<int> hi(static_cast<std::size_t>(n), R);
  std::vector<LatticePoint> out;
  enumerate_box(
      n, lo, hi,
      [&](const LatticePoint& k) {
        const double s = static_cast<double>(norm2(k));
        return s >= lo2 - kShellSlack && s <= hi2 + kShellSlack;
      },
      out);
  return out;
}

std::vector<LatticePoint> knapp_points(int n, double lambda) {
  require(n >= 1, ErrorKind::invalid_argument, "knapp: dimension must be >= 1");
  std::vector<LatticePoint> out;
  if (lambda <= 0.0) return out;
  const int k1_lo = static_cast<int>(std::ceil(lambda - 1.0 - kShellSlack));
  const int k1_hi = static_cast<int>(std::floor(lambda + kShellSlack));
  if (k1_hi < k1_lo) return out;
  const int side = static_cast<int>(std::floor(std::sqrt(lambda) + kShellSlack));
  std::vector<int> lo(static_cast<std::size_t>(n), -side);
  std::vector<int> hi(static_cast<std::size_t>(n), side);
  lo[0] = k1_lo;
  hi[0] = k1_hi;
  const double lo2 = lambda > 1.0 ? (lambda - 1.0) * (lambda - 1.0) : 0.0;
  const double hi2 = (lambda + 1.0) * (lambda + 1.0);
  enumerate_box(
      n, lo, hi,
      [&](const LatticePoint& k) {
        const double s = static_cast<double>(norm2(k));
        return s >= lo2 - kShellSlack && s <= hi2 + kShellSlack;
      },
      out);
  return out;
}

}  // namespace qmlab

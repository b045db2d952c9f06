#include "qmlab/grid_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>

#include "qmlab/error.hpp"

namespace qmlab {

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  require(static_cast<bool>(is), ErrorKind::invalid_argument, "grid file truncated");
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

void put_f64(std::ostream& os, double d) { put_u64(os, std::bit_cast<std::uint64_t>(d)); }
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

}  // namespace

void write_grid(std::ostream& os, const GridFunction& u, double h) {
  put_u64(os, static_cast<std::uint64_t>(u.grid().dimension()));
  put_u64(os, static_cast<std::uint64_t>(u.grid().points_per_axis()));
  put_f64(os, h);
  for (const auto& v : u.values()) {
    put_f64(os, v.real());
    put_f64(os, v.imag());
  }
}

GridRecord read_grid(std::istream& is) {
  const auto n = static_cast<std::int64_t>(get_u64(is));
  const auto N = static_cast<std::int64_t>(get_u64(is));
  const double h = get_f64(is);
  require(n >= 1 && n <= 8 && N >= 4 && N <= (1 << 16), ErrorKind::invalid_argument,
          "grid file header out of range");
  TorusGrid grid(static_cast<int>(n), static_cast<int>(N));
  std::vector<Complex> values(grid.size());
  for (auto& v : values) {
    const double re = get_f64(is);
    const double im = get_f64(is);
    v = Complex(re, im);
  }
  return GridRecord{GridFunction(grid, std::move(values)), h};
}

}  // namespace qmlab

#pragma once

// Flat binary layout for grid data:
//   int64 n, int64 N, float64 h   (little-endian)
//   N^n interleaved (re, im) float64 pairs, row-major.

#include <iosfwd>

#include "qmlab/grid.hpp"

namespace qmlab {

struct GridRecord {
  GridFunction u;
  double h;
};

void write_grid(std::ostream& os, const GridFunction& u, double h);
GridRecord read_grid(std::istream& is);

}  // namespace qmlab

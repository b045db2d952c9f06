#pragma once

// Text format for symbols:
//   3.5 * x2^2 * xi1 - xi3 + |xi|^2 - 1
// Variables x1..xn and xi1..xin (1-based), '^' for non-negative integer
// powers, '*' between factors, whitespace ignored.  `|xi|^2` expands to
// xi1^2 + ... + xin^2.

#include <string>
#include <string_view>

#include "qmlab/symbols.hpp"

namespace qmlab {

/// Parses `text` as a symbol in dimension `n`.  Errors carry the 0-based
/// character position of the offending token.
Symbol parse_symbol(std::string_view text, int n);

/// Largest variable index (1-based) mentioned in `text`; 0 when none.
int max_variable_index(std::string_view text);

/// Shortest round-trip rendering in the same text format.
std::string format_symbol(const Symbol& sym);

std::string format_number(double v);

}  // namespace qmlab

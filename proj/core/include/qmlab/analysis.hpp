#pragma once

// L^p quadrature, growth exponents and lambda-sweeps.
//
//   delta(n, p, r) = (n-r)/2 - (n-r+1)/p       for p >= p*,
//                    (n-r)/4 - (n-r)/(2p)       for 2 <= p <= p*,
//   p* = 2(n-r+2)/(n-r),  and delta(n, p, n) = 0.
//
// p = infinity is passed as std::numeric_limits<double>::infinity().

#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "qmlab/grid.hpp"
#include "qmlab/quasimodes.hpp"
#include "qmlab/symbols.hpp"

namespace qmlab {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct ExponentQuery {
  int n = 2;
  double p = 2.0;
  int r = 1;
};

/// (sum |u|^p cell)^(1/p); p = inf gives max |u|.
double lp_norm(const GridFunction& u, double p);

double delta_exponent(const ExponentQuery& q);
inline double delta_exponent(int n, double p, int r) { return delta_exponent({n, p, r}); }
double sogge_delta(int n, double p);
double critical_p(int n, int r);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};

/// Ordinary least squares through (x, y) points.
LinearFit fit_exponent(std::span<const std::pair<double, double>> points);

struct SweepRow {
  double lambda = 0.0;
  double h = 0.0;
  double lp_norm = 0.0;
  double l2_norm = 0.0;
  double ratio = 0.0;
};

struct SweepResult {
  int n = 2;
  int r = 1;
  double p = kInfinity;
  std::vector<SweepRow> rows;
  LinearFit fit;
  double expected = 0.0;  // delta(n, p, r)
  /// Growth predicted for the family itself, when it is known to saturate.
  std::optional<double> family_prediction;
  double upper_tolerance = 0.15;
  double saturation_tolerance = 0.15;
  /// Held to |slope - family_prediction| <= saturation_tolerance.
  bool two_sided = false;
  bool upper_pass = false;
  bool saturation_pass = true;
  /// Smallest slack among the applied checks (negative when failing).
  double margin = 0.0;

  bool passes() const { return upper_pass && saturation_pass; }
};

struct GridPolicy {
  /// N = smallest power of two >= factor * lambda.
  double factor = 8.0;
  int max_points = 4096;
};

struct SweepOptions {
  GridPolicy grid;
  double upper_tolerance = 0.15;
  /// Defaults by family: 0.1 for Knapp caps, 0.15 otherwise.
  std::optional<double> saturation_tolerance;
  /// Worker threads over lambda values.
  int threads = 1;
};

struct SweepReport {
  QuasimodeSpec spec;
  std::vector<SweepResult> results;  // one per p
  /// First-order defects ||P_j u|| / ||u|| per lambda (frequency space),
  /// one vector per symbol; empty without symbols.
  std::vector<std::vector<double>> defects;

  bool passes() const;
};

/// Growth exponent the family saturates at p, if any: for effective
/// dimension d = n-r+1, zonal clusters give (d-1)/2 - d/p (p >= p*) and
/// Knapp caps give (d-1)/4 - (d-1)/(2p).  Two-sided checks apply at p = inf.
std::optional<double> family_exponent(const QuasimodeSpec& spec, double p);

SweepReport run_sweep(const QuasimodeSpec& tmpl, const std::vector<Symbol>& syms,
                      const std::vector<double>& p_list, const std::vector<double>& lambdas,
                      const SweepOptions& opts = {});

/// CSV rows for every p followed by a JSON fit summary on '#' lines.
void write_sweep_csv(std::ostream& os, const SweepReport& report);

}  // namespace qmlab

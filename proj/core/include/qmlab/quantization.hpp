#pragma once

// Left (Kohn-Nirenberg) quantization of polynomial symbols on the flat torus.
//
// For c(x) xi^alpha the operator is c(x) (hD)^alpha with D = -i d/dx: the
// derivative acts first as the Fourier multiplier (hk)^alpha, then the
// coefficient multiplies pointwise on [-pi, pi)^n.  Polynomial coefficients
// are not periodic, so x-dependent operators are only meaningful on functions
// concentrated away from the boundary of the fundamental domain.

#include <functional>
#include <vector>

#include "qmlab/grid.hpp"
#include "qmlab/symbols.hpp"

namespace qmlab {

struct ApplyOptions {
  /// Maximum relative L2 amplitude allowed at lattice points with some
  /// |k_i| > N/4 before any xi-derivative is taken.
  double alias_tol = 1e-8;
};

FrequencyFunction semiclassical_fourier(const GridFunction& u, double h);
GridFunction inverse_semiclassical_fourier(const FrequencyFunction& F);

/// Relative L2 amplitude of u outside the headroom box |k_i| <= N/4.
double out_of_band_fraction(const GridFunction& u);

GridFunction apply_operator(const Symbol& sym, const GridFunction& u, double h,
                            const ApplyOptions& opts = {});

/// Applies ops[0], then ops[1], ...  Out-of-band amplitude at the round-off
/// level of an earlier application is not reported as aliasing.
GridFunction apply_chain(const std::vector<const Symbol*>& ops, const GridFunction& u, double h,
                         const ApplyOptions& opts = {});

/// p(x, hD)^k u.
GridFunction apply_power(const Symbol& sym, int k, const GridFunction& u, double h,
                         const ApplyOptions& opts = {});

/// Multiplies the spectrum of u by m(h k).
GridFunction apply_multiplier(const std::function<double(std::span<const double>)>& m,
                              const GridFunction& u, double h);

struct CompositionTerm {
  int h_power = 0;
  Symbol real;
  Symbol imag;
};

struct CompositionExpansion {
  std::vector<CompositionTerm> terms;
  /// Order at which the exact series terminates: min(deg_xi p, deg_x q).
  int termination_degree = 0;
  /// True when h_degree_cap cut the series before termination.
  bool truncated = false;
};

/// Symbol of p(x,hD) q(x,hD):
///   sum_k (h/i)^k sum_{|alpha|=k} (1/alpha!) d_xi^alpha p * d_x^alpha q.
CompositionExpansion moyal_compose(const Symbol& p, const Symbol& q, int h_degree_cap);

/// sum_k h^k (real_k + i imag_k)(x, hD) u.
GridFunction apply_expansion(const CompositionExpansion& e, const GridFunction& u, double h,
                             const ApplyOptions& opts = {});

/// ||p q u - q p u|| / ||u||.
double commutator_defect(const Symbol& p, const Symbol& q, const GridFunction& u, double h,
                         const ApplyOptions& opts = {});

struct ParametrixOptions {
  /// Chebyshev-Lobatto nodes per x-variable used to resolve the x-dependence
  /// of the reciprocal symbol.
  int nodes_per_axis = 64;
  /// Largest accepted interpolation error of 1/p, relative to max |1/p|.
  double interpolation_tol = 1e-9;
  ApplyOptions apply;
};

/// Left-quantizes a sampled symbol a(x, xi).  `x_dependence[i]` marks the
/// x-variables a depends on; those are resolved by tensor Chebyshev
/// interpolation, the rest is exact.  Returns the estimated relative
/// interpolation error through `interp_error` when non-null.
GridFunction apply_sampled_symbol(
    const std::function<double(std::span<const double>, std::span<const double>)>& a,
    const std::vector<bool>& x_dependence, const GridFunction& u, double h,
    const ParametrixOptions& opts = {}, double* interp_error = nullptr);

/// || (1/p)(x,hD) p(x,hD) u - u || / ||u||.  Rejects (precondition) when the
/// sampled |p(x, hk)| over the fundamental domain and the occupied frequencies
/// of u is <= lower_bound.
double parametrix_residual(const Symbol& p, const GridFunction& u, double h, double lower_bound,
                           const ParametrixOptions& opts = {});

}  // namespace qmlab

#pragma once

// Exact and approximate joint quasimodes on the flat torus.
//
// Every constructor synthesizes u from unit-modulus Fourier coefficients on a
// LatticeWindow, with phases aligned at a centre x0, and ties h = 1/lambda.
// Keeping the window alongside u lets defect reports compute x-independent
// defects exactly in frequency space.

#include <optional>
#include <string>
#include <vector>

#include "qmlab/grid.hpp"
#include "qmlab/quantization.hpp"
#include "qmlab/symbols.hpp"

namespace qmlab {

struct LatticeWindow {
  std::vector<LatticePoint> points;
  std::string rule;

  std::size_t size() const { return points.size(); }
};

/// All k in Z^n with inner <= |k| <= outer (inner clipped at 0).
std::vector<LatticePoint> annulus_points(int n, double inner, double outer);

/// Knapp cap: k_1 in [lambda-1, lambda], |k_j| <= sqrt(lambda) for j >= 2,
/// |k| in [lambda-1, lambda+1].
std::vector<LatticePoint> knapp_points(int n, double lambda);

enum class QuasimodeKind { plane_wave, cluster, knapp, tensor_joint, localized };

const char* to_string(QuasimodeKind k);
QuasimodeKind quasimode_kind_from_string(const std::string& s);

struct LocalizeParams {
  /// Spatial plateau radius about x = 0; no spatial cutoff when empty.
  std::optional<double> x_width;
  /// Frequency plateau about xi_center of radius xi_width; none when empty.
  std::vector<double> xi_center;
  std::optional<double> xi_width;
};

struct QuasimodeSpec {
  QuasimodeKind kind = QuasimodeKind::cluster;
  int n = 2;
  double lambda = 1.0;
  double W = 1.0;
  int r = 1;
  /// Inner family for tensor_joint (cluster or knapp) and the family that
  /// `localized` starts from.
  QuasimodeKind inner = QuasimodeKind::cluster;
  std::vector<double> x0;
  LatticePoint k;  // plane_wave only
  LocalizeParams localize;
};

struct Quasimode {
  GridFunction u;
  double h;
  /// Occupied lattice points with unit-modulus coefficients; empty once a
  /// cutoff has been applied and the spectrum is no longer a window.
  std::optional<LatticeWindow> window;
};

/// Synthesizes sum_{k in window} exp(i<k, x - x0>) on `grid`.  Rejects
/// windows violating the 2x headroom rule |k_i| <= N/4.
GridFunction synthesize(const TorusGrid& grid, const LatticeWindow& window,
                        const std::vector<double>& x0 = {});

Quasimode make_plane_wave(const TorusGrid& grid, const LatticePoint& k);
Quasimode make_cluster(const TorusGrid& grid, double lambda, double W,
                       const std::vector<double>& x0 = {});
Quasimode make_knapp(const TorusGrid& grid, double lambda);
/// u depends only on (x_1, x_{r+1}, ..., x_n): an (n-r+1)-dimensional
/// cluster or Knapp function with zero frequency along axes 2..r.
Quasimode make_tensor_joint(const TorusGrid& grid, int r, double lambda, QuasimodeKind inner,
                            double W = 1.0);

Quasimode build_quasimode(const TorusGrid& grid, const QuasimodeSpec& spec);

/// exp(-|x|^2 / (2 sigma^2)) exp(i <xi0, x> / h), centered at x = 0.  Used
/// for operators with x-dependent symbols, which need spatial concentration.
GridFunction make_wave_packet(const TorusGrid& grid, const std::vector<double>& xi0, double h,
                              double sigma = 0.35);
/// Grid with N/4 >= |xi0|_inf / h + 32 (spectral headroom for the packet).
TorusGrid wave_packet_grid(int n, const std::vector<double>& xi0, double h);

/// Smooth plateau profile: 1 on [0, 1], 0 on [2, inf), C-infinity between,
/// built from the exp(-1/t) mollifier.
double plateau(double t);

/// chi(x, hD) u for chi = (spatial plateau)(x) * (frequency plateau)(xi): the
/// frequency cutoff acts first as a multiplier, then the spatial bump.
GridFunction localize(const GridFunction& u, const LocalizeParams& params, double h);

struct DefectEntry {
  MultiIndex k;
  /// ||P_1^{k_1} ... P_r^{k_r} u|| / ||u|| by operator application.
  std::optional<double> defect;
  /// Same quantity computed in frequency space (x-independent symbols only);
  /// over the lattice window when the quasimode carries one.
  std::optional<double> exact;
  /// max over the window of prod_j |p_j(h k)|^{k_j}.
  std::optional<double> window_sup;

  /// Preferred value: exact when available, else the operator value.
  double value() const;
  double normalized(double h) const;
};

struct DefectReport {
  int kmax = 1;
  double h = 1.0;
  std::vector<DefectEntry> entries;

  const DefectEntry& at(const MultiIndex& k) const;
};

struct DefectOptions {
  bool operator_route = true;
  ApplyOptions apply;
};

/// Entries for every multi-index (k_1..k_r) with sum <= kmax.  Without the
/// operator route every symbol must be x-independent.
DefectReport defect_report(const std::vector<Symbol>& syms, const GridFunction& u, double h,
                           int kmax, const DefectOptions& opts = {});
/// Adds window values when every symbol is x-independent and the quasimode
/// still carries its lattice window.
DefectReport defect_report(const std::vector<Symbol>& syms, const Quasimode& q, int kmax,
                           const DefectOptions& opts = {});

}  // namespace qmlab

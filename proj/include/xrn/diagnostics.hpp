// Slice functionals and horizon observables evaluated on evolution output.
#pragma once

#include "xrn/dynamics.hpp"
#include "xrn/fields.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace xrn {

enum class CurrentKind { T, P, N };

/// Fraction of the t* slice to integrate over.
struct SliceRegion {
  int first_node = 0;
  int last_node = -1;  ///< -1: up to r_max
  static SliceRegion whole() { return {}; }
  /// r <= radius
  static SliceRegion inside(const RadialGrid& grid, double radius) { return {0, grid.last_node_inside(radius)}; }
  /// r >= radius
  static SliceRegion outside(const RadialGrid& grid, double radius);
};

/// int density r^2 dr dOmega over the region (axisymmetric, so the phi
/// integral contributes 2 pi).
double slice_integral(const Field& density, const Discretization& disc, SliceRegion region = SliceRegion::whole());

/// Energy densities with every comparison constant set to one:
///   T: (T psi)^2 + D (Y psi)^2 + |slashed nabla psi|^2
///   P: (T psi)^2 + sqrt(D) (Y psi)^2 + |slashed nabla psi|^2
///   N: (T psi)^2 + (Y psi)^2 + |slashed nabla psi|^2
Field energy_density(const FieldState& s, const Discretization& disc, CurrentKind kind);
double energy_flux(const FieldState& s, const Discretization& disc, CurrentKind kind,
                   SliceRegion region = SliceRegion::whole());

/// int_{r >= R0} r^{p-2} (d_v (r psi))^2 dr dOmega with d_v (r psi) = r Pi at
/// fixed r. Throws std::invalid_argument for p outside [0, 2].
double rp_energy(const FieldState& s, const Discretization& disc, double p, double split_radius);

constexpr double kMorawetzEta = 0.1;

/// Smooth cutoff: 0 on |r - 2M| <= M/4, 1 on |r - 2M| >= M/2.
double photon_sphere_cutoff(double r, double mass);
Field morawetz_density(const FieldState& s, const Discretization& disc);
double morawetz_increment(const FieldState& s, const Discretization& disc, double dt);

/// (int psi^2 / r^2) / E_T over the whole slice; 0 when E_T = 0.
double hardy_ratio(const FieldState& s, const Discretization& disc);

struct HorizonTrace {
  double t_star = 0.0;
  double v = 0.0;       ///< advanced time on r = M: v = t* + M
  double psi0 = 0.0;    ///< spherical mean on r = M
  double y_psi0 = 0.0;
  double yy_psi0 = 0.0;
  double h0 = 0.0;      ///< y_psi0 + psi0 / M
};

/// Needs d_t* of the state (the evolution right-hand side) for Y^2.
HorizonTrace horizon_trace(const FieldState& s, const FieldState& s_dot, const Discretization& disc);

struct EnergyRecord {
  double t_star = 0.0;
  double e_t = 0.0, e_p = 0.0, e_n = 0.0;  ///< whole t* slice
  double e_t_near = 0.0;                   ///< r <= R0 part of the slice
  double e_rp1 = 0.0, e_rp2 = 0.0;
  double morawetz_increment = 0.0;
  double hardy_ratio = 0.0;
};

EnergyRecord energy_record(const FieldState& s, const Discretization& disc, double split_radius, double dt);

struct RateFit {
  double exponent = 0.0;
  double exponent_stderr = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double t_begin = 0.0, t_end = 0.0;
  int samples = 0;
};

/// Least squares of log(value) against log(1 + t) over [t_begin, t_end].
/// The window must span one decade in 1 + t; entries inside it must be > 0.
RateFit decay_fit(std::span<const double> t, std::span<const double> value, double t_begin, double t_end);

struct LinearFit {
  double slope = 0.0, intercept = 0.0, r_squared = 0.0;
  int samples = 0;
};
LinearFit linear_fit(std::span<const double> x, std::span<const double> y, double x_begin, double x_end);

/// Truncated initial-data norm: angular commutations k <= max_k realised
/// spectrally (mode l weighted by (l(l+1))^{k/2}) and T^l from finite
/// differences in t* of the stored early snapshots, evaluated on the first
/// one. Requires max(2L + 1, 2) snapshots at distinct times.
double initial_energy_e0(std::span<const FieldState> early, const Discretization& disc, double split_radius,
                         int max_k = 2, int max_l = 2);

struct InstabilityReport {
  bool hypotheses_met = false;   ///< psi0(0, M) > 0 and Y psi0(0, M) > 0
  bool degenerate = false;       ///< all traces zero
  double h0 = 0.0;
  double final_y_psi0 = 0.0;
  double final_psi0_over_m = 0.0;
  double non_decay_gap = 0.0;    ///< |Y psi0(v_end) - H0| / |H0|
  LinearFit yy_fit{};            ///< Y^2 psi0 against v over the fit window
  bool slope_opposes_h0 = false;
  std::string note;
};

/// Fit window defaults to the final half of the trace.
InstabilityReport instability_report(std::span<const HorizonTrace> traces, double mass,
                                     std::optional<double> fit_from_v = std::nullopt);

/// Finite-difference weights for the m-th derivative at x0 from the
/// sample points (Fornberg's algorithm). weights[m][k].
std::vector<std::vector<double>> fd_weights(double x0, std::span<const double> x, int max_order);

}  // namespace xrn

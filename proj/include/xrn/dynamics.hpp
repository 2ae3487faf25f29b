// Evolution core for
//     box_g psi = sqrt(D) A(psi) g^{ab} d_a psi d_b psi
// on t* = v - r slices of extremal Reissner-Nordstrom.
//
// In (t*, r, theta) the metric is
//     g = -D dt*^2 + 2(1-D) dt* dr + (2-D) dr^2 + r^2 dOmega^2,
// with inverse g^{t*t*} = D-2, g^{t*r} = 1-D, g^{rr} = D and sqrt(-g) =
// r^2 sin(theta). Expanding the covariant divergence gives
//     box psi = (D-2) psi_tt + 2(1-D) psi_tr + D psi_rr
//             + (2(1-D)/r - D') psi_t + (2D/r + D') psi_r + r^-2 Lap_S2 psi.
// The psi_tt coefficient is <= -1 on r >= M, so d_t* Pi is always
// solvable. Characteristic speeds dr/dt* are -1 and D/(2-D); the second
// vanishes on r = M, so the horizon is an outflow boundary and takes no
// boundary condition.
#pragma once

#include "xrn/fields.hpp"
#include "xrn/geometry.hpp"
#include "xrn/grid.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace xrn {

/// Coefficients of box_g in the (t*, r) chart at one radius.
template <typename Scalar>
struct BoxCoefficients {
  Scalar tt, tr, rr, t, r, ang;
};

template <typename Scalar>
BoxCoefficients<Scalar> box_coefficients(const Scalar& r, double mass) {
  const Scalar d = horizon_factor(r, mass);
  const Scalar dp = horizon_factor_deriv(r, mass);
  const Scalar one(1.0), two(2.0);
  return {d - two, two * (one - d), d, two * (one - d) / r - dp, two * d / r + dp, one / (r * r)};
}

/// Outgoing characteristic speed dr/dt* = D/(2-D).
template <typename Scalar>
Scalar outgoing_speed(const Scalar& r, double mass) {
  const Scalar d = horizon_factor(r, mass);
  return d / (Scalar(2.0) - d);
}

/// Bounded coupling A(psi).
struct Coupling {
  enum class Kind { constant, tanh_bounded, table };
  Kind kind = Kind::constant;
  double bound = 1.0;
  /// (psi, A) pairs with increasing psi; linear interpolation, clamped.
  std::vector<std::pair<double, double>> table;

  double operator()(double psi) const;
  bool vanishes() const { return kind != Kind::table && bound == 0.0; }
  bool operator==(const Coupling&) const = default;
  void validate() const;
};

std::string to_string(Coupling::Kind k);
Coupling::Kind parse_coupling_kind(const std::string& name);

/// Grid, angular basis and the per-node background coefficients.
class Discretization {
 public:
  Discretization(const SpacetimeParams& params, const GridSpec& spec);
  Discretization(const SpacetimeParams& params, RadialGrid grid, int n_theta);

  const SpacetimeParams& params() const { return params_; }
  double mass() const { return params_.mass(); }
  const RadialGrid& grid() const { return grid_; }
  const AngularBasis& basis() const { return basis_; }
  int n_r() const { return grid_.size(); }
  int n_theta() const { return basis_.size(); }

  const Eigen::ArrayXd& d() const { return d_; }
  const Eigen::ArrayXd& sqrt_d() const { return sqrt_d_; }
  const BoxCoefficients<Eigen::ArrayXd>& box() const { return box_; }
  const Eigen::ArrayXd& inv_tt() const { return inv_tt_; }

 private:
  void setup();

  SpacetimeParams params_;
  RadialGrid grid_;
  AngularBasis basis_;
  Eigen::ArrayXd d_, sqrt_d_, inv_tt_;
  BoxCoefficients<Eigen::ArrayXd> box_;
};

/// box psi = tt .* d_t*Pi + remainder; remainder carries every term that
/// does not involve the second time derivative.
struct WaveOperatorSplit {
  Eigen::ArrayXd tt;
  Field remainder;
};

WaveOperatorSplit wave_operator_split(const FieldState& s, const Discretization& disc);
/// Full discrete box psi given d_t* Pi.
Field wave_operator(const FieldState& s, const Field& pi_dot, const Discretization& disc);

/// F = sqrt(D) A(psi) (2 T psi Y psi + D (Y psi)^2 + |slashed nabla psi|^2).
Field null_form(const FieldState& s, const Discretization& disc, const Coupling& coupling);

/// Adds a forcing term S(t*, node) to the right-hand side: box psi = F + S.
using SourceFn = std::function<void(double t_star, Field& out)>;

struct RhsOptions {
  double dissipation = 0.1;
  Coupling coupling{};
  SourceFn source{};
  bool sommerfeld = true;  ///< outgoing condition on r psi at r_max
  /// Phi relaxes towards d_r psi at this rate (per M).
  double constraint_damping = 1.0;
};

/// Non-finite input or output.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Right-hand side of the first-order system with reusable workspace.
class Evolver {
 public:
  Evolver(const Discretization& disc, RhsOptions opts);

  void rhs(const FieldState& s, FieldState& dot);
  FieldState rhs(const FieldState& s);
  /// Classical RK4; throws NumericalFailure when the result is not finite.
  void step(FieldState& s, double dt);

  const Discretization& disc() const { return disc_; }
  const RhsOptions& options() const { return opts_; }
  /// Largest stable step for the given CFL factor.
  double max_dt(double cfl) const { return cfl * disc_.grid().min_spacing(); }

 private:
  const Discretization& disc_;
  RhsOptions opts_;
  Field dpi_, dphi_, dpsi_, lap_, dth_, src_;
  FieldState k_[4];
  FieldState tmp_;
};

FieldState rhs(const FieldState& s, const Discretization& disc, const RhsOptions& opts);
FieldState step(const FieldState& s, double dt, const Discretization& disc, const RhsOptions& opts);

/// C-infinity bump exp(1 - 1/(1 - s^2)) on |s| < 1 times a Legendre series.
struct Profile {
  double center = 3.0;
  double width = 1.0;
  std::vector<double> modes{};  ///< coefficient of P_l(cos theta), l = 0, 1, ...

  double radial(double r) const;
  double radial_deriv(double r) const;
  double angular(double cos_theta) const;
  bool empty() const;
  bool operator==(const Profile&) const = default;
};

/// (psi, d_t* psi) = (eps f, eps g) on t* = 0.
struct InitialData {
  Profile f{};
  Profile g{};

  /// Support must stay clear of r_max; it may include the horizon.
  void validate(const RadialGrid& grid, int max_degree) const;
  void validate(double mass, double r_max, int max_degree) const;
  bool operator==(const InitialData&) const = default;
  FieldState build(const Discretization& disc, double epsilon) const;
};

struct BreakdownThresholds {
  double t_psi = 0.0;
  double sqrt_d_y_psi = 0.0;
  double ang_grad = 0.0;
};

struct SlabNorms {
  double psi = 0.0;
  double t_psi = 0.0;
  double sqrt_d_y_psi = 0.0;
  double ang_grad = 0.0;
};

struct BreakdownReport {
  double t_star = 0.0;
  std::string norm;  ///< "T_psi", "sqrtD_Y_psi" or "ang_grad_psi"
  double value = 0.0;
  double threshold = 0.0;
};

SlabNorms sup_norms(const FieldState& s, const Discretization& disc);
/// factor times the initial norms; a zero initial norm borrows the largest
/// of the three so identically vanishing components still get a finite bound.
BreakdownThresholds default_thresholds(const SlabNorms& initial, double factor = 1e3);
std::optional<BreakdownReport> breakdown_check(const FieldState& s, const Discretization& disc,
                                               const BreakdownThresholds& thresholds);

}  // namespace xrn

// Closed-form background quantities of the extremal Reissner-Nordstrom
// exterior r >= M and the Couch-Torrence map.
//
// Every function is a pure template on the scalar type so the same code
// serves double evaluation, extended-precision audits and whole-array
// evaluation through the Eigen overloads at the bottom of this file.
#pragma once

#include <Eigen/Core>

#include <cmath>
#include <stdexcept>
#include <string>
#include <type_traits>

namespace xrn {

/// Background parameters. The charge is implied by extremality (|e| = M)
/// and is never stored.
class SpacetimeParams {
 public:
  explicit SpacetimeParams(double mass = 1.0) : mass_(mass) {
    if (!(mass > 0.0) || !std::isfinite(mass)) {
      throw std::invalid_argument("SpacetimeParams: mass must be positive and finite");
    }
  }
  double mass() const { return mass_; }
  bool operator==(const SpacetimeParams&) const = default;

 private:
  double mass_;
};

/// Split of a slice into the near region r <= R0 and the far region.
class FoliationSpec {
 public:
  FoliationSpec(double split_radius, double r_max, const SpacetimeParams& params)
      : split_radius_(split_radius), r_max_(r_max) {
    const double m = params.mass();
    if (!(split_radius > 2.0 * m)) {
      throw std::invalid_argument("photon-sphere constraint violated: split radius R0 must exceed 2M");
    }
    if (!(r_max > split_radius)) {
      throw std::invalid_argument("FoliationSpec: r_max must exceed the split radius R0");
    }
  }
  double split_radius() const { return split_radius_; }
  double r_max() const { return r_max_; }

 private:
  double split_radius_;
  double r_max_;
};

namespace detail {
inline void require_outside(bool ok, const char* what) {
  if (!ok) throw std::domain_error(std::string(what) + ": radius inside the region where it is defined");
}

template <typename T>
concept ScalarLike = !std::is_base_of_v<Eigen::ArrayBase<T>, T> && !std::is_base_of_v<Eigen::MatrixBase<T>, T>;
}  // namespace detail

/// D(r) = ((r - M)/r)^2.
template <detail::ScalarLike Scalar>
Scalar horizon_factor(const Scalar& r, double mass) {
  detail::require_outside(!(r < Scalar(mass)), "horizon_factor");
  const Scalar s = (r - Scalar(mass)) / r;
  return s * s;
}

/// sqrt(D) = (r - M)/r, evaluated without a square root so it is exactly
/// zero on the horizon node.
template <detail::ScalarLike Scalar>
Scalar sqrt_horizon_factor(const Scalar& r, double mass) {
  detail::require_outside(!(r < Scalar(mass)), "sqrt_horizon_factor");
  return (r - Scalar(mass)) / r;
}

/// dD/dr = 2M(r - M)/r^3.
template <detail::ScalarLike Scalar>
Scalar horizon_factor_deriv(const Scalar& r, double mass) {
  detail::require_outside(!(r < Scalar(mass)), "horizon_factor_deriv");
  return Scalar(2.0 * mass) * (r - Scalar(mass)) / (r * r * r);
}

/// Tortoise coordinate normalised so that r*(2M) = 0.
template <detail::ScalarLike Scalar>
Scalar tortoise(const Scalar& r, double mass) {
  detail::require_outside(r > Scalar(mass), "tortoise");
  using std::log;
  const Scalar x = r - Scalar(mass);
  return r + Scalar(2.0 * mass) * log(x / Scalar(mass)) - Scalar(mass * mass) / x - Scalar(mass);
}

/// Couch-Torrence radius r' = M + M^2/(r - M).
template <detail::ScalarLike Scalar>
Scalar ct_radius(const Scalar& r, double mass) {
  detail::require_outside(r > Scalar(mass), "ct_radius");
  return Scalar(mass) + Scalar(mass * mass) / (r - Scalar(mass));
}

/// Conformal factor Omega = (r - M)/M; Omega(r) * Omega(ct_radius(r)) = 1.
template <detail::ScalarLike Scalar>
Scalar ct_omega(const Scalar& r, double mass) {
  detail::require_outside(r > Scalar(mass), "ct_omega");
  return (r - Scalar(mass)) / Scalar(mass);
}

// Array overloads. They validate the whole array once and return evaluated
// arrays, so the results never dangle.

template <typename Derived>
Eigen::ArrayXd horizon_factor(const Eigen::ArrayBase<Derived>& r, double mass) {
  detail::require_outside(r.size() == 0 || r.minCoeff() >= mass, "horizon_factor");
  return ((r - mass) / r).square();
}

template <typename Derived>
Eigen::ArrayXd sqrt_horizon_factor(const Eigen::ArrayBase<Derived>& r, double mass) {
  detail::require_outside(r.size() == 0 || r.minCoeff() >= mass, "sqrt_horizon_factor");
  return (r - mass) / r;
}

template <typename Derived>
Eigen::ArrayXd horizon_factor_deriv(const Eigen::ArrayBase<Derived>& r, double mass) {
  detail::require_outside(r.size() == 0 || r.minCoeff() >= mass, "horizon_factor_deriv");
  return 2.0 * mass * (r - mass) / r.cube();
}

}  // namespace xrn

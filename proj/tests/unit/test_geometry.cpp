#include "xrn/geometry.hpp"

#include <doctest.h>

#include <cmath>

using namespace xrn;

TEST_CASE("horizon factor and its derivative") {
  CHECK(horizon_factor(1.0, 1.0) == 0.0);
  CHECK(sqrt_horizon_factor(1.0, 1.0) == 0.0);
  CHECK(horizon_factor(2.0, 1.0) == doctest::Approx(0.25));
  CHECK(horizon_factor_deriv(1.0, 1.0) == 0.0);
  CHECK(horizon_factor_deriv(3.0, 1.0) == doctest::Approx(4.0 / 27.0));
  const double h = 1e-5;
  for (double r : {1.3, 2.0, 7.5}) {
    const double fd = (horizon_factor(r + h, 1.0) - horizon_factor(r - h, 1.0)) / (2 * h);
    CHECK(horizon_factor_deriv(r, 1.0) == doctest::Approx(fd).epsilon(1e-8));
  }
  CHECK_THROWS_AS(horizon_factor(0.9, 1.0), std::domain_error);
}

TEST_CASE("tortoise difference matches quadrature of 1/D") {
  CHECK(tortoise(2.0, 1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(tortoise(5.0, 1.0) - tortoise(2.0, 1.0) == doctest::Approx(6.5225887222397816).epsilon(1e-13));
}

TEST_CASE("Couch-Torrence radius is an involution with reciprocal conformal factors") {
  for (double m : {1.0, 2.5}) {
    for (double r : {1.01, 1.5, 2.0, 3.0, 40.0}) {
      const double rr = r * m;
      const double rp = ct_radius(rr, m);
      CHECK(ct_radius(rp, m) == doctest::Approx(rr).epsilon(1e-13));
      CHECK(ct_omega(rr, m) * ct_omega(rp, m) == doctest::Approx(1.0).epsilon(1e-14));
    }
    CHECK(ct_radius(2.0 * m, m) == doctest::Approx(2.0 * m));
  }
}

TEST_CASE("array overloads agree with the scalar forms") {
  Eigen::ArrayXd r = Eigen::ArrayXd::LinSpaced(9, 1.0, 9.0);
  const Eigen::ArrayXd d = horizon_factor(r, 1.0);
  for (int i = 0; i < r.size(); ++i) CHECK(d(i) == horizon_factor(r(i), 1.0));
  CHECK_THROWS(horizon_factor(Eigen::ArrayXd::Constant(3, 0.5), 1.0));
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(SpacetimeParams(0.0), std::invalid_argument);
  CHECK_THROWS_AS(SpacetimeParams(-1.0), std::invalid_argument);
  const SpacetimeParams p(1.0);
  CHECK_THROWS_WITH_AS(FoliationSpec(1.5, 100.0, p), doctest::Contains("photon-sphere"), std::invalid_argument);
  CHECK_NOTHROW(FoliationSpec(6.0, 100.0, p));
  CHECK_THROWS(FoliationSpec(6.0, 5.0, p));
}

#include "xrn/couch_torrence.hpp"

#include <doctest.h>

#include <cmath>

using namespace xrn;

TEST_CASE("chart tags") {
  CHECK(opposite(ChartTag::near_horizon) == ChartTag::near_infinity);
  CHECK(opposite(opposite(ChartTag::near_infinity)) == ChartTag::near_infinity);
  CHECK(to_string(ChartTag::near_horizon) != to_string(ChartTag::near_infinity));
}

TEST_CASE("pullback twice is the identity") {
  const SpacetimeParams p;
  ChartProfile src;
  src.r = Eigen::ArrayXd::LinSpaced(401, 1.5, 3.0);
  src.values = (2.0 * src.r).sin() + 0.3 * src.r.square();
  src.tag = ChartTag::near_infinity;
  const ChartProfile once = ct_pullback(src, p);
  CHECK(once.tag == ChartTag::near_horizon);
  for (int i = 1; i < once.r.size(); ++i) REQUIRE(once.r(i) > once.r(i - 1));
  const ChartProfile twice = ct_pullback(once, p);
  CHECK(twice.tag == ChartTag::near_infinity);
  CHECK((twice.r - src.r).abs().maxCoeff() < 1e-13);
  CHECK((twice.values - src.values).abs().maxCoeff() < 1e-12);

  const ChartProfile resampled = ct_pullback(ct_pullback(src, src.r, p), src.r, p);
  CHECK((resampled.values - src.values).abs().maxCoeff() < 1e-10);
}

TEST_CASE("barycentric interpolation reproduces polynomials") {
  const Eigen::ArrayXd x = Eigen::ArrayXd::LinSpaced(30, 0.0, 3.0);
  const Eigen::ArrayXd y = x.pow(5) - 2.0 * x;
  CHECK(barycentric_interpolate(x, y, 1.234) == doctest::Approx(std::pow(1.234, 5) - 2.468).epsilon(1e-12));
}

TEST_CASE("weight identity in extended precision") {
  std::vector<double> rp;
  for (int k = 0; k < 200; ++k) rp.push_back(1.0 + 0.05 * (k + 1));
  const WeightIdentityReport rep = ct_weight_identity_check(SpacetimeParams{}, rp);
  CHECK(rep.samples == 200);
  CHECK(rep.max_relative_error <= 1e-13);
}

TEST_CASE("finite-difference residuals converge at fourth order") {
  const SpacetimeParams p;
  const CtTestField field;
  const double a = ct_conformal_residual(field, p, 0.02);
  const double b = ct_conformal_residual(field, p, 0.01);
  CHECK(std::log2(a / b) > 3.5);
  const double c = ct_nullform_transform_residual(field, p, 0.02);
  const double d = ct_nullform_transform_residual(field, p, 0.01);
  CHECK(std::log2(c / d) > 3.5);
}

TEST_CASE("the literal psi^2 coefficient leaves an O(1) residual") {
  const SpacetimeParams p;
  const CtTestField field;
  const CtSamples samples;
  // literal minus corrected term: (sqrt(D)/M)(1 + 1/r) psi_I^2
  double expected = 0.0;
  for (double t : samples.t) {
    for (double r : samples.r) {
      for (double th : samples.theta) {
        const double psi_i = field(t, ct_radius(r, 1.0), th) / ct_omega(r, 1.0);
        expected = std::max(expected, sqrt_horizon_factor(r, 1.0) * (1.0 + 1.0 / r) * psi_i * psi_i);
      }
    }
  }
  const double literal = ct_nullform_transform_residual(field, p, 0.005, samples, true);
  CHECK(expected > 0.1);
  CHECK(literal == doctest::Approx(expected).epsilon(1e-5));
}

TEST_CASE("horizon weight stays bounded") {
  const HorizonWeightReport rep = ct_horizon_weight_check(SpacetimeParams{});
  CHECK(std::isfinite(rep.max_abs_q));
  CHECK(rep.spread < 1e-5);
}

TEST_CASE("test field validation and the full audit") {
  CtTestField near;
  near.center = 1.5;
  near.width = 1.0;
  CHECK_THROWS_AS(near.validate(SpacetimeParams{}), std::invalid_argument);
  const CtAuditReport rep = ct_audit(SpacetimeParams{});
  CHECK(rep.pass());
  const auto j = to_json(rep);
  CHECK(j.dump().find("phi") != std::string::npos);
}

#include "xrn/diagnostics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace xrn;

namespace {

Discretization spherical(int n, double r_max) {
  GridSpec spec;
  spec.n_r = n;
  spec.r_max = r_max;
  spec.n_theta = 1;
  return Discretization(SpacetimeParams{}, spec);
}

}  // namespace

TEST_CASE("Hardy ratio matches quadrature") {
  const Discretization disc = spherical(2201, 12.0);
  FieldState s = FieldState::zeros(disc.n_r(), 1);
  const Eigen::ArrayXd r = disc.grid().r();
  s.psi.col(0) = (-(r - 3.0).square()).exp();
  s.phi.col(0) = -2.0 * (r - 3.0) * s.psi.col(0);
  const double four_pi = 4.0 * M_PI;
  CHECK(energy_flux(s, disc, CurrentKind::T) / four_pi == doctest::Approx(5.9532213369906826).epsilon(1e-9));
  CHECK(hardy_ratio(s, disc) == doctest::Approx(0.21052038423518238).epsilon(1e-9));

  FieldState scaled = s;
  scaled *= 13.0;
  CHECK(hardy_ratio(scaled, disc) == doctest::Approx(hardy_ratio(s, disc)).epsilon(1e-14));
  CHECK(hardy_ratio(FieldState::zeros(disc.n_r(), 1), disc) == 0.0);
}

TEST_CASE("r^p energies match quadrature") {
  const Discretization disc = spherical(1301, 14.0);
  FieldState s = FieldState::zeros(disc.n_r(), 1);
  s.pi.col(0) = (-(disc.grid().r() - 8.0).square()).exp();
  const double four_pi = 4.0 * M_PI;
  CHECK(rp_energy(s, disc, 0.0, 6.0) / four_pi == doctest::Approx(1.2532744433003646).epsilon(1e-9));
  CHECK(rp_energy(s, disc, 1.0, 6.0) / four_pi == doctest::Approx(10.026279412059893).epsilon(1e-9));
  CHECK_THROWS_AS(rp_energy(s, disc, 2.5, 6.0), std::invalid_argument);
}

TEST_CASE("energy hierarchy holds for arbitrary states") {
  GridSpec spec;
  spec.n_r = 120;
  spec.r_max = 30.0;
  spec.n_theta = 8;
  spec.stretching = Stretching::horizon_geometric;
  spec.min_spacing = 0.01;
  spec.growth = 0.1;
  const Discretization disc(SpacetimeParams{}, spec);
  std::mt19937 rng(7);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 5; ++trial) {
    FieldState s = FieldState::zeros(disc.n_r(), disc.n_theta());
    s.psi = s.psi.unaryExpr([&](double) { return normal(rng); });
    s.pi = s.pi.unaryExpr([&](double) { return normal(rng); });
    s.phi = s.phi.unaryExpr([&](double) { return normal(rng); });
    const double et = energy_flux(s, disc, CurrentKind::T);
    const double ep = energy_flux(s, disc, CurrentKind::P);
    const double en = energy_flux(s, disc, CurrentKind::N);
    CHECK(et <= ep);
    CHECK(ep <= en);
  }
}

TEST_CASE("photon sphere cutoff") {
  CHECK(photon_sphere_cutoff(2.0, 1.0) == 0.0);
  CHECK(photon_sphere_cutoff(2.2, 1.0) == 0.0);
  CHECK(photon_sphere_cutoff(2.6, 1.0) == 1.0);
  CHECK(photon_sphere_cutoff(1.2, 1.0) == 1.0);
  const double mid = photon_sphere_cutoff(2.375, 1.0);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
}

TEST_CASE("power-law and linear fits recover exact parameters") {
  std::vector<double> t, v, x, y;
  for (int k = 0; k <= 300; ++k) {
    t.push_back(k);
    v.push_back(3.0 * std::pow(1.0 + k, -1.5));
    x.push_back(k);
    y.push_back(2.0 - 0.25 * k);
  }
  const RateFit fit = decay_fit(t, v, 20.0, 300.0);
  CHECK(fit.exponent == doctest::Approx(-1.5).epsilon(1e-12));
  CHECK(fit.r_squared == doctest::Approx(1.0));
  CHECK_THROWS(decay_fit(t, v, 100.0, 300.0));  // less than a decade
  const LinearFit lf = linear_fit(x, y, 100.0, 300.0);
  CHECK(lf.slope == doctest::Approx(-0.25));
  CHECK(lf.intercept == doctest::Approx(2.0));
  CHECK(lf.r_squared == doctest::Approx(1.0));
}

TEST_CASE("Fornberg weights") {
  const std::vector<double> x{-2, -1, 0, 1, 2};
  const auto w = fd_weights(0.0, x, 2);
  CHECK(w[1][0] == doctest::Approx(1.0 / 12));
  CHECK(w[1][1] == doctest::Approx(-8.0 / 12));
  CHECK(w[1][2] == doctest::Approx(0.0));
  CHECK(w[2][2] == doctest::Approx(-30.0 / 12));
  CHECK(w[0][2] == doctest::Approx(1.0));
}

TEST_CASE("instability report") {
  std::vector<HorizonTrace> zero(10);
  for (int k = 0; k < 10; ++k) zero[k].t_star = k, zero[k].v = k + 1.0;
  CHECK(instability_report(zero, 1.0).degenerate);

  std::vector<HorizonTrace> tr;
  const double h0 = 0.02;
  for (int k = 0; k <= 100; ++k) {
    HorizonTrace h;
    h.t_star = k;
    h.v = k + 1.0;
    h.psi0 = 0.01 / (1.0 + k);
    h.y_psi0 = h0 - h.psi0;
    h.h0 = h.y_psi0 + h.psi0;
    h.yy_psi0 = -h0 * h.v;
    tr.push_back(h);
  }
  const InstabilityReport ir = instability_report(tr, 1.0);
  CHECK(ir.hypotheses_met);
  CHECK(ir.h0 == doctest::Approx(h0));
  CHECK(ir.yy_fit.slope == doctest::Approx(-h0));
  CHECK(ir.slope_opposes_h0);
  CHECK(ir.non_decay_gap < 0.01);

  tr[0].psi0 = -1.0;
  CHECK_FALSE(instability_report(tr, 1.0).hypotheses_met);
}

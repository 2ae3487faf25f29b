#include "xrn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace xrn {

SliceRegion SliceRegion::outside(const RadialGrid& grid, double radius) {
  int first = grid.last_node_inside(radius);
  if (grid.r()(first) < radius) ++first;
  return {std::min(first, grid.size() - 6), -1};
}

double slice_integral(const Field& density, const Discretization& disc, SliceRegion region) {
  const RadialGrid& grid = disc.grid();
  const int last = region.last_node < 0 ? grid.size() - 1 : region.last_node;
  const int first = region.first_node;
  if (last - first < 5) return 0.0;
  const Eigen::ArrayXd wr = grid.quadrature_weights(first, last) * grid.r().square();
  const Eigen::VectorXd radial = density.matrix().transpose() * wr.matrix();
  const Eigen::ArrayXd& wa = disc.basis().weights();
  return 2.0 * std::numbers::pi * (radial.array() * wa).sum();
}

Field energy_density(const FieldState& s, const Discretization& disc, CurrentKind kind) {
  const EfDerivatives e = ef_derivatives(s, disc.grid(), disc.basis());
  Field y2 = e.y_psi.square();
  switch (kind) {
    case CurrentKind::T: y2.colwise() *= disc.d(); break;
    case CurrentKind::P: y2.colwise() *= disc.sqrt_d(); break;
    case CurrentKind::N: break;
  }
  return e.t_psi.square() + y2 + e.ang_grad_sq;
}

double energy_flux(const FieldState& s, const Discretization& disc, CurrentKind kind, SliceRegion region) {
  return slice_integral(energy_density(s, disc, kind), disc, region);
}

double rp_energy(const FieldState& s, const Discretization& disc, double p, double split_radius) {
  if (!(p >= 0.0 && p <= 2.0)) throw std::invalid_argument("rp_energy: p must lie in [0, 2]");
  // r^{p-2} (r Pi)^2 dr = r^{p-2} Pi^2 (r^2 dr), and slice_integral supplies r^2 dr
  const Eigen::ArrayXd weight = disc.grid().r().pow(p - 2.0);
  const Field density = s.pi.square().colwise() * weight;
  return slice_integral(density, disc, SliceRegion::outside(disc.grid(), split_radius));
}

double photon_sphere_cutoff(double r, double mass) {
  const double delta = 0.25 * mass;
  const double dist = std::abs(r - 2.0 * mass);
  if (dist <= delta) return 0.0;
  if (dist >= 2.0 * delta) return 1.0;
  const double s = (dist - delta) / delta;
  const double a = std::exp(-1.0 / s);
  const double b = std::exp(-1.0 / (1.0 - s));
  return a / (a + b);
}

Field morawetz_density(const FieldState& s, const Discretization& disc) {
  const EfDerivatives e = ef_derivatives(s, disc.grid(), disc.basis());
  const Eigen::ArrayXd& r = disc.grid().r();
  const double m = disc.mass();
  Eigen::ArrayXd chi(r.size());
  for (Eigen::Index i = 0; i < r.size(); ++i) chi(i) = photon_sphere_cutoff(r(i), m);
  const Eigen::ArrayXd inv_r_eta = r.pow(-(1.0 + kMorawetzEta));
  const Eigen::ArrayXd d52 = disc.d() * disc.d() * disc.sqrt_d();
  Field dens = e.t_psi.square().colwise() * inv_r_eta + e.y_psi.square().colwise() * (d52 * inv_r_eta) +
               e.ang_grad_sq.colwise() * (disc.sqrt_d() / r);
  return dens.colwise() * chi;
}

double morawetz_increment(const FieldState& s, const Discretization& disc, double dt) {
  return dt * slice_integral(morawetz_density(s, disc), disc);
}

double hardy_ratio(const FieldState& s, const Discretization& disc) {
  const double e_t = energy_flux(s, disc, CurrentKind::T);
  if (e_t == 0.0) return 0.0;
  const Field num = s.psi.square().colwise() / disc.grid().r().square();
  return slice_integral(num, disc) / e_t;
}

HorizonTrace horizon_trace(const FieldState& s, const FieldState& s_dot, const Discretization& disc) {
  const RadialGrid& grid = disc.grid();
  if (grid.r()(0) != disc.mass()) throw std::invalid_argument("horizon_trace: grid has no node on r = M");
  const AngularBasis& basis = disc.basis();
  const double m = disc.mass();
  const Eigen::ArrayXd psi0 = spherical_mean(s.psi, basis);
  const Eigen::ArrayXd pi0 = spherical_mean(s.pi, basis);
  const Eigen::ArrayXd pi0_dot = spherical_mean(s_dot.pi, basis);
  const Eigen::ArrayXd y_profile = grid.derivative(psi0) - pi0;
  const double t_of_y = grid.derivative(pi0)(0) - pi0_dot(0);  // T (Y psi0) on r = M

  HorizonTrace h;
  h.t_star = s.t_star;
  h.v = s.t_star + m;
  h.psi0 = psi0(0);
  h.y_psi0 = y_profile(0);
  h.yy_psi0 = grid.derivative(y_profile)(0) - t_of_y;
  h.h0 = h.y_psi0 + h.psi0 / m;
  return h;
}

EnergyRecord energy_record(const FieldState& s, const Discretization& disc, double split_radius, double dt) {
  EnergyRecord e;
  e.t_star = s.t_star;
  e.e_t = energy_flux(s, disc, CurrentKind::T);
  e.e_p = energy_flux(s, disc, CurrentKind::P);
  e.e_n = energy_flux(s, disc, CurrentKind::N);
  e.e_t_near = energy_flux(s, disc, CurrentKind::T, SliceRegion::inside(disc.grid(), split_radius));
  e.e_rp1 = rp_energy(s, disc, 1.0, split_radius);
  e.e_rp2 = rp_energy(s, disc, 2.0, split_radius);
  e.morawetz_increment = morawetz_increment(s, disc, dt);
  e.hardy_ratio = e.e_t == 0.0 ? 0.0 : slice_integral(s.psi.square().colwise() / disc.grid().r().square(), disc) / e.e_t;
  return e;
}

RateFit decay_fit(std::span<const double> t, std::span<const double> value, double t_begin, double t_end) {
  if (t.size() != value.size()) throw std::invalid_argument("decay_fit: size mismatch");
  if (!((1.0 + t_end) >= 10.0 * (1.0 + t_begin) * (1.0 - 1e-12))) {
    throw std::invalid_argument("decay_fit: window must span at least one decade in 1 + t");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_begin || t[i] > t_end) continue;
    if (!(value[i] > 0.0)) throw std::invalid_argument("decay_fit: non-positive value inside the window");
    const double x = std::log1p(t[i]);
    const double y = std::log(value[i]);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
    ++n;
  }
  if (n < 3) throw std::invalid_argument("decay_fit: fewer than three samples in the window");
  const double cxx = sxx - sx * sx / n;
  const double cxy = sxy - sx * sy / n;
  const double cyy = syy - sy * sy / n;
  RateFit f;
  f.exponent = cxy / cxx;
  f.intercept = (sy - f.exponent * sx) / n;
  const double sse = std::max(0.0, cyy - f.exponent * cxy);
  f.r_squared = cyy > 0.0 ? 1.0 - sse / cyy : 1.0;
  f.exponent_stderr = n > 2 ? std::sqrt(sse / (n - 2) / cxx) : 0.0;
  f.t_begin = t_begin;
  f.t_end = t_end;
  f.samples = n;
  return f;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y, double x_begin, double x_end) {
  if (x.size() != y.size()) throw std::invalid_argument("linear_fit: size mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  int n = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] < x_begin || x[i] > x_end) continue;
    sx += x[i]; sy += y[i]; sxx += x[i] * x[i]; sxy += x[i] * y[i]; syy += y[i] * y[i];
    ++n;
  }
  LinearFit f;
  f.samples = n;
  if (n < 2) return f;
  const double cxx = sxx - sx * sx / n;
  const double cxy = sxy - sx * sy / n;
  const double cyy = syy - sy * sy / n;
  if (cxx <= 0.0) return f;
  f.slope = cxy / cxx;
  f.intercept = (sy - f.slope * sx) / n;
  f.r_squared = cyy > 0.0 ? (cxy * cxy) / (cxx * cyy) : 0.0;
  return f;
}

std::vector<std::vector<double>> fd_weights(double x0, std::span<const double> x, int max_order) {
  const int n = static_cast<int>(x.size());
  std::vector<std::vector<double>> c(max_order + 1, std::vector<double>(n, 0.0));
  double c1 = 1.0, c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, max_order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c[k][i] = c1 * (k * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
        c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
      }
      for (int k = mn; k >= 1; --k) c[k][j] = (c4 * c[k][j] - k * c[k - 1][j]) / c3;
      c[0][j] = c4 * c[0][j] / c3;
    }
    c1 = c2;
  }
  return c;
}

namespace {

Field combine(std::span<const Field> q, const std::vector<double>& w) {
  Field out = Field::Zero(q[0].rows(), q[0].cols());
  for (std::size_t j = 0; j < q.size(); ++j) {
    if (w[j] != 0.0) out += w[j] * q[j];
  }
  return out;
}

}  // namespace

double initial_energy_e0(std::span<const FieldState> early, const Discretization& disc, double split_radius,
                         int max_k, int max_l) {
  if (max_k < 0 || max_l < 0 || max_k > 2 || max_l > 2) {
    throw std::invalid_argument("initial_energy_e0: truncation requires 0 <= K, L <= 2");
  }
  const std::size_t needed = std::max(2 * max_l + 1, 2);
  if (early.size() < needed) throw std::invalid_argument("initial_energy_e0: insufficient snapshots");

  const AngularBasis& basis = disc.basis();
  const RadialGrid& grid = disc.grid();
  const Eigen::ArrayXd inv_r2 = grid.r().square().inverse();
  std::vector<double> times;
  std::vector<Field> psi, pi, y;
  for (const auto& s : early) {
    times.push_back(s.t_star);
    psi.push_back(s.psi);
    pi.push_back(s.pi);
    y.push_back(s.phi - s.pi);
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("initial_energy_e0: snapshot times must increase");
  }
  const auto w = fd_weights(times[0], times, max_l + 1);

  // angular commutation weights (l(l+1))^{k/2}, applied in mode space
  auto commute = [&](const Field& f, int k) -> Field {
    if (k == 0 || basis.size() == 1) return k == 0 ? f : Field::Zero(f.rows(), f.cols());
    ModeSet modes = project(f, basis);
    for (int l = 0; l <= modes.max_degree(); ++l) modes.coeffs.col(l) *= std::pow(l * (l + 1.0), 0.5 * k);
    return synthesize(modes, basis);
  };
  auto grad_sq = [&](const Field& f) -> Field { return theta_derivative(f, basis).square().colwise() * inv_r2; };
  auto d_r = [&](const Field& f) -> Field {
    Field out(f.rows(), f.cols());
    for (Eigen::Index j = 0; j < f.cols(); ++j) grid.derivative(f.col(j).data(), out.col(j).data());
    return out;
  };

  const SliceRegion near = SliceRegion::inside(grid, split_radius);
  const SliceRegion far = SliceRegion::outside(grid, split_radius);
  double total = 0.0;
  for (int l = 0; l <= max_l; ++l) {
    const Field tl_psi = combine(psi, w[l]);
    const Field tl1_psi = combine(pi, w[l]);  // T^{l+1} psi = T^l Pi
    const Field tl_y = combine(y, w[l]);
    const Field tl1_y = combine(y, w[l + 1]);
    const Field tl_yy = d_r(tl_y) - tl1_y;  // Y^2 = d_r Y - T Y in the t* chart
    for (int k = 0; k <= max_k; ++k) {
      const Field a = commute(tl1_psi, k), b = commute(tl_y, k), c = commute(tl_psi, k);
      const Field ay = commute(tl1_y, k), byy = commute(tl_yy, k);
      total += slice_integral(a.square() + b.square() + grad_sq(c), disc, near);
      total += slice_integral(ay.square() + byy.square() + grad_sq(b), disc, near);
      total += slice_integral(ay.square() + byy.square() + grad_sq(c), disc, far);
    }
  }
  return total;
}

InstabilityReport instability_report(std::span<const HorizonTrace> traces, double mass,
                                     std::optional<double> fit_from_v) {
  InstabilityReport rep;
  if (traces.empty()) {
    rep.degenerate = true;
    rep.note = "empty trace";
    return rep;
  }
  rep.degenerate = std::all_of(traces.begin(), traces.end(), [](const HorizonTrace& h) {
    return h.psi0 == 0.0 && h.y_psi0 == 0.0 && h.yy_psi0 == 0.0;
  });
  const HorizonTrace& first = traces.front();
  const HorizonTrace& last = traces.back();
  rep.h0 = first.h0;
  rep.hypotheses_met = first.psi0 > 0.0 && first.y_psi0 > 0.0;
  rep.final_y_psi0 = last.y_psi0;
  rep.final_psi0_over_m = last.psi0 / mass;
  rep.non_decay_gap = rep.h0 != 0.0 ? std::abs(last.y_psi0 - rep.h0) / std::abs(rep.h0) : 0.0;

  std::vector<double> v, yy;
  for (const auto& h : traces) {
    v.push_back(h.v);
    yy.push_back(h.yy_psi0);
  }
  const double from = fit_from_v.value_or(0.5 * (first.v + last.v));
  rep.yy_fit = linear_fit(v, yy, from, last.v);
  rep.slope_opposes_h0 = rep.yy_fit.slope * rep.h0 < 0.0;
  if (rep.degenerate) rep.note = "degenerate: all horizon traces vanish";
  else if (!rep.hypotheses_met) rep.note = "hypotheses unmet";
  return rep;
}

}  // namespace xrn

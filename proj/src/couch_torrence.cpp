#include "xrn/couch_torrence.hpp"

#include "xrn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <stdexcept>

namespace xrn {

ChartTag opposite(ChartTag tag) {
  return tag == ChartTag::near_horizon ? ChartTag::near_infinity : ChartTag::near_horizon;
}

std::string to_string(ChartTag tag) { return tag == ChartTag::near_horizon ? "near_horizon" : "near_infinity"; }

namespace {

void require_off_horizon(const Eigen::ArrayXd& r, double m) {
  if (r.size() > 0 && !(r.minCoeff() > m)) {
    throw std::domain_error("ct_pullback: source node on or inside r = M, where the map is singular");
  }
}

}  // namespace

ChartProfile ct_pullback(const ChartProfile& src, const SpacetimeParams& params) {
  const double m = params.mass();
  if (src.r.size() != src.values.size()) throw std::invalid_argument("ct_pullback: size mismatch");
  require_off_horizon(src.r, m);
  const Eigen::Index n = src.r.size();
  ChartProfile out;
  out.tag = opposite(src.tag);
  out.r.resize(n);
  out.values.resize(n);
  // Phi is decreasing, so node k of the image is the reflection of node n-1-k.
  for (Eigen::Index k = 0; k < n; ++k) {
    const double r_old = src.r(n - 1 - k);
    out.r(k) = ct_radius(r_old, m);
    out.values(k) = src.values(n - 1 - k) / ct_omega(out.r(k), m);
  }
  return out;
}

double barycentric_interpolate(const Eigen::ArrayXd& nodes, const Eigen::ArrayXd& values, double x, int degree) {
  const int n = static_cast<int>(nodes.size());
  if (n == 0) throw std::invalid_argument("barycentric_interpolate: no nodes");
  const int p = std::min(degree + 1, n);
  const auto it = std::lower_bound(nodes.data(), nodes.data() + n, x);
  int first = static_cast<int>(it - nodes.data()) - p / 2;
  first = std::clamp(first, 0, n - p);
  double num = 0.0, den = 0.0;
  for (int j = first; j < first + p; ++j) {
    const double dx = x - nodes(j);
    if (dx == 0.0) return values(j);
    double w = 1.0;
    for (int k = first; k < first + p; ++k) {
      if (k != j) w /= nodes(j) - nodes(k);
    }
    num += w / dx * values(j);
    den += w / dx;
  }
  return num / den;
}

ChartProfile ct_pullback(const ChartProfile& src, const Eigen::ArrayXd& target_r, const SpacetimeParams& params) {
  const double m = params.mass();
  if (src.r.size() != src.values.size()) throw std::invalid_argument("ct_pullback: size mismatch");
  require_off_horizon(src.r, m);
  require_off_horizon(target_r, m);
  const double lo = src.r.minCoeff(), hi = src.r.maxCoeff();
  const double slack = 1e-12 * std::max(1.0, hi);
  ChartProfile out;
  out.tag = opposite(src.tag);
  out.r = target_r;
  out.values.resize(target_r.size());
  for (Eigen::Index k = 0; k < target_r.size(); ++k) {
    const double x = ct_radius(target_r(k), m);
    if (x < lo - slack || x > hi + slack) {
      throw std::domain_error("ct_pullback: target maps outside the source nodes");
    }
    out.values(k) = barycentric_interpolate(src.r, src.values, x) / ct_omega(target_r(k), m);
  }
  return out;
}

// --- test field ----------------------------------------------------------------

double CtTestField::operator()(double t, double r_prime, double theta) const {
  const double s = (r_prime - center) / width;
  if (std::abs(s) >= 1.0) return 0.0;
  double ang = 0.0;
  const double x = std::cos(theta);
  for (std::size_t l = 0; l < modes.size(); ++l) ang += modes[l] * legendre(static_cast<int>(l), x);
  return std::exp(1.0 - 1.0 / (1.0 - s * s)) * std::cos(frequency * t) * ang;
}

bool CtTestField::zero() const {
  return std::all_of(modes.begin(), modes.end(), [](double a) { return a == 0.0; });
}

void CtTestField::validate(const SpacetimeParams& params) const {
  if (!(width > 0.0)) throw std::invalid_argument("CtTestField: width must be positive");
  if (!(center - width > params.mass())) {
    throw std::invalid_argument("CtTestField: support touches r' = M");
  }
  if (!std::isfinite(center + width)) throw std::invalid_argument("CtTestField: unbounded support");
}

// --- finite-difference residuals ------------------------------------------------

namespace {

using Fn3 = std::function<double(double, double, double)>;

struct Jet {
  double f, ft, ftt, fr, frr, fth, fthth;
};

// 4th-order central differences along t, r and theta.
Jet jet(const Fn3& f, double t, double r, double th, double h) {
  auto d1 = [h](double m2, double m1, double p1, double p2) { return (m2 - 8.0 * m1 + 8.0 * p1 - p2) / (12.0 * h); };
  auto d2 = [h](double m2, double m1, double c, double p1, double p2) {
    return (-m2 + 16.0 * m1 - 30.0 * c + 16.0 * p1 - p2) / (12.0 * h * h);
  };
  Jet j{};
  j.f = f(t, r, th);
  const double t_m2 = f(t - 2 * h, r, th), t_m1 = f(t - h, r, th), t_p1 = f(t + h, r, th), t_p2 = f(t + 2 * h, r, th);
  const double r_m2 = f(t, r - 2 * h, th), r_m1 = f(t, r - h, th), r_p1 = f(t, r + h, th), r_p2 = f(t, r + 2 * h, th);
  const double a_m2 = f(t, r, th - 2 * h), a_m1 = f(t, r, th - h), a_p1 = f(t, r, th + h), a_p2 = f(t, r, th + 2 * h);
  j.ft = d1(t_m2, t_m1, t_p1, t_p2);
  j.ftt = d2(t_m2, t_m1, j.f, t_p1, t_p2);
  j.fr = d1(r_m2, r_m1, r_p1, r_p2);
  j.frr = d2(r_m2, r_m1, j.f, r_p1, r_p2);
  j.fth = d1(a_m2, a_m1, a_p1, a_p2);
  j.fthth = d2(a_m2, a_m1, j.f, a_p1, a_p2);
  return j;
}

// box and g^{ab} d_a psi d_b psi for -D dt^2 + dr^2/D + r^2 dOmega^2.
double static_box(const Jet& j, double r, double th, double m) {
  const double d = horizon_factor(r, m), dp = horizon_factor_deriv(r, m);
  const double lap = j.fthth + j.fth / std::tan(th);
  return -j.ftt / d + d * j.frr + (2.0 * d / r + dp) * j.fr + lap / (r * r);
}

double static_q(const Jet& j, double r, double m) {
  const double d = horizon_factor(r, m);
  return -j.ft * j.ft / d + d * j.fr * j.fr + j.fth * j.fth / (r * r);
}

template <typename Residual>
double max_over_samples(const CtSamples& s, Residual&& res) {
  double worst = 0.0;
  for (double t : s.t)
    for (double r : s.r)
      for (double th : s.theta) worst = std::max(worst, std::abs(res(t, r, th)));
  return worst;
}

void check_inputs(const CtTestField& field, const SpacetimeParams& params, double h, const CtSamples& samples) {
  field.validate(params);
  if (!(h > 0.0)) throw std::invalid_argument("finite-difference step must be positive");
  for (double r : samples.r) {
    if (!(r - 2.0 * h > params.mass())) throw std::invalid_argument("sample stencil reaches r = M");
  }
}

}  // namespace

double ct_conformal_residual(const CtTestField& field, const SpacetimeParams& params, double h,
                             const CtSamples& samples) {
  check_inputs(field, params, h, samples);
  const double m = params.mass();
  const Fn3 psi_o = [&](double t, double rp, double th) { return field(t, rp, th); };
  const Fn3 psi_i = [&](double t, double r, double th) { return field(t, ct_radius(r, m), th) / ct_omega(r, m); };
  return max_over_samples(samples, [&](double t, double r, double th) {
    const double rp = ct_radius(r, m);
    const double box_i = static_box(jet(psi_i, t, r, th, h), r, th, m);
    const double box_o = static_box(jet(psi_o, t, rp, th, h), rp, th, m);
    return box_i - std::pow(ct_omega(r, m), -3) * box_o;
  });
}

double ct_nullform_transform_residual(const CtTestField& field, const SpacetimeParams& params, double h,
                                      const CtSamples& samples, bool literal_quadratic) {
  check_inputs(field, params, h, samples);
  const double m = params.mass();
  const Fn3 psi_o = [&](double t, double rp, double th) { return field(t, rp, th); };
  const Fn3 psi_i = [&](double t, double r, double th) { return field(t, ct_radius(r, m), th) / ct_omega(r, m); };
  return max_over_samples(samples, [&](double t, double r, double th) {
    const double rp = ct_radius(r, m);
    const double omega = ct_omega(r, m);
    const Jet ji = jet(psi_i, t, r, th, h);
    const Jet jo = jet(psi_o, t, rp, th, h);
    const double source = static_box(jo, rp, th, m) - static_q(jo, rp, m);
    const double d = horizon_factor(r, m), sd = sqrt_horizon_factor(r, m);
    const double t_psi = ji.ft;
    const double d_y_psi = d * ji.fr - ji.ft;  // D d_r at fixed v
    const double quad = literal_quadratic ? -sd / m * ji.f * ji.f : sd / (m * r) * ji.f * ji.f;
    const double rhs = omega * static_q(ji, r, m) + 2.0 / m * t_psi * ji.f + 2.0 / m * d_y_psi * ji.f + quad +
                       std::pow(omega, -3) * source;
    return static_box(ji, r, th, m) - rhs;
  });
}

WeightIdentityReport ct_weight_identity_check(const SpacetimeParams& params, const std::vector<double>& r_prime) {
  using quad = __float128;
  const quad m = params.mass();
  WeightIdentityReport rep;
  for (double x : r_prime) {
    if (!(x > params.mass())) throw std::domain_error("ct_weight_identity_check: r' must exceed M");
    const quad w = x;
    const quad omega = (w - m) / m;
    const quad lhs = 2 * omega / (w * w * w) - 2 / (m * w * w);
    const quad rhs = -2 / (w * w * w);
    quad rel = (lhs - rhs) / rhs;
    if (rel < 0) rel = -rel;
    const double e = static_cast<double>(rel);
    if (e >= rep.max_relative_error) {
      rep.max_relative_error = e;
      rep.worst_r_prime = x;
    }
    ++rep.samples;
  }
  return rep;
}

HorizonWeightReport ct_horizon_weight_check(const SpacetimeParams& params, int levels) {
  const double m = params.mass();
  const double v = 1.5, th = 0.7, c = 0.5;
  auto f = [](double u) { return std::exp(-(u - 2.0) * (u - 2.0)); };
  // psi_I(v, r, theta) = psi_O(u = v, r' = Phi(r), theta) / Omega(r)
  auto psi_i = [&](double vv, double r, double tt) {
    const double rp = ct_radius(r, m);
    return f(vv) * (1.0 + c * std::cos(tt)) / rp / ct_omega(r, m);
  };
  const double h = 1e-3 * m;
  HorizonWeightReport rep;
  for (int k = 1; k <= levels; ++k) {
    const double r = m * (1.0 + std::pow(10.0, -k));
    // forward 4th-order in r keeps the stencil off the horizon
    const double fr = (-25.0 * psi_i(v, r, th) + 48.0 * psi_i(v, r + h, th) - 36.0 * psi_i(v, r + 2 * h, th) +
                       16.0 * psi_i(v, r + 3 * h, th) - 3.0 * psi_i(v, r + 4 * h, th)) /
                      (12.0 * h);
    const double fv = (psi_i(v - 2 * h, r, th) - 8.0 * psi_i(v - h, r, th) + 8.0 * psi_i(v + h, r, th) -
                       psi_i(v + 2 * h, r, th)) /
                      (12.0 * h);
    const double fth = (psi_i(v, r, th - 2 * h) - 8.0 * psi_i(v, r, th - h) + 8.0 * psi_i(v, r, th + h) -
                        psi_i(v, r, th + 2 * h)) /
                       (12.0 * h);
    const double q = 2.0 * fv * fr + horizon_factor(r, m) * fr * fr + fth * fth / (r * r);
    rep.r.push_back(r);
    rep.q.push_back(q);
    rep.max_abs_q = std::max(rep.max_abs_q, std::abs(q));
  }
  if (rep.q.size() >= 2 && rep.max_abs_q > 0.0) {
    rep.spread = std::abs(rep.q.back() - rep.q[rep.q.size() - 2]) / rep.max_abs_q;
  }
  return rep;
}

double ConvergenceSeries::min_order() const {
  if (orders.empty()) return 0.0;
  return *std::min_element(orders.begin(), orders.end());
}

namespace {

ConvergenceSeries series(const std::vector<double>& steps, const std::function<double(double)>& residual) {
  ConvergenceSeries s;
  s.steps = steps;
  for (double h : steps) s.residuals.push_back(residual(h));
  for (std::size_t k = 1; k < steps.size(); ++k) {
    const double a = s.residuals[k - 1], b = s.residuals[k];
    const double ratio = steps[k - 1] / steps[k];
    s.orders.push_back(a > 0.0 && b > 0.0 ? std::log(a / b) / std::log(ratio) : 0.0);
  }
  return s;
}

}  // namespace

CtAuditReport ct_audit(const SpacetimeParams& params, const CtAuditOptions& options) {
  const double m = params.mass();
  CtAuditReport rep;

  // Involution on [1.5M, 3M], an interval that Phi maps onto itself.
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2.0 * std::numbers::pi);
  const int n = options.involution_nodes;
  const Eigen::ArrayXd nodes = Eigen::ArrayXd::LinSpaced(n, 1.5 * m, 3.0 * m);
  for (int p = 0; p < options.involution_profiles; ++p) {
    double a[4], ph[4];
    for (int k = 0; k < 4; ++k) {
      a[k] = amp(rng);
      ph[k] = phase(rng);
    }
    ChartProfile src{nodes, Eigen::ArrayXd(n), ChartTag::near_horizon};
    for (int i = 0; i < n; ++i) {
      double v = 0.0;
      for (int k = 0; k < 4; ++k) v += a[k] * std::cos((k + 1) * std::numbers::pi * (nodes(i) - 1.5 * m) / (1.5 * m) + ph[k]);
      src.values(i) = v;
    }
    const double scale = std::max(1.0, src.values.abs().maxCoeff());
    const ChartProfile twice = ct_pullback(ct_pullback(src, params), params);
    rep.involution_exact_error =
        std::max(rep.involution_exact_error, (twice.values - src.values).abs().maxCoeff() / scale);
    const ChartProfile resampled = ct_pullback(ct_pullback(src, nodes, params), nodes, params);
    rep.involution_resampled_error =
        std::max(rep.involution_resampled_error, (resampled.values - src.values).abs().maxCoeff() / scale);
  }
  rep.involution_pass = rep.involution_exact_error <= 1e-12 && rep.involution_resampled_error <= 1e-10;

  std::vector<double> rp(options.weight_samples);
  for (int k = 0; k < options.weight_samples; ++k) {
    const double e = -6.0 + 12.0 * (k + 1) / options.weight_samples;  // log10(r'/M - 1) in (-6, 6]
    rp[k] = m * (1.0 + std::pow(10.0, e));
  }
  rep.weight = ct_weight_identity_check(params, rp);
  rep.weight_pass = rep.weight.max_relative_error <= 1e-13;

  rep.conformal = series(options.steps, [&](double h) { return ct_conformal_residual(options.field, params, h); });
  rep.nullform =
      series(options.steps, [&](double h) { return ct_nullform_transform_residual(options.field, params, h); });
  rep.conformal_pass = rep.conformal.min_order() >= 3.5;
  rep.nullform_pass = rep.nullform.min_order() >= 3.5;
  rep.literal_term_residual = ct_nullform_transform_residual(options.field, params, options.steps.back(), {}, true);
  rep.horizon = ct_horizon_weight_check(params);
  return rep;
}

nlohmann::json to_json(const CtAuditReport& r) {
  using nlohmann::json;
  auto conv = [](const ConvergenceSeries& s) {
    return json{{"steps_per_M", s.steps}, {"residuals", s.residuals}, {"orders", s.orders}, {"min_order", s.min_order()}};
  };
  return json{
      {"pass", r.pass()},
      {"involution",
       {{"exact_max_error", r.involution_exact_error},
        {"resampled_max_error", r.involution_resampled_error},
        {"pass", r.involution_pass}}},
      {"weight_identity",
       {{"samples", r.weight.samples},
        {"max_relative_error", r.weight.max_relative_error},
        {"worst_r_prime_per_M", r.weight.worst_r_prime},
        {"pass", r.weight_pass}}},
      {"conformal_residual", conv(r.conformal)},
      {"nullform_residual", conv(r.nullform)},
      {"nullform_quadratic_term",
       {{"used", "+sqrt(D)/(M r) psi_I^2"},
        {"alternative", "-sqrt(D)/M psi_I^2"},
        {"alternative_residual", r.literal_term_residual}}},
      {"horizon_weight", {{"r_per_M", r.horizon.r}, {"q", r.horizon.q}, {"max_abs_q", r.horizon.max_abs_q}, {"spread", r.horizon.spread}}},
      {"notes",
       json::array({"the far-field expansion of the transformed equation is audited only through the weight identity; "
                    "its phi_O^4 label is dimensionally phi_O^2 and is reported here, not corrected"})},
  };
}

}  // namespace xrn

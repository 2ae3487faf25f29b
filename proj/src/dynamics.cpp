#include "xrn/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace xrn {

double Coupling::operator()(double psi) const {
  switch (kind) {
    case Kind::constant:
      return bound;
    case Kind::tanh_bounded: {
      const double c = std::cosh(psi);
      return bound / (c * c);
    }
    case Kind::table: {
      if (psi <= table.front().first) return table.front().second;
      if (psi >= table.back().first) return table.back().second;
      auto hi = std::upper_bound(table.begin(), table.end(), psi,
                                 [](double x, const auto& p) { return x < p.first; });
      auto lo = hi - 1;
      const double w = (psi - lo->first) / (hi->first - lo->first);
      return (1.0 - w) * lo->second + w * hi->second;
    }
  }
  return bound;
}

void Coupling::validate() const {
  if (kind == Kind::table) {
    if (table.size() < 2) throw std::invalid_argument("coupling table needs at least two rows");
    for (std::size_t i = 1; i < table.size(); ++i) {
      if (!(table[i].first > table[i - 1].first)) {
        throw std::invalid_argument("coupling table psi values must increase");
      }
    }
    for (const auto& [x, a] : table) {
      if (!std::isfinite(x) || !std::isfinite(a)) throw std::invalid_argument("coupling table must be finite");
    }
  } else if (!std::isfinite(bound) || bound < 0.0) {
    throw std::invalid_argument("coupling bound must be finite and >= 0");
  }
}

std::string to_string(Coupling::Kind k) {
  switch (k) {
    case Coupling::Kind::constant: return "constant";
    case Coupling::Kind::tanh_bounded: return "tanh_bounded";
    case Coupling::Kind::table: return "table";
  }
  return "constant";
}

Coupling::Kind parse_coupling_kind(const std::string& name) {
  if (name == "constant") return Coupling::Kind::constant;
  if (name == "tanh_bounded") return Coupling::Kind::tanh_bounded;
  if (name == "table") return Coupling::Kind::table;
  throw std::invalid_argument("unknown coupling '" + name + "'");
}

// --- Discretization --------------------------------------------------------

Discretization::Discretization(const SpacetimeParams& params, const GridSpec& spec)
    : params_(params), grid_(spec, params), basis_(spec.n_theta) {
  setup();
}

Discretization::Discretization(const SpacetimeParams& params, RadialGrid grid, int n_theta)
    : params_(params), grid_(std::move(grid)), basis_(n_theta) {
  setup();
}

void Discretization::setup() {
  const double m = mass();
  const Eigen::ArrayXd& r = grid_.r();
  d_ = horizon_factor(r, m);
  sqrt_d_ = sqrt_horizon_factor(r, m);
  const Eigen::ArrayXd dp = horizon_factor_deriv(r, m);
  box_.tt = d_ - 2.0;
  box_.tr = 2.0 * (1.0 - d_);
  box_.rr = d_;
  box_.t = 2.0 * (1.0 - d_) / r - dp;
  box_.r = 2.0 * d_ / r + dp;
  box_.ang = r.square().inverse();
  inv_tt_ = box_.tt.inverse();
}

// --- operators --------------------------------------------------------------

WaveOperatorSplit wave_operator_split(const FieldState& s, const Discretization& disc) {
  const RadialGrid& grid = disc.grid();
  const auto& c = disc.box();
  const int n = disc.n_r();
  WaveOperatorSplit out;
  out.tt = c.tt;
  out.remainder = angular_laplacian(s.psi, disc.basis()).colwise() * c.ang;
  Eigen::ArrayXd dpi(n), dphi(n);
  for (int j = 0; j < s.n_theta(); ++j) {
    grid.derivative(s.pi.col(j).data(), dpi.data());
    grid.derivative(s.phi.col(j).data(), dphi.data());
    out.remainder.col(j) += c.tr * dpi + c.rr * dphi + c.t * s.pi.col(j) + c.r * s.phi.col(j);
  }
  return out;
}

Field wave_operator(const FieldState& s, const Field& pi_dot, const Discretization& disc) {
  WaveOperatorSplit split = wave_operator_split(s, disc);
  return pi_dot.colwise() * split.tt + split.remainder;
}

Field null_form(const FieldState& s, const Discretization& disc, const Coupling& coupling) {
  const Field dth = theta_derivative(s.psi, disc.basis());
  const Eigen::ArrayXd& d = disc.d();
  const Eigen::ArrayXd inv_r2 = disc.grid().r().square().inverse();
  Field y = s.phi - s.pi;
  Field q = 2.0 * s.pi * y + y.square().colwise() * d + dth.square().colwise() * inv_r2;
  Field a = s.psi.unaryExpr([&](double p) { return coupling(p); });
  return (a * q).colwise() * disc.sqrt_d();
}

// --- Evolver ----------------------------------------------------------------

Evolver::Evolver(const Discretization& disc, RhsOptions opts) : disc_(disc), opts_(std::move(opts)) {
  if (!(opts_.dissipation >= 0.0 && opts_.dissipation <= 0.5)) {
    throw std::invalid_argument("dissipation must lie in [0, 0.5]");
  }
  if (!(opts_.constraint_damping >= 0.0)) throw std::invalid_argument("constraint_damping must be >= 0");
  opts_.coupling.validate();
  const int n = disc.n_r(), m = disc.n_theta();
  dpi_.resize(n, m);
  dphi_.resize(n, m);
  dpsi_.resize(n, m);
  lap_.setZero(n, m);
  dth_.setZero(n, m);
  src_.setZero(n, m);
  for (auto& k : k_) k = FieldState::zeros(n, m);
  tmp_ = FieldState::zeros(n, m);
}

void Evolver::rhs(const FieldState& s, FieldState& dot) {
  const RadialGrid& grid = disc_.grid();
  const auto& c = disc_.box();
  const int n = disc_.n_r(), m = disc_.n_theta();
  if (s.n_r() != n || s.n_theta() != m) throw std::invalid_argument("rhs: state shape does not match grid");
  if (dot.n_r() != n || dot.n_theta() != m) dot = FieldState::zeros(n, m);
  dot.t_star = s.t_star;

  const bool angular = m > 1;
  const double damp = opts_.constraint_damping / disc_.mass();
  const bool nonlinear = !opts_.coupling.vanishes();
  if (angular) lap_.matrix().noalias() = s.psi.matrix() * disc_.basis().laplacian().transpose();
  if (angular && nonlinear) dth_.matrix().noalias() = s.psi.matrix() * disc_.basis().d_theta().transpose();
  if (opts_.source) {
    src_.setZero();
    opts_.source(s.t_star, src_);
  }

  const double* d = disc_.d().data();
  const double* sd = disc_.sqrt_d().data();
  const double* inv_tt = disc_.inv_tt().data();
  const double* ctr = c.tr.data();
  const double* crr = c.rr.data();
  const double* ct = c.t.data();
  const double* cr = c.r.data();
  const double* cang = c.ang.data();

  for (int j = 0; j < m; ++j) {
    const double* psi = &s.psi(0, j);
    const double* pi = &s.pi(0, j);
    const double* phi = &s.phi(0, j);
    double* dpi = &dpi_(0, j);
    double* dphi = &dphi_(0, j);
    grid.derivative(pi, dpi);
    grid.derivative(phi, dphi);
    double* dpsi = &dpsi_(0, j);
    if (damp != 0.0) grid.derivative(psi, dpsi);
    const double* lap = angular ? &lap_(0, j) : nullptr;
    const double* dth = angular && nonlinear ? &dth_(0, j) : nullptr;
    const double* src = opts_.source ? &src_(0, j) : nullptr;

    double* psi_t = &dot.psi(0, j);
    double* pi_t = &dot.pi(0, j);
    double* phi_t = &dot.phi(0, j);
    for (int i = 0; i < n; ++i) {
      double rest = ctr[i] * dpi[i] + crr[i] * dphi[i] + ct[i] * pi[i] + cr[i] * phi[i];
      if (lap) rest += cang[i] * lap[i];
      double forcing = 0.0;
      if (nonlinear) {
        const double y = phi[i] - pi[i];
        double q = 2.0 * pi[i] * y + d[i] * y * y;
        if (dth) q += cang[i] * dth[i] * dth[i];
        forcing = sd[i] * opts_.coupling(psi[i]) * q;
      }
      if (src) forcing += src[i];
      psi_t[i] = pi[i];
      pi_t[i] = (forcing - rest) * inv_tt[i];
      phi_t[i] = dpi[i];
      if (damp != 0.0) phi_t[i] += damp * (dpsi[i] - phi[i]);
    }
    if (opts_.sommerfeld) {
      // time derivative of (2-D) r Pi + D (psi + r Phi) = 0 at r_max
      const int last = n - 1;
      const double r = grid.r()(last);
      const double speed = d[last] / (2.0 - d[last]);
      pi_t[last] = -speed * (pi[last] / r + dpi[last]);
    }
    grid.add_dissipation(pi, opts_.dissipation, pi_t);
    grid.add_dissipation(phi, opts_.dissipation, phi_t);
  }
}

FieldState Evolver::rhs(const FieldState& s) {
  FieldState dot = FieldState::zeros(s.n_r(), s.n_theta(), s.t_star);
  rhs(s, dot);
  return dot;
}

void Evolver::step(FieldState& s, double dt) {
  static constexpr double a[3] = {0.5, 0.5, 1.0};
  rhs(s, k_[0]);
  for (int stage = 1; stage < 4; ++stage) {
    const double h = a[stage - 1] * dt;
    const FieldState& k = k_[stage - 1];
    tmp_.t_star = s.t_star + h;
    tmp_.psi = s.psi + h * k.psi;
    tmp_.pi = s.pi + h * k.pi;
    tmp_.phi = s.phi + h * k.phi;
    rhs(tmp_, k_[stage]);
  }
  const double w = dt / 6.0;
  s.psi += w * (k_[0].psi + 2.0 * k_[1].psi + 2.0 * k_[2].psi + k_[3].psi);
  s.pi += w * (k_[0].pi + 2.0 * k_[1].pi + 2.0 * k_[2].pi + k_[3].pi);
  s.phi += w * (k_[0].phi + 2.0 * k_[1].phi + 2.0 * k_[2].phi + k_[3].phi);
  s.t_star += dt;
  if (!s.all_finite()) {
    std::ostringstream msg;
    msg << "non-finite field values after step to t* = " << s.t_star;
    throw NumericalFailure(msg.str());
  }
}

FieldState rhs(const FieldState& s, const Discretization& disc, const RhsOptions& opts) {
  if (!s.all_finite()) throw NumericalFailure("rhs: non-finite values in state");
  Evolver ev(disc, opts);
  return ev.rhs(s);
}

FieldState step(const FieldState& s, double dt, const Discretization& disc, const RhsOptions& opts) {
  Evolver ev(disc, opts);
  FieldState out = s;
  ev.step(out, dt);
  return out;
}

// --- initial data -------------------------------------------------------------

double Profile::radial(double r) const {
  const double s = (r - center) / width;
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

double Profile::radial_deriv(double r) const {
  const double s = (r - center) / width;
  if (std::abs(s) >= 1.0) return 0.0;
  const double q = 1.0 - s * s;
  return std::exp(1.0 - 1.0 / q) * (-2.0 * s / (q * q)) / width;
}

double Profile::angular(double cos_theta) const {
  double sum = 0.0;
  for (std::size_t l = 0; l < modes.size(); ++l) sum += modes[l] * legendre(static_cast<int>(l), cos_theta);
  return sum;
}

bool Profile::empty() const {
  return std::all_of(modes.begin(), modes.end(), [](double c) { return c == 0.0; });
}

void InitialData::validate(const RadialGrid& grid, int max_degree) const {
  validate(grid.mass(), grid.r()(grid.size() - 1), max_degree);
}

void InitialData::validate(double mass, double r_max, int max_degree) const {
  for (const Profile* p : {&f, &g}) {
    if (p->empty()) continue;
    if (!(p->width > 0.0)) throw std::invalid_argument("initial data: bump width must be positive");
    if (!(p->center + p->width < r_max)) {
      throw std::invalid_argument("initial data: support must not touch the outer boundary r_max");
    }
    if (!(p->center + p->width > mass)) {
      throw std::invalid_argument("initial data: support lies entirely inside the horizon");
    }
    if (static_cast<int>(p->modes.size()) - 1 > max_degree) {
      throw std::invalid_argument("initial data: mode content exceeds the angular resolution");
    }
  }
}

FieldState InitialData::build(const Discretization& disc, double epsilon) const {
  validate(disc.grid(), disc.basis().max_degree());
  const int n = disc.n_r(), m = disc.n_theta();
  FieldState s = FieldState::zeros(n, m, 0.0);
  const Eigen::ArrayXd& r = disc.grid().r();
  const Eigen::ArrayXd& x = disc.basis().cos_theta();
  for (int j = 0; j < m; ++j) {
    const double af = f.angular(x(j));
    const double ag = g.angular(x(j));
    for (int i = 0; i < n; ++i) {
      s.psi(i, j) = epsilon * af * f.radial(r(i));
      s.phi(i, j) = epsilon * af * f.radial_deriv(r(i));
      s.pi(i, j) = epsilon * ag * g.radial(r(i));
    }
  }
  return s;
}

// --- breakdown monitor -------------------------------------------------------

SlabNorms sup_norms(const FieldState& s, const Discretization& disc) {
  SlabNorms n;
  n.psi = s.psi.abs().maxCoeff();
  n.t_psi = s.pi.abs().maxCoeff();
  n.sqrt_d_y_psi = ((s.phi - s.pi).colwise() * disc.sqrt_d()).abs().maxCoeff();
  const Field dth = theta_derivative(s.psi, disc.basis());
  n.ang_grad = (dth.colwise() / disc.grid().r()).abs().maxCoeff();
  return n;
}

BreakdownThresholds default_thresholds(const SlabNorms& initial, double factor) {
  const double largest = std::max({initial.t_psi, initial.sqrt_d_y_psi, initial.ang_grad});
  auto pick = [&](double v) { return factor * (v > 0.0 ? v : largest); };
  return {pick(initial.t_psi), pick(initial.sqrt_d_y_psi), pick(initial.ang_grad)};
}

std::optional<BreakdownReport> breakdown_check(const FieldState& s, const Discretization& disc,
                                               const BreakdownThresholds& thresholds) {
  const SlabNorms n = sup_norms(s, disc);
  if (n.t_psi > thresholds.t_psi) return BreakdownReport{s.t_star, "T_psi", n.t_psi, thresholds.t_psi};
  if (n.sqrt_d_y_psi > thresholds.sqrt_d_y_psi) {
    return BreakdownReport{s.t_star, "sqrtD_Y_psi", n.sqrt_d_y_psi, thresholds.sqrt_d_y_psi};
  }
  if (n.ang_grad > thresholds.ang_grad) {
    return BreakdownReport{s.t_star, "ang_grad_psi", n.ang_grad, thresholds.ang_grad};
  }
  return std::nullopt;
}

}  // namespace xrn

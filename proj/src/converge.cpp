#include "xrn/converge.hpp"

#include "xrn/evolve.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace xrn {

void parallel_for(int count, int workers, const std::function<void(int)>& task) {
  workers = std::clamp(workers, 1, std::max(count, 1));
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex mu;
  auto worker = [&] {
    for (int i = next++; i < count; i = next++) {
      try {
        task(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

// --- manufactured solution ----------------------------------------------------

namespace {

struct MmsField {
  double a, m;
  static constexpr double c = 0.5;

  // radial factor and derivatives, angular factor and Laplacian eigenvalue
  double g(double r) const { return std::exp(-(r - 3.0 * m) * (r - 3.0 * m) / (m * m)); }
  double g1(double r) const { return -2.0 * (r - 3.0 * m) / (m * m) * g(r); }
  double g2(double r) const {
    const double x = (r - 3.0 * m) / m;
    return (4.0 * x * x - 2.0) / (m * m) * g(r);
  }
  double ang(double x) const { return 1.0 + c * legendre(2, x); }
  double ang_lap(double x) const { return -6.0 * c * legendre(2, x); }
  double ang_dth(double theta) const { return -c * legendre_deriv(2, std::cos(theta)) * std::sin(theta); }

  double psi(double t, double r, double x) const { return a * std::sin(t / m) * g(r) * ang(x); }
  double psi_t(double t, double r, double x) const { return a * std::cos(t / m) / m * g(r) * ang(x); }
  double psi_r(double t, double r, double x) const { return a * std::sin(t / m) * g1(r) * ang(x); }
};

}  // namespace

double mms_error(const SpacetimeParams& params, const MmsOptions& o, int refinement) {
  const double m = params.mass();
  GridSpec spec;
  spec.n_r = o.n_r;
  spec.r_max = o.r_max * m;
  spec.n_theta = o.n_theta;
  spec.stretching = Stretching::uniform;
  spec.refinement = refinement;
  const Discretization disc(params, spec);
  const MmsField u{o.amplitude, m};
  const Eigen::ArrayXd& r = disc.grid().r();
  const Eigen::ArrayXd& x = disc.basis().cos_theta();
  const Eigen::ArrayXd& theta = disc.basis().theta();
  const int n = disc.n_r(), nt = disc.n_theta();

  RhsOptions opts;
  opts.dissipation = o.dissipation;
  opts.coupling.bound = o.nonlinear ? 1.0 : 0.0;
  // source = sin(t/M) s_sin + cos(t/M) s_cos - null form
  Field s_sin(n, nt), s_cos(n, nt), q_ss(n, nt), q_sc(n, nt), q_cc(n, nt);
  for (int j = 0; j < nt; ++j) {
    const double xa = nt == 1 ? 1.0 : x(j);
    const double angv = nt == 1 ? 1.0 : u.ang(xa);
    const double lap = nt == 1 ? 0.0 : u.ang_lap(xa);
    const double dth = nt == 1 ? 0.0 : u.ang_dth(theta(j));
    for (int i = 0; i < n; ++i) {
      const auto c = box_coefficients(r(i), m);
      const double g = u.g(r(i)), g1 = u.g1(r(i)), g2 = u.g2(r(i));
      s_sin(i, j) = o.amplitude * (-c.tt * g * angv / (m * m) + c.rr * g2 * angv + c.r * g1 * angv + c.ang * g * lap);
      s_cos(i, j) = o.amplitude * (c.tr * g1 * angv / m + c.t * g * angv / m);
      const double sd = sqrt_horizon_factor(r(i), m), d = horizon_factor(r(i), m);
      const double gg = g * angv, gg1 = g1 * angv, a2 = o.amplitude * o.amplitude;
      // T psi = a cos G/M, Y psi = a (sin G' - cos G/M); split F by sin^2, sin cos, cos^2
      q_ss(i, j) = sd * a2 * (d * gg1 * gg1 + (g * dth) * (g * dth) / (r(i) * r(i)));
      q_sc(i, j) = sd * a2 * (2.0 * gg / m * gg1 - 2.0 * d * gg1 * gg / m);
      q_cc(i, j) = sd * a2 * (-2.0 * gg * gg / (m * m) + d * gg * gg / (m * m));
    }
  }
  opts.source = [&](double t, Field& out) {
    const double sn = std::sin(t / m), cs = std::cos(t / m);
    out = sn * s_sin + cs * s_cos;
    if (o.nonlinear) out -= sn * sn * q_ss + sn * cs * q_sc + cs * cs * q_cc;
  };
  Evolver ev(disc, opts);

  FieldState s = FieldState::zeros(n, nt, 0.0);
  for (int j = 0; j < nt; ++j) {
    const double xa = nt == 1 ? 1.0 : x(j);
    for (int i = 0; i < n; ++i) {
      s.psi(i, j) = u.psi(0.0, r(i), xa);
      s.pi(i, j) = u.psi_t(0.0, r(i), xa);
      s.phi(i, j) = u.psi_r(0.0, r(i), xa);
    }
  }
  const double t_end = o.t_end * m;
  const long steps = static_cast<long>(std::ceil(t_end / ev.max_dt(o.cfl) - 1e-9));
  const double dt = t_end / steps;
  for (long k = 0; k < steps; ++k) ev.step(s, dt);
  double err = 0.0;
  for (int j = 0; j < nt; ++j) {
    const double xa = nt == 1 ? 1.0 : x(j);
    for (int i = 0; i < n; ++i) err = std::max(err, std::abs(s.psi(i, j) - u.psi(t_end, r(i), xa)));
  }
  return err;
}

double OrderEstimate::min_order() const {
  if (orders.empty()) return 0.0;
  return *std::min_element(orders.begin(), orders.end());
}

OrderEstimate estimate_order(std::string quantity, std::vector<double> errors, double floor) {
  OrderEstimate e;
  e.quantity = std::move(quantity);
  e.errors = std::move(errors);
  const bool all_zero = std::all_of(e.errors.begin(), e.errors.end(), [](double v) { return v == 0.0; });
  const bool all_floor = std::all_of(e.errors.begin(), e.errors.end(), [&](double v) { return v <= floor; });
  for (std::size_t k = 1; k < e.errors.size(); ++k) {
    const double a = e.errors[k - 1], b = e.errors[k];
    e.orders.push_back(a > 0.0 && b > 0.0 ? std::log2(a / b) : 0.0);
  }
  if (all_zero) {
    e.regime = "degenerate";
  } else if (all_floor) {
    e.regime = "roundoff";
  } else {
    bool monotone = true;
    for (std::size_t k = 1; k < e.errors.size(); ++k) monotone = monotone && e.errors[k] < e.errors[k - 1];
    e.regime = monotone ? "asymptotic" : "below asymptotic regime";
  }
  return e;
}

OrderEstimate mms_convergence(const SpacetimeParams& params, MmsOptions options, int levels, int workers) {
  std::vector<double> errors(levels);
  parallel_for(levels, workers, [&](int k) { errors[k] = mms_error(params, options, 1 << k); });
  return estimate_order(options.nonlinear ? "mms_nonlinear" : "mms_linear", errors,
                        1e-13 * std::max(std::abs(options.amplitude), 1e-300));
}

double h0_exact(const InitialData& data, double epsilon, double mass) {
  double h = 0.0;
  if (!data.f.empty() && !data.f.modes.empty()) {
    h += data.f.modes[0] * (data.f.radial_deriv(mass) + data.f.radial(mass) / mass);
  }
  if (!data.g.empty() && !data.g.modes.empty()) h -= data.g.modes[0] * data.g.radial(mass);
  return epsilon * h;
}

bool ConvergenceReport::degenerate() const {
  for (const OrderEstimate* e : {&mms_linear, &mms_nonlinear, &h0_drift, &h0_error, &self_difference}) {
    if (e->regime != "degenerate") return false;
  }
  return true;
}

ConvergenceReport convergence_suite(const RunConfig& config, int workers) {
  const int levels = config.converge.levels;
  const double m = config.spacetime.mass();
  ConvergenceReport rep;

  MmsOptions mms;
  mms.amplitude = config.converge.mms_amplitude;
  mms.cfl = std::min(config.evolution.cfl, 0.5);
  mms.dissipation = config.evolution.dissipation;
  MmsOptions mms_nl = mms;
  mms_nl.nonlinear = true;

  std::vector<double> err_lin(levels), err_nl(levels);
  std::vector<RunArtifacts> runs(levels);
  std::vector<Eigen::ArrayXd> nodes(levels);
  parallel_for(3 * levels, workers, [&](int task) {
    const int k = task % levels;
    switch (task / levels) {
      case 0: err_lin[k] = mms_error(config.spacetime, mms, 1 << k); break;
      case 1: err_nl[k] = mms_error(config.spacetime, mms_nl, 1 << k); break;
      default: {
        GridSpec g = config.grid;
        g.split_radius = config.split_radius;
        g.refinement = config.grid.refinement << k;
        const Discretization disc(config.spacetime, g);
        nodes[k] = disc.grid().r();
        EvolveHooks hooks;
        hooks.early_snapshot_count = 0;
        runs[k] = evolve(disc, config.evolution, config.data, config.split_radius, hooks);
      }
    }
  });
  const double floor = 1e-13 * std::max(std::abs(mms.amplitude), 1e-300);
  rep.mms_linear = estimate_order("mms_linear", err_lin, floor);
  rep.mms_nonlinear = estimate_order("mms_nonlinear", err_nl, floor);

  const double h_exact = h0_exact(config.data, config.evolution.epsilon, m);
  std::vector<double> drift(levels), error(levels), selfdiff;
  for (int k = 0; k < levels; ++k) {
    rep.nodes.push_back(static_cast<int>(nodes[k].size()));
    const RunArtifacts& a = runs[k];
    if (a.status != ExitStatus::completed) rep.failures.push_back("level " + std::to_string(k) + ": " + a.message);
    const double h0 = a.horizon.empty() ? 0.0 : a.horizon.front().h0;
    for (const HorizonTrace& h : a.horizon) {
      if (h0 != 0.0) drift[k] = std::max(drift[k], std::abs(h.h0 - h0) / std::abs(h0));
      error[k] = std::max(error[k], std::abs(h.h0 - h_exact));
    }
  }
  for (int k = 0; k + 1 < levels; ++k) {
    const Field& coarse = runs[k].final_state.psi;
    const Field& fine = runs[k + 1].final_state.psi;
    double d = 0.0;
    // compare on the level-0 nodes, which every level contains
    const int stride0 = 1 << k;
    for (int i = 0; i < coarse.rows(); i += stride0) {
      for (int j = 0; j < coarse.cols(); ++j) d = std::max(d, std::abs(coarse(i, j) - fine(2 * i, j)));
    }
    if (!std::isfinite(d)) d = 0.0;
    selfdiff.push_back(d);
  }
  // accumulated rounding over the longest run
  long steps = 1;
  for (const RunArtifacts& a : runs) steps = std::max(steps, a.steps);
  const double roundoff = 100.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(steps);
  rep.h0_drift = estimate_order("h0_drift", drift, roundoff);
  rep.h0_error = estimate_order("h0_error", error, roundoff * std::max(std::abs(h_exact), 1e-300));
  const double scale = runs[0].horizon.empty() ? 0.0 : std::abs(config.evolution.epsilon);
  rep.self_difference = estimate_order("self_difference", selfdiff, 1e-13 * std::max(scale, 1e-300));
  return rep;
}

nlohmann::json to_json(const OrderEstimate& e) {
  return {{"quantity", e.quantity},
          {"errors", e.errors},
          {"orders", e.orders},
          {"min_order", e.min_order()},
          {"regime", e.regime}};
}

nlohmann::json to_json(const ConvergenceReport& r) {
  return {{"nodes", r.nodes},
          {"mms_linear", to_json(r.mms_linear)},
          {"mms_nonlinear", to_json(r.mms_nonlinear)},
          {"h0_drift", to_json(r.h0_drift)},
          {"h0_error", to_json(r.h0_error)},
          {"self_difference", to_json(r.self_difference)},
          {"degenerate", r.degenerate()},
          {"failures", r.failures}};
}

}  // namespace xrn

#include "xrn/evolve.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace xrn {

void EvolutionConfig::validate() const {
  std::ostringstream err;
  if (!(cfl > 0.0 && cfl <= 0.5)) err << "cfl must lie in (0, 0.5]; ";
  if (!(dissipation >= 0.0 && dissipation <= 0.5)) err << "dissipation must lie in [0, 0.5]; ";
  if (!(constraint_damping >= 0.0 && constraint_damping <= 10.0)) err << "constraint_damping must lie in [0, 10]; ";
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) err << "epsilon must be >= 0; ";
  if (!(t_end >= 0.0)) err << "t_end must be >= 0; ";
  if (!(output_every > 0.0)) err << "output_every must be positive; ";
  if (!(snapshot_every >= 0.0)) err << "snapshot_every must be >= 0; ";
  if (!(threshold_factor > 1.0)) err << "threshold_factor must exceed 1; ";
  try {
    coupling.validate();
  } catch (const std::exception& e) {
    err << e.what() << "; ";
  }
  const std::string msg = err.str();
  if (!msg.empty()) throw std::invalid_argument(msg.substr(0, msg.size() - 2));
}

std::string to_string(ExitStatus s) {
  switch (s) {
    case ExitStatus::completed: return "completed";
    case ExitStatus::breakdown: return "breakdown";
    case ExitStatus::numerical_failure: return "numerical_failure";
  }
  return "completed";
}

RunArtifacts evolve(const Discretization& disc, const EvolutionConfig& config, const InitialData& data,
                    double split_radius, const EvolveHooks& hooks) {
  config.validate();
  RunArtifacts out;
  RhsOptions opts;
  opts.dissipation = config.dissipation;
  opts.constraint_damping = config.constraint_damping;
  opts.coupling = config.coupling;
  opts.source = hooks.source;
  Evolver ev(disc, opts);

  FieldState s = data.build(disc, config.epsilon);
  const long steps_per_output = std::max(1L, static_cast<long>(std::ceil(config.output_every / ev.max_dt(config.cfl) - 1e-9)));
  const double dt = config.output_every / steps_per_output;
  const long outputs = std::lround(config.t_end / config.output_every);
  const long steps_per_snapshot =
      config.snapshot_every > 0.0 ? std::max(1L, std::lround(config.snapshot_every / dt)) : 0;
  out.dt = dt;

  const SlabNorms initial = sup_norms(s, disc);
  out.thresholds = default_thresholds(initial, config.threshold_factor);
  bool spike_done = false, nan_done = false;

  auto record = [&](const FieldState& st) -> bool {
    FieldState state = st;
    if (!spike_done && hooks.fault.spike_at >= 0.0 && st.t_star >= hooks.fault.spike_at - 1e-12) {
      state.pi(state.n_r() / 2, 0) += 10.0 * out.thresholds.t_psi;
      spike_done = true;
    }
    const FieldState dot = ev.rhs(state);
    out.horizon.push_back(horizon_trace(state, dot, disc));
    out.energy.push_back(energy_record(state, disc, split_radius, config.output_every));
    out.norms.push_back({state.t_star, sup_norms(state, disc)});
    if (auto rep = breakdown_check(state, disc, out.thresholds)) {
      out.breakdown = rep;
      out.status = ExitStatus::breakdown;
      std::ostringstream msg;
      msg << "breakdown: " << rep->norm << " = " << rep->value << " exceeds " << rep->threshold << " at t* = "
          << rep->t_star;
      out.message = msg.str();
      return false;
    }
    return true;
  };

  const int early = std::max(hooks.early_snapshot_count, 0);
  long step_index = 0;
  try {
    if (!s.all_finite()) throw NumericalFailure("initial data is not finite");
    if (early > 0) out.early.push_back(s);
    if (hooks.on_snapshot && steps_per_snapshot > 0) hooks.on_snapshot(s);
    bool alive = record(s);
    for (long k = 1; alive && k <= outputs; ++k) {
      for (long j = 0; j < steps_per_output; ++j) {
        if (!nan_done && hooks.fault.nan_at >= 0.0 && s.t_star >= hooks.fault.nan_at - 1e-12) {
          s.psi(s.n_r() / 2, 0) = std::numeric_limits<double>::quiet_NaN();
          nan_done = true;
        }
        ev.step(s, dt);
        ++step_index;
        if (static_cast<long>(out.early.size()) < early) out.early.push_back(s);
        if (hooks.on_snapshot && steps_per_snapshot > 0 && step_index % steps_per_snapshot == 0) {
          hooks.on_snapshot(s);
        }
      }
      s.t_star = k * config.output_every;  // remove accumulated rounding in t*
      alive = record(s);
    }
  } catch (const NumericalFailure& e) {
    out.status = ExitStatus::numerical_failure;
    out.message = e.what();
  }
  out.steps = step_index;
  if (static_cast<int>(out.early.size()) >= std::max(2 * 2 + 1, 2)) {
    out.e0 = initial_energy_e0(out.early, disc, split_radius, 2, 2);
  }
  out.final_state = std::move(s);
  return out;
}

}  // namespace xrn

// Time integration driver: evolves initial data, samples the horizon and
// slice diagnostics at a fixed cadence and watches the breakdown norms.
#pragma once

#include "xrn/diagnostics.hpp"
#include "xrn/dynamics.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace xrn {

struct EvolutionConfig {
  double cfl = 0.4;           ///< dt <= cfl * min dr
  double dissipation = 0.1;   ///< Kreiss-Oliger strength
  double constraint_damping = 1.0;
  double epsilon = 0.01;      ///< data amplitude
  Coupling coupling{};
  double t_end = 100.0;
  double output_every = 0.5;
  double snapshot_every = 0.0;  ///< 0 disables snapshot files
  double threshold_factor = 1e3;

  void validate() const;
  bool operator==(const EvolutionConfig&) const = default;
};

/// Test hooks that corrupt the state on purpose. Negative times disable.
struct FaultInjection {
  double spike_at = -1.0;  ///< add 10x the T psi threshold to Pi at the first output at or after this time
  double nan_at = -1.0;    ///< write a NaN into psi before the first step at or after this time
  bool operator==(const FaultInjection&) const = default;
};

enum class ExitStatus { completed = 0, breakdown = 2, numerical_failure = 3 };
std::string to_string(ExitStatus s);

struct NormRecord {
  double t_star = 0.0;
  SlabNorms norms{};
};

struct RunArtifacts {
  ExitStatus status = ExitStatus::completed;
  std::string message;
  std::vector<HorizonTrace> horizon;
  std::vector<EnergyRecord> energy;
  std::vector<NormRecord> norms;
  std::optional<BreakdownReport> breakdown;
  BreakdownThresholds thresholds{};
  std::vector<FieldState> early;  ///< first 2L+1 step states, for E0
  double e0 = 0.0;
  double dt = 0.0;
  long steps = 0;
  FieldState final_state{};
};

struct EvolveHooks {
  std::function<void(const FieldState&)> on_snapshot{};
  SourceFn source{};
  FaultInjection fault{};
  int early_snapshot_count = 5;
};

RunArtifacts evolve(const Discretization& disc, const EvolutionConfig& config, const InitialData& data,
                    double split_radius, const EvolveHooks& hooks = {});

}  // namespace xrn

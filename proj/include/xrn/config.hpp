// INI-style run configuration:
//
//   [spacetime]  mass
//   [foliation]  split_radius
//   [grid]       n_r r_max n_theta stretching min_spacing growth refinement
//   [evolution]  cfl dissipation constraint_damping epsilon t_end output_every
//                snapshot_every threshold_factor coupling coupling_bound coupling_table
//   [data]       f_center f_width f_modes g_center g_width g_modes
//   [fault]      spike_at nan_at
//   [converge]   levels mms_amplitude
//
// Lists are comma separated ("1, 0, 0.25"); coupling_table rows are
// "psi:A" pairs. Every key is optional, unknown keys are errors.
#pragma once

#include "xrn/dynamics.hpp"
#include "xrn/evolve.hpp"
#include "xrn/geometry.hpp"
#include "xrn/grid.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace xrn {

struct ConvergeConfig {
  int levels = 3;
  double mms_amplitude = 1.0;
  bool operator==(const ConvergeConfig&) const = default;
};

struct RunConfig {
  SpacetimeParams spacetime{};
  double split_radius = 6.0;
  GridSpec grid{};
  EvolutionConfig evolution{};
  InitialData data{Profile{1.5, 1.0, {1.0}}, Profile{4.0, 1.0, {}}};
  FaultInjection fault{};
  ConvergeConfig converge{};

  bool operator==(const RunConfig&) const = default;
};

class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const { return errors_; }

 private:
  std::vector<std::string> errors_;
};

/// Throws ConfigError listing every problem found.
RunConfig parse_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);
/// Every constraint violation of an assembled config; empty when valid.
std::vector<std::string> validate(const RunConfig& config);

std::string serialize(const RunConfig& config);
/// FNV-1a of the serialized config.
std::uint64_t config_hash(const RunConfig& config);
std::string hash_hex(std::uint64_t hash);

}  // namespace xrn

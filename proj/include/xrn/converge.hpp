// Convergence measurements: manufactured solutions and refinement studies
// of a configured run.
#pragma once

#include "xrn/config.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace xrn {

/// psi = a sin(t*/M) exp(-(r - 3M)^2/M^2) (1 + P_2(cos theta)/2) forced by
/// the matching source on a uniform grid [M, r_max].
struct MmsOptions {
  int n_r = 101;
  double r_max = 12.0;  ///< in units of M
  int n_theta = 8;
  double t_end = 4.0;   ///< in units of M
  double amplitude = 1.0;
  double cfl = 0.5;
  double dissipation = 0.1;
  bool nonlinear = false;
};

/// max |psi - psi_exact| at t_end on the grid sampled with the given refinement.
double mms_error(const SpacetimeParams& params, const MmsOptions& options, int refinement);

struct OrderEstimate {
  std::string quantity;
  std::vector<double> errors;
  std::vector<double> orders;  ///< log2 of successive error ratios
  std::string regime;          ///< "asymptotic", "below asymptotic regime", "roundoff" or "degenerate"
  double min_order() const;
};

/// Orders from an error sequence with refinement ratio 2. Errors at or below
/// floor are treated as roundoff.
OrderEstimate estimate_order(std::string quantity, std::vector<double> errors, double floor);

OrderEstimate mms_convergence(const SpacetimeParams& params, MmsOptions options, int levels, int workers = 1);

/// H0 = (Y psi_0 + psi_0/M) on r = M computed from the initial data profiles.
double h0_exact(const InitialData& data, double epsilon, double mass);

struct ConvergenceReport {
  std::vector<int> nodes;
  OrderEstimate mms_linear;
  OrderEstimate mms_nonlinear;
  OrderEstimate h0_drift;       ///< max_t |H0(t) - H0(0)| / |H0(0)|
  OrderEstimate h0_error;       ///< max_t |H0(t) - H0_exact|
  OrderEstimate self_difference;
  std::vector<std::string> failures;
  bool degenerate() const;
};

ConvergenceReport convergence_suite(const RunConfig& config, int workers = 1);
nlohmann::json to_json(const OrderEstimate& e);
nlohmann::json to_json(const ConvergenceReport& r);

/// Runs tasks on up to `workers` threads; exceptions propagate after all finish.
void parallel_for(int count, int workers, const std::function<void(int)>& task);

}  // namespace xrn

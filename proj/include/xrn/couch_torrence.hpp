// Couch-Torrence map r -> r' = M + M^2/(r - M) on fields, plus numerical
// audits of the conformal covariance identities.
#pragma once

#include "xrn/geometry.hpp"

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace xrn {

enum class ChartTag { near_horizon, near_infinity };
ChartTag opposite(ChartTag tag);
std::string to_string(ChartTag tag);

/// Radial samples of one field, tagged with the chart they live in.
struct ChartProfile {
  Eigen::ArrayXd r;
  Eigen::ArrayXd values;
  ChartTag tag = ChartTag::near_horizon;
};

/// psi_new(r) = psi_old(Phi(r)) / Omega(r) on the image nodes Phi(r_k),
/// returned in increasing r. Exact: no interpolation is involved.
ChartProfile ct_pullback(const ChartProfile& src, const SpacetimeParams& params);
/// Same map resampled onto target nodes with degree-8 barycentric
/// interpolation on the source nodes. Every Phi(target) must lie in the
/// source range.
ChartProfile ct_pullback(const ChartProfile& src, const Eigen::ArrayXd& target_r, const SpacetimeParams& params);

/// Local polynomial interpolation through the degree + 1 source nodes
/// closest to x.
double barycentric_interpolate(const Eigen::ArrayXd& nodes, const Eigen::ArrayXd& values, double x, int degree = 8);

/// Smooth compactly supported test field on the near-infinity chart:
///   psi_O(t, r', theta) = bump((r' - center)/width) cos(freq t) sum_l a_l P_l(cos theta).
struct CtTestField {
  double center = 3.0;
  double width = 1.8;
  double frequency = 1.0;
  std::vector<double> modes{1.0, 0.5, 0.3};

  double operator()(double t, double r_prime, double theta) const;
  bool zero() const;
  /// Throws std::invalid_argument when the support reaches r' = M.
  void validate(const SpacetimeParams& params) const;
};

/// Where the identities are sampled: static-chart (t, r, theta) points of
/// the near-horizon chart.
struct CtSamples {
  std::vector<double> t{0.3, 1.7};
  std::vector<double> r{1.45, 1.6, 1.8, 2.0, 2.3, 2.6};
  std::vector<double> theta{0.4, 1.3, 2.2};
};

/// max |box_I psi_I - Omega^-3 box_O psi_O| with every derivative taken by
/// 4th-order central differences of step h.
double ct_conformal_residual(const CtTestField& field, const SpacetimeParams& params, double h,
                             const CtSamples& samples = {});

/// psi_O solves box_O psi_O = Q_O + S. The transformed field must satisfy
///   box_I psi_I = Omega Q_I + (2/M) T psi_I psi_I + (2/M) D Y psi_I psi_I
///                 + sqrt(D)/(M r) psi_I^2 + Omega^-3 S o Phi.
/// Returns the max mismatch, derivatives by 4th-order differences of step h.
/// With literal_quadratic set, the psi_I^2 term is -sqrt(D)/M psi_I^2 instead.
double ct_nullform_transform_residual(const CtTestField& field, const SpacetimeParams& params, double h,
                                      const CtSamples& samples = {}, bool literal_quadratic = false);

struct WeightIdentityReport {
  int samples = 0;
  double max_relative_error = 0.0;
  double worst_r_prime = 0.0;
};

/// 2 Omega/r'^3 - 2/(M r'^2) = -2/r'^3 with Omega = (r' - M)/M, evaluated
/// in binary128 arithmetic.
WeightIdentityReport ct_weight_identity_check(const SpacetimeParams& params, const std::vector<double>& r_prime);

/// Q_I for psi_O = f(u) (1 + c cos theta)/r', evaluated in ingoing
/// coordinates at r = M (1 + 10^-k). Q_I stays bounded, so the Omega Q_I
/// term of the transformed equation vanishes on the horizon.
struct HorizonWeightReport {
  std::vector<double> r;
  std::vector<double> q;  ///< Q_I
  double max_abs_q = 0.0;
  double spread = 0.0;    ///< |q_last - q_prev| / max |q|
};
HorizonWeightReport ct_horizon_weight_check(const SpacetimeParams& params, int levels = 8);

struct ConvergenceSeries {
  std::vector<double> steps;
  std::vector<double> residuals;
  std::vector<double> orders;  ///< log2 of successive ratios
  double min_order() const;
};

struct CtAuditOptions {
  int involution_profiles = 100;
  int involution_nodes = 801;
  int weight_samples = 1000;
  std::vector<double> steps{0.02, 0.01, 0.005};
  CtTestField field{};
};

struct CtAuditReport {
  double involution_exact_error = 0.0;     ///< twice through the exact map
  double involution_resampled_error = 0.0; ///< twice through the interpolating map on [1.5M, 3M]
  WeightIdentityReport weight{};
  ConvergenceSeries conformal{};
  ConvergenceSeries nullform{};
  double literal_term_residual = 0.0;
  HorizonWeightReport horizon{};
  bool involution_pass = false;
  bool weight_pass = false;
  bool conformal_pass = false;
  bool nullform_pass = false;
  bool pass() const { return involution_pass && weight_pass && conformal_pass && nullform_pass; }
};

CtAuditReport ct_audit(const SpacetimeParams& params, const CtAuditOptions& options = {});
nlohmann::json to_json(const CtAuditReport& report);

}  // namespace xrn

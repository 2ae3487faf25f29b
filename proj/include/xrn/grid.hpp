// Radial finite-difference grid starting exactly on the horizon, and the
// Gauss-Legendre pseudospectral basis used in the polar direction.
#pragma once

#include "xrn/geometry.hpp"

#include <Eigen/Core>

#include <string>

namespace xrn {

enum class Stretching {
  uniform,               ///< uniform in r
  /// Uniform in r for r <= R0, uniform in r* beyond. The map is only C^1 at
  /// R0, so derivatives near the split are second-order accurate.
  rstar_outside_split,
  horizon_geometric,     ///< min_spacing on the horizon, growing by `growth` per node, uniform far out
};

Stretching parse_stretching(const std::string& name);
std::string to_string(Stretching s);

struct GridSpec {
  static constexpr int kMaxRefinement = 16;

  int n_r = 401;
  double r_max = 40.0;
  int n_theta = 1;
  Stretching stretching = Stretching::uniform;
  double split_radius = 6.0;   // used by rstar_outside_split
  double min_spacing = 0.01;   // used by horizon_geometric
  double growth = 0.02;        // used by horizon_geometric
  /// Sample the same node map with refinement * (n_r - 1) + 1 nodes; the
  /// coarse nodes are reproduced bit for bit at every refinement-th node.
  int refinement = 1;

  int node_count() const { return refinement * (n_r - 1) + 1; }
  bool operator==(const GridSpec&) const = default;

  /// Throws std::invalid_argument listing the violated invariant.
  void validate(const SpacetimeParams& params) const;
};

/// Radial nodes r_0 = M < r_1 < ... < r_{n-1} = r_max with 4th-order
/// derivative stencils. Derivatives are taken in the uniform index
/// coordinate and divided by the numerically differentiated node map, so
/// d/dr of r is exactly one on any node distribution.
class RadialGrid {
 public:
  RadialGrid(const GridSpec& spec, const SpacetimeParams& params);
  /// Arbitrary strictly increasing nodes; nodes(0) must equal the mass.
  RadialGrid(Eigen::ArrayXd nodes, const SpacetimeParams& params);

  int size() const { return static_cast<int>(r_.size()); }
  const Eigen::ArrayXd& r() const { return r_; }
  double mass() const { return mass_; }
  /// Local node spacing dr/dx (index spacing 1).
  const Eigen::ArrayXd& jacobian() const { return jac_; }
  double min_spacing() const { return jac_.minCoeff(); }

  /// 4th-order d/dr: centred in the interior, one-sided on the last two
  /// nodes at each end.
  void derivative(const double* f, double* out) const;
  Eigen::ArrayXd derivative(const Eigen::ArrayXd& f) const;

  /// Adds sigma/(64 h_i) * delta^6 f_i to out for interior nodes
  /// 3 <= i <= n-4 (Kreiss-Oliger, sixth difference).
  void add_dissipation(const double* f, double sigma, double* out) const;

  /// Weights of a 4th-order composite rule for the integral over
  /// [r_0, r_last] (dr, not r^2 dr).
  Eigen::ArrayXd quadrature_weights(int first, int last) const;
  Eigen::ArrayXd quadrature_weights() const { return quadrature_weights(0, size() - 1); }

  /// Index of the last node with r <= radius.
  int last_node_inside(double radius) const;

 private:
  void finish_setup();

  Eigen::ArrayXd r_;
  Eigen::ArrayXd jac_;
  Eigen::ArrayXd inv_jac_;
  double mass_;
};

/// Gauss-Legendre nodes in x = cos(theta) with Legendre transforms. With
/// n_theta = 1 the basis is the single node theta = pi/2 and every angular
/// operator is zero.
class AngularBasis {
 public:
  explicit AngularBasis(int n_theta);

  int size() const { return static_cast<int>(x_.size()); }
  int max_degree() const { return size() - 1; }
  const Eigen::ArrayXd& cos_theta() const { return x_; }
  const Eigen::ArrayXd& theta() const { return theta_; }
  /// Weights summing to 2 (integral over x in [-1, 1]).
  const Eigen::ArrayXd& weights() const { return w_; }

  /// synthesis(j, l) = P_l(x_j)
  const Eigen::MatrixXd& synthesis() const { return synth_; }
  /// projection(l, j) = (2l+1)/2 w_j P_l(x_j); projection * synthesis = I
  const Eigen::MatrixXd& projection() const { return proj_; }
  /// Nodal matrix of the axisymmetric sphere Laplacian.
  const Eigen::MatrixXd& laplacian() const { return lap_; }
  /// Nodal matrix of d/dtheta.
  const Eigen::MatrixXd& d_theta() const { return dtheta_; }

 private:
  Eigen::ArrayXd x_, theta_, w_;
  Eigen::MatrixXd synth_, proj_, lap_, dtheta_;
};

/// Legendre polynomial P_l(x) and its derivative by the three-term recurrence.
double legendre(int l, double x);
double legendre_deriv(int l, double x);

}  // namespace xrn

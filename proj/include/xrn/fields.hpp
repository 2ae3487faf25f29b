// Axisymmetric fields on the (r, theta) grid at one t* = const slice.
//
// Storage is n_r x n_theta, column-major, so column j is the radial
// profile at theta_j and radial stencils run over contiguous memory.
#pragma once

#include "xrn/grid.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <string>

namespace xrn {

using Field = Eigen::ArrayXXd;

/// First-order evolution variables on a t* slice: psi, Pi = d_t* psi and
/// Phi = d_r psi at fixed t*. In this chart T = d_t* and
/// Y = d_r|_v = d_r|_t* - d_t*, so T psi = Pi and Y psi = Phi - Pi.
struct FieldState {
  double t_star = 0.0;
  Field psi;
  Field pi;
  Field phi;

  static FieldState zeros(int n_r, int n_theta, double t = 0.0);
  int n_r() const { return static_cast<int>(psi.rows()); }
  int n_theta() const { return static_cast<int>(psi.cols()); }
  bool all_finite() const;

  FieldState& operator+=(const FieldState& o);
  FieldState& operator*=(double s);
};

/// Legendre coefficients psi_l(r), column l.
struct ModeSet {
  Field coeffs;
  int max_degree() const { return static_cast<int>(coeffs.cols()) - 1; }
};

ModeSet project(const Field& f, const AngularBasis& basis);
Field synthesize(const ModeSet& modes, const AngularBasis& basis);

/// (1/2) int f d(cos theta) at every radius.
Eigen::ArrayXd spherical_mean(const Field& f, const AngularBasis& basis);
Eigen::ArrayXd spherical_mean(const FieldState& s, const AngularBasis& basis);

/// Delta_{S^2} f (without the 1/r^2), spectral. Zero when n_theta = 1.
Field angular_laplacian(const Field& f, const AngularBasis& basis);
Field angular_laplacian(const FieldState& s, const AngularBasis& basis);

/// d_theta f, spectral.
Field theta_derivative(const Field& f, const AngularBasis& basis);

struct EfDerivatives {
  Field t_psi;        ///< T psi
  Field y_psi;        ///< Y psi
  Field ang_grad_sq;  ///< |slashed nabla psi|^2 = (d_theta psi)^2 / r^2
};

EfDerivatives ef_derivatives(const FieldState& s, const RadialGrid& grid, const AngularBasis& basis);

/// Snapshot file: a single line "# {json header}" followed by CSV rows
/// r,theta,psi,pi,phi_r (r fastest within each theta column).
void write_snapshot(std::ostream& os, const FieldState& s, const RadialGrid& grid, const AngularBasis& basis,
                    const std::string& grid_json);
void write_snapshot(const std::string& path, const FieldState& s, const RadialGrid& grid,
                    const AngularBasis& basis, const std::string& grid_json);
/// Reads the body back; the header is returned through header_json.
FieldState read_snapshot(std::istream& is, std::string* header_json = nullptr);

}  // namespace xrn

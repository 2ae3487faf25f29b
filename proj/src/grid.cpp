#include "xrn/grid.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace xrn {

Stretching parse_stretching(const std::string& name) {
  if (name == "uniform") return Stretching::uniform;
  if (name == "rstar_outside_split") return Stretching::rstar_outside_split;
  if (name == "horizon_geometric") return Stretching::horizon_geometric;
  throw std::invalid_argument("unknown stretching '" + name + "'");
}

std::string to_string(Stretching s) {
  switch (s) {
    case Stretching::uniform: return "uniform";
    case Stretching::rstar_outside_split: return "rstar_outside_split";
    case Stretching::horizon_geometric: return "horizon_geometric";
  }
  return "uniform";
}

void GridSpec::validate(const SpacetimeParams& params) const {
  std::ostringstream err;
  const double m = params.mass();
  if (n_r < 17) err << "n_r must be >= 17; ";
  if (!(r_max > m)) err << "r_max must exceed M; ";
  if (n_theta != 1 && n_theta < 8) err << "n_theta must be 1 or >= 8; ";
  if (stretching == Stretching::rstar_outside_split && !(split_radius > m && split_radius < r_max)) {
    err << "split radius must lie in (M, r_max); ";
  }
  if (refinement < 1 || refinement > kMaxRefinement || (kMaxRefinement % refinement) != 0) {
    err << "refinement must divide " << kMaxRefinement << "; ";
  }
  if (stretching == Stretching::horizon_geometric) {
    if (!(min_spacing > 0.0)) err << "min_spacing must be positive; ";
    if (!(growth > 0.0 && growth < 0.2)) err << "growth must lie in (0, 0.2); ";
    if (min_spacing > 0.0 && growth > 0.0 && n_r >= 17 && r_max > m) {
      if (min_spacing * (n_r - 1) >= r_max - m) {
        err << "min_spacing too large for horizon_geometric (a uniform grid is finer); ";
      } else if (min_spacing / growth * std::sinh(std::min(growth * (n_r - 1), 700.0)) <= r_max - m) {
        err << "n_r too small to reach r_max from min_spacing at this growth; ";
      }
    }
  }
  const std::string msg = err.str();
  if (!msg.empty()) throw std::invalid_argument("GridSpec: " + msg.substr(0, msg.size() - 2));
}

namespace {

// dr/dk = s(r) in coarse-index units, s = (H^-2 + (h0^2 + g^2 (r-M)^2)^-1)^-1/2:
// h0 at the horizon, geometric growth g per node, saturating at H. Fixed
// RK4 substeps make every refinement sample the same discrete map.
constexpr int kSubsteps = GridSpec::kMaxRefinement;

Eigen::ArrayXd integrate_geometric(double h0, double g, double big_h, int coarse_intervals, double m) {
  auto s = [&](double r) {
    const double rho = r - m;
    return 1.0 / std::sqrt(1.0 / (big_h * big_h) + 1.0 / (h0 * h0 + g * g * rho * rho));
  };
  const double dk = 1.0 / kSubsteps;
  Eigen::ArrayXd out(coarse_intervals * kSubsteps + 1);
  double r = m;
  out(0) = r;
  for (int i = 1; i < out.size(); ++i) {
    const double k1 = s(r), k2 = s(r + 0.5 * dk * k1), k3 = s(r + 0.5 * dk * k2), k4 = s(r + dk * k3);
    r += dk / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out(i) = r;
  }
  return out;
}

Eigen::ArrayXd geometric_nodes(const GridSpec& spec, double m) {
  const int intervals = spec.n_r - 1;
  auto end_of = [&](double big_h) {
    return integrate_geometric(spec.min_spacing, spec.growth, big_h, intervals, m)(intervals * kSubsteps);
  };
  double lo = std::log(spec.min_spacing), hi = std::log(2.0 * (spec.r_max - m));
  if (end_of(std::exp(hi)) < spec.r_max) {
    throw std::invalid_argument("GridSpec: n_r too small to reach r_max from min_spacing at this growth");
  }
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (end_of(std::exp(mid)) < spec.r_max ? lo : hi) = mid;
  }
  const Eigen::ArrayXd fine = integrate_geometric(spec.min_spacing, spec.growth, std::exp(hi), intervals, m);
  const double scale = (spec.r_max - m) / (fine(fine.size() - 1) - m);
  const int stride = kSubsteps / spec.refinement;
  Eigen::ArrayXd r(spec.node_count());
  for (int i = 0; i < r.size(); ++i) r(i) = m + (fine(i * stride) - m) * scale;
  return r;
}

Eigen::ArrayXd make_nodes(const GridSpec& spec, const SpacetimeParams& params) {
  spec.validate(params);
  const double m = params.mass();
  const int n = spec.node_count();
  Eigen::ArrayXd x(n);
  for (int i = 0; i < n; ++i) x(i) = static_cast<double>(i) / (n - 1);
  Eigen::ArrayXd r(n);

  switch (spec.stretching) {
    case Stretching::uniform:
      r = m + (spec.r_max - m) * x;
      break;

    case Stretching::horizon_geometric:
      r = geometric_nodes(spec, m);
      break;

    case Stretching::rstar_outside_split: {
      // xi(r) = r - M inside R0, (R0 - M) + D(R0) (r*(r) - r*(R0)) outside;
      // C^1 at R0, nodes uniform in xi.
      const double r0 = spec.split_radius;
      const double d0 = horizon_factor(r0, m);
      auto xi = [&](double rr) {
        return rr <= r0 ? rr - m : (r0 - m) + d0 * (tortoise(rr, m) - tortoise(r0, m));
      };
      const double total = xi(spec.r_max);
      for (int i = 0; i < n; ++i) {
        const double target = total * x(i);
        if (target <= r0 - m) {
          r(i) = m + target;
          continue;
        }
        double lo = r0, hi = spec.r_max;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          (xi(mid) < target ? lo : hi) = mid;
        }
        r(i) = 0.5 * (lo + hi);
      }
      break;
    }
  }
  r(0) = m;
  r(n - 1) = spec.r_max;
  return r;
}

}  // namespace

RadialGrid::RadialGrid(const GridSpec& spec, const SpacetimeParams& params)
    : r_(make_nodes(spec, params)), mass_(params.mass()) {
  finish_setup();
}

RadialGrid::RadialGrid(Eigen::ArrayXd nodes, const SpacetimeParams& params)
    : r_(std::move(nodes)), mass_(params.mass()) {
  if (r_.size() < 17) throw std::invalid_argument("RadialGrid: at least 17 nodes required");
  if (r_(0) != mass_) throw std::invalid_argument("RadialGrid: first node must sit exactly on r = M");
  for (Eigen::Index i = 1; i < r_.size(); ++i) {
    if (!(r_(i) > r_(i - 1))) throw std::invalid_argument("RadialGrid: nodes must be strictly increasing");
  }
  finish_setup();
}

void RadialGrid::finish_setup() {
  const int n = size();
  jac_.resize(n);
  // index-space derivative of the node map
  const double* r = r_.data();
  double* j = jac_.data();
  j[0] = (-25.0 * r[0] + 48.0 * r[1] - 36.0 * r[2] + 16.0 * r[3] - 3.0 * r[4]) / 12.0;
  j[1] = (-3.0 * r[0] - 10.0 * r[1] + 18.0 * r[2] - 6.0 * r[3] + r[4]) / 12.0;
  for (int i = 2; i < n - 2; ++i) j[i] = (r[i - 2] - 8.0 * r[i - 1] + 8.0 * r[i + 1] - r[i + 2]) / 12.0;
  j[n - 2] = (3.0 * r[n - 1] + 10.0 * r[n - 2] - 18.0 * r[n - 3] + 6.0 * r[n - 4] - r[n - 5]) / 12.0;
  j[n - 1] = (25.0 * r[n - 1] - 48.0 * r[n - 2] + 36.0 * r[n - 3] - 16.0 * r[n - 4] + 3.0 * r[n - 5]) / 12.0;
  if (!(jac_ > 0.0).all()) throw std::invalid_argument("RadialGrid: node map is not smooth enough (non-positive jacobian)");
  inv_jac_ = jac_.inverse();
}

void RadialGrid::derivative(const double* f, double* out) const {
  const int n = size();
  const double* ij = inv_jac_.data();
  constexpr double c = 1.0 / 12.0;
  out[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) * ij[0];
  out[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]) * ij[1];
  for (int i = 2; i < n - 2; ++i) {
    out[i] = c * (f[i - 2] - 8.0 * f[i - 1] + 8.0 * f[i + 1] - f[i + 2]) * ij[i];
  }
  out[n - 2] = c * (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]) * ij[n - 2];
  out[n - 1] = c * (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] + 3.0 * f[n - 5]) * ij[n - 1];
}

Eigen::ArrayXd RadialGrid::derivative(const Eigen::ArrayXd& f) const {
  if (f.size() != r_.size()) throw std::invalid_argument("RadialGrid::derivative: size mismatch");
  Eigen::ArrayXd out(f.size());
  derivative(f.data(), out.data());
  return out;
}

void RadialGrid::add_dissipation(const double* f, double sigma, double* out) const {
  if (sigma == 0.0) return;
  const int n = size();
  const double* ij = inv_jac_.data();
  const double s = sigma / 64.0;
  for (int i = 3; i < n - 3; ++i) {
    const double d6 = f[i - 3] - 6.0 * f[i - 2] + 15.0 * f[i - 1] - 20.0 * f[i] + 15.0 * f[i + 1] -
                      6.0 * f[i + 2] + f[i + 3];
    out[i] += s * d6 * ij[i];
  }
}

Eigen::ArrayXd RadialGrid::quadrature_weights(int first, int last) const {
  if (first < 0 || last >= size() || last - first < 5) {
    throw std::invalid_argument("quadrature_weights: need at least 6 nodes in range");
  }
  Eigen::ArrayXd w = Eigen::ArrayXd::Zero(size());
  w.segment(first, last - first + 1).setOnes();
  // Gregory end corrections, exact for cubics
  const double ends[3] = {3.0 / 8.0, 7.0 / 6.0, 23.0 / 24.0};
  for (int k = 0; k < 3; ++k) {
    w(first + k) = ends[k];
    w(last - k) = ends[k];
  }
  return w * jac_;
}

int RadialGrid::last_node_inside(double radius) const {
  const auto* begin = r_.data();
  const auto* end = begin + r_.size();
  const int idx = static_cast<int>(std::upper_bound(begin, end, radius) - begin) - 1;
  return std::clamp(idx, 0, size() - 1);
}

double legendre(int l, double x) {
  if (l == 0) return 1.0;
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= l; ++k) {
    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

double legendre_deriv(int l, double x) {
  // P_l' by the recurrence P'_{k} = P'_{k-2} + (2k-1) P_{k-1}; avoids the
  // 1/(1-x^2) form, which is singular at the poles.
  if (l == 0) return 0.0;
  double dm2 = 0.0, dm1 = 1.0;
  if (l == 1) return dm1;
  for (int k = 2; k <= l; ++k) {
    const double d = dm2 + (2.0 * k - 1.0) * legendre(k - 1, x);
    dm2 = dm1;
    dm1 = d;
  }
  return dm1;
}

AngularBasis::AngularBasis(int n_theta) {
  if (n_theta != 1 && n_theta < 8) throw std::invalid_argument("AngularBasis: n_theta must be 1 or >= 8");
  const int n = n_theta;
  x_.resize(n);
  w_.resize(n);
  if (n == 1) {
    x_(0) = 0.0;
    w_(0) = 2.0;
  } else {
    // Golub-Welsch: nodes are eigenvalues of the Jacobi matrix.
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int k = 1; k < n; ++k) {
      const double b = k / std::sqrt(4.0 * k * k - 1.0);
      jacobi(k, k - 1) = b;
      jacobi(k - 1, k) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    // descending x so theta increases with the index
    for (int j = 0; j < n; ++j) {
      x_(j) = eig.eigenvalues()(n - 1 - j);
      const double v0 = eig.eigenvectors()(0, n - 1 - j);
      w_(j) = 2.0 * v0 * v0;
    }
    // one Newton polish per node against P_n for full double accuracy
    for (int j = 0; j < n; ++j) {
      const double dx = legendre(n, x_(j)) / legendre_deriv(n, x_(j));
      x_(j) -= dx;
      const double dp = legendre_deriv(n, x_(j));
      w_(j) = 2.0 / ((1.0 - x_(j) * x_(j)) * dp * dp);
    }
  }
  theta_ = x_.acos();

  synth_.resize(n, n);
  proj_.resize(n, n);
  Eigen::MatrixXd dsynth(n, n);
  Eigen::VectorXd eig_lap(n);
  for (int l = 0; l < n; ++l) {
    eig_lap(l) = -static_cast<double>(l) * (l + 1);
    for (int j = 0; j < n; ++j) {
      synth_(j, l) = legendre(l, x_(j));
      proj_(l, j) = 0.5 * (2.0 * l + 1.0) * w_(j) * synth_(j, l);
      dsynth(j, l) = -std::sin(theta_(j)) * legendre_deriv(l, x_(j));
    }
  }
  lap_ = synth_ * eig_lap.asDiagonal() * proj_;
  dtheta_ = dsynth * proj_;
  if (n == 1) {
    lap_.setZero();
    dtheta_.setZero();
  }
}

}  // namespace xrn

#include "xrn/fields.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace xrn {

FieldState FieldState::zeros(int n_r, int n_theta, double t) {
  FieldState s;
  s.t_star = t;
  s.psi = Field::Zero(n_r, n_theta);
  s.pi = Field::Zero(n_r, n_theta);
  s.phi = Field::Zero(n_r, n_theta);
  return s;
}

bool FieldState::all_finite() const {
  return std::isfinite(t_star) && psi.allFinite() && pi.allFinite() && phi.allFinite();
}

FieldState& FieldState::operator+=(const FieldState& o) {
  psi += o.psi;
  pi += o.pi;
  phi += o.phi;
  return *this;
}

FieldState& FieldState::operator*=(double s) {
  psi *= s;
  pi *= s;
  phi *= s;
  return *this;
}

ModeSet project(const Field& f, const AngularBasis& basis) {
  if (f.cols() != basis.size()) throw std::invalid_argument("project: angular size mismatch");
  return ModeSet{(f.matrix() * basis.projection().transpose()).array()};
}

Field synthesize(const ModeSet& modes, const AngularBasis& basis) {
  if (modes.coeffs.cols() != basis.size()) throw std::invalid_argument("synthesize: mode count mismatch");
  return (modes.coeffs.matrix() * basis.synthesis().transpose()).array();
}

Eigen::ArrayXd spherical_mean(const Field& f, const AngularBasis& basis) {
  if (f.cols() != basis.size()) throw std::invalid_argument("spherical_mean: angular size mismatch");
  if (basis.size() == 1) return f.col(0);
  return 0.5 * (f.matrix() * basis.weights().matrix()).array();
}

Eigen::ArrayXd spherical_mean(const FieldState& s, const AngularBasis& basis) {
  return spherical_mean(s.psi, basis);
}

Field angular_laplacian(const Field& f, const AngularBasis& basis) {
  if (basis.size() == 1) return Field::Zero(f.rows(), f.cols());
  return (f.matrix() * basis.laplacian().transpose()).array();
}

Field angular_laplacian(const FieldState& s, const AngularBasis& basis) {
  return angular_laplacian(s.psi, basis);
}

Field theta_derivative(const Field& f, const AngularBasis& basis) {
  if (basis.size() == 1) return Field::Zero(f.rows(), f.cols());
  return (f.matrix() * basis.d_theta().transpose()).array();
}

EfDerivatives ef_derivatives(const FieldState& s, const RadialGrid& grid, const AngularBasis& basis) {
  EfDerivatives d;
  d.t_psi = s.pi;
  d.y_psi = s.phi - s.pi;
  const Field dth = theta_derivative(s.psi, basis);
  d.ang_grad_sq = dth.square().colwise() / grid.r().square();
  return d;
}

void write_snapshot(std::ostream& os, const FieldState& s, const RadialGrid& grid, const AngularBasis& basis,
                    const std::string& grid_json) {
  nlohmann::json header;
  header["t_star_M"] = s.t_star;
  header["mass"] = grid.mass();
  header["n_r"] = s.n_r();
  header["n_theta"] = s.n_theta();
  header["grid"] = grid_json.empty() ? nlohmann::json::object() : nlohmann::json::parse(grid_json);
  os << "# " << header.dump() << "\n";
  os << "r_M,theta,psi,pi_per_M,phi_r_per_M\n";
  os << std::setprecision(17);
  for (int j = 0; j < s.n_theta(); ++j) {
    for (int i = 0; i < s.n_r(); ++i) {
      os << grid.r()(i) << ',' << basis.theta()(j) << ',' << s.psi(i, j) << ',' << s.pi(i, j) << ','
         << s.phi(i, j) << '\n';
    }
  }
}

void write_snapshot(const std::string& path, const FieldState& s, const RadialGrid& grid,
                    const AngularBasis& basis, const std::string& grid_json) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open snapshot file " + path);
  write_snapshot(os, s, grid, basis, grid_json);
}

FieldState read_snapshot(std::istream& is, std::string* header_json) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw std::runtime_error("snapshot: missing header");
  const auto header = nlohmann::json::parse(line.substr(2));
  if (header_json) *header_json = header.dump();
  const int n_r = header.at("n_r");
  const int n_theta = header.at("n_theta");
  std::getline(is, line);  // column names
  FieldState s = FieldState::zeros(n_r, n_theta, header.at("t_star_M").get<double>());
  for (int j = 0; j < n_theta; ++j) {
    for (int i = 0; i < n_r; ++i) {
      if (!std::getline(is, line)) throw std::runtime_error("snapshot: truncated body");
      std::istringstream row(line);
      std::string cell;
      double v[5];
      for (double& x : v) {
        std::getline(row, cell, ',');
        x = std::stod(cell);
      }
      s.psi(i, j) = v[2];
      s.pi(i, j) = v[3];
      s.phi(i, j) = v[4];
    }
  }
  return s;
}

}  // namespace xrn

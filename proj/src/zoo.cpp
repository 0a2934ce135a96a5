#include <algorithm>
#include <cmath>
#include <utility>

#include "gdcert/sim.hpp"

namespace gdcert {
namespace {

double norm(const Eigen::VectorXd& x) { return x.norm(); }

Box cube(int dim, double half_width) {
  return {Eigen::VectorXd::Constant(dim, -half_width),
          Eigen::VectorXd::Constant(dim, half_width)};
}

// psi(y) = y^2 + 3 sin^2 y; curvature 2 + 6 cos 2y lies in [-4, 8].
double psi(double y) {
  const double s = std::sin(y);
  return y * y + 3.0 * s * s;
}
double dpsi(double y) { return 2.0 * y + 3.0 * std::sin(2.0 * y); }

// Infimum of dpsi^2 / (2 psi) over 1e6 + 1 grid points on [-10, 10],
// reduced by 1%.
constexpr double kPsiPl = 0.99 * 0.17553098598906502;

TestFunction psi_1d() {
  TestFunction f;
  f.id = "psi";
  f.description = "y^2 + 3 sin^2(y)";
  f.dim = 1;
  f.eval = [](const Eigen::VectorXd& x) { return psi(x(0)); };
  f.grad = [](const Eigen::VectorXd& x) {
    return Eigen::VectorXd::Constant(1, dpsi(x(0)));
  };
  f.solution_distance = norm;
  f.known_constants.mu = -4.0;
  f.known_constants.L = 8.0;
  f.known_constants.mu_p = kPsiPl;
  f.domain_box = cube(1, 10.0);
  f.start_box = cube(1, 5.0);
  return f;
}

TestFunction separable_2d() {
  TestFunction f;
  f.id = "separable";
  f.description = "x1^2/2 + psi(x2)/8";
  f.dim = 2;
  f.eval = [](const Eigen::VectorXd& x) { return 0.5 * x(0) * x(0) + psi(x(1)) / 8.0; };
  f.grad = [](const Eigen::VectorXd& x) {
    Eigen::VectorXd g(2);
    g << x(0), dpsi(x(1)) / 8.0;
    return g;
  };
  f.solution_distance = norm;
  f.known_constants.mu = -0.5;
  f.known_constants.L = 1.0;
  f.known_constants.mu_p = kPsiPl / 8.0;
  f.domain_box = cube(2, 10.0);
  f.start_box = cube(2, 5.0);
  return f;
}

// |x|^2 + a (x1^2 - x2^2)^2 / |x|^2 = r^2 (1 + a cos^2 2theta). In the polar
// frame the Hessian is [[2 phi, phi'], [phi', 2 phi + phi'']], whose
// eigenvalues range over [-1, 6] for a = 1/2.
constexpr double kWarp = 0.5;

TestFunction homogeneous_2d() {
  TestFunction f;
  f.id = "homogeneous";
  f.description = "|x|^2 + (x1^2 - x2^2)^2 / (2 |x|^2)";
  f.dim = 2;
  f.eval = [](const Eigen::VectorXd& x) {
    const double r2 = x.squaredNorm();
    if (r2 == 0.0) return 0.0;
    const double q = x(0) * x(0) - x(1) * x(1);
    return r2 + kWarp * q * q / r2;
  };
  f.grad = [](const Eigen::VectorXd& x) {
    const double r2 = x.squaredNorm();
    if (r2 == 0.0) return Eigen::VectorXd::Zero(2).eval();
    const double q = x(0) * x(0) - x(1) * x(1);
    Eigen::VectorXd dq(2);
    dq << 2.0 * x(0), -2.0 * x(1);
    return (2.0 * x + kWarp * (2.0 * q * dq / r2 - 2.0 * q * q * x / (r2 * r2))).eval();
  };
  f.solution_distance = norm;
  f.known_constants.mu = -1.0;
  f.known_constants.L = 6.0;
  f.known_constants.mu_p = 2.0;
  f.known_constants.mu_q = 2.0;
  f.known_constants.mu_g = 2.0;
  f.known_constants.quasar = std::pair{1.0, 0.0};
  f.domain_box = cube(2, 3.0);
  f.start_box = cube(2, 3.0);
  return f;
}

}  // namespace

TestFunction diagonal_quadratic(std::string id, std::vector<double> diag) {
  if (diag.empty()) throw DomainError("diagonal_quadratic: empty diagonal");
  double lo = diag[0], hi = diag[0], lo_pos = 0.0;
  for (double d : diag) {
    if (!std::isfinite(d) || d < 0.0) {
      throw DomainError("diagonal_quadratic: entries must be finite and >= 0");
    }
    lo = std::min(lo, d);
    hi = std::max(hi, d);
    if (d > 0.0 && (lo_pos == 0.0 || d < lo_pos)) lo_pos = d;
  }
  if (hi == 0.0) throw DomainError("diagonal_quadratic: all entries are zero");

  const int n = static_cast<int>(diag.size());
  const Eigen::VectorXd D = Eigen::Map<const Eigen::VectorXd>(diag.data(), n);
  TestFunction f;
  f.id = std::move(id);
  f.description = "diagonal quadratic";
  f.dim = n;
  f.eval = [D](const Eigen::VectorXd& x) { return 0.5 * x.dot(D.cwiseProduct(x)); };
  f.grad = [D](const Eigen::VectorXd& x) { return D.cwiseProduct(x).eval(); };
  f.solution_distance = [D](const Eigen::VectorXd& x) {
    return (D.array() > 0.0).select(x, 0.0).matrix().norm();
  };
  f.known_constants.mu = lo;
  f.known_constants.L = hi;
  // Distance to the solution set only involves the curved coordinates.
  f.known_constants.mu_p = lo_pos;
  f.known_constants.mu_q = lo_pos;
  f.known_constants.mu_g = lo_pos;
  f.domain_box = cube(n, 2.0);
  f.start_box = cube(n, 2.0);
  return f;
}

std::vector<TestFunction> builtin_zoo() {
  std::vector<TestFunction> zoo;
  zoo.push_back(diagonal_quadratic("quad2", {0.5, 1.0}));
  zoo.push_back(diagonal_quadratic("quad3", {0.1, 0.4, 1.0}));
  zoo.push_back(diagonal_quadratic("flat3", {0.0, 0.6, 1.0}));
  zoo.back().description = "rank-deficient quadratic";
  zoo.push_back(psi_1d());
  zoo.push_back(separable_2d());
  zoo.push_back(homogeneous_2d());
  return zoo;
}

TestFunction zoo_function(const std::string& id) {
  for (auto& f : builtin_zoo()) {
    if (f.id == id) return f;
  }
  throw DomainError("unknown function '" + id + "'");
}

}  // namespace gdcert

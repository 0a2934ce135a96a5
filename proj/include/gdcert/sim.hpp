#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gdcert/classes.hpp"

namespace gdcert {

/// Axis-aligned box used for oracle scans and for drawing start points.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
};

struct TestFunction {
  std::string id;
  std::string description;
  int dim = 1;
  std::function<double(const Eigen::VectorXd&)> eval;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> grad;
  double f_star = 0.0;
  std::function<double(const Eigen::VectorXd&)> solution_distance;
  FunctionClassSpec known_constants;
  Box domain_box;  // the constants hold on this box
  Box start_box;   // starts whose level set stays inside domain_box
};

struct Trajectory {
  std::vector<Eigen::VectorXd> iterates;
  std::vector<double> fvals;
  std::vector<double> gnorms;
  std::vector<double> schedule;  // step taken from iterate k to k+1
};

/// Thrown when an iterate, value or gradient stops being finite.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Gradient method x^{k+1} = x^k - t_k grad f(x^k), one step per entry of
/// `schedule`.
Trajectory gd_run(const TestFunction& f, const Eigen::VectorXd& x1,
                  std::span<const double> schedule);

/// Fast gradient method with momentum (sqrt(L) - sqrt(mu_p)) /
/// (sqrt(L) + sqrt(mu_p)); N steps, y^1 = x^1. The schedule records the
/// gradient step 1/L taken before extrapolation.
Trajectory fgm_run(const TestFunction& f, const Eigen::VectorXd& x1, double L,
                   double mu_p, int N);

struct StepRatio {
  int step;  // 0-based index k of the ratio (f^{k+1} - f*) / (f^k - f*)
  double ratio;
};

/// Per-step contraction of f - f*. Steps starting from a gap below
/// 1e-14 (1 + |f*|) count as converged and are left out.
std::vector<StepRatio> empirical_rate(const Trajectory& traj, double f_star);

double convergence_cutoff(double f_star);

/// Tensor grid with `points_per_axis` points per coordinate over `box`
/// (the function's domain box when empty).
struct GridSpec {
  int points_per_axis = 101;
  Box box;
};

/// inf over the grid of |grad f|^2 / (2 (f - f*)), skipping points with
/// f - f* < 1e-12. Throws DomainError when no grid point is left.
double estimate_pl_constant(const TestFunction& f, const GridSpec& grid);

/// Diagonal quadratic 0.5 sum_i d_i x_i^2 with d_i >= 0, at least one d_i > 0.
TestFunction diagonal_quadratic(std::string id, std::vector<double> diag);

std::vector<TestFunction> builtin_zoo();

/// Looks a zoo entry up by id; throws DomainError if unknown.
TestFunction zoo_function(const std::string& id);

/// Writes "iteration,f_gap,grad_norm" rows.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj, double f_star);

}  // namespace gdcert

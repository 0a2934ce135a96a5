#pragma once

#include <Eigen/Core>

#include "gdcert/pep.hpp"

namespace gdcert {

struct SolverOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iter = 200;
  bool verbose = false;  // iteration log on std::clog
};

enum class SolveStatus { Optimal, Infeasible, Unbounded, MaxIter };

const char* to_string(SolveStatus s);

struct SdpSolution {
  Eigen::MatrixXd G;
  Eigen::VectorXd fvals;
  double objective = 0.0;       // objective . fvals
  Eigen::VectorXd duals;        // one multiplier per constraint
  double dual_objective = 0.0;  // -sum_i duals_i * constant_i
  double gap = 0.0;             // dual_objective - objective
  double primal_residual = 0.0; // max constraint violation
  double dual_residual = 0.0;   // check_dual_feasibility(duals)
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
};

/// Dense primal-dual interior-point method (HKM direction with Mehrotra
/// predictor-corrector) for a PepProblem. Single PSD block plus one
/// nonnegative slack per inequality. Deterministic.
SdpSolution solve(const PepProblem& p, const SolverOptions& opts = {});

/// Largest violation of dual feasibility for the multipliers `duals`:
/// negativity, mismatch of the function-value coefficients against the
/// objective, and negative eigenvalues of sum_i duals_i M_i. Zero means the
/// duals prove  optimum <= dual_objective(p, duals).
double check_dual_feasibility(const PepProblem& p, const Eigen::VectorXd& duals);

double dual_objective(const PepProblem& p, const Eigen::VectorXd& duals);

}  // namespace gdcert

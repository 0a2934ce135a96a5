#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gdcert/classes.hpp"

namespace gdcert {

/// One inequality  <gram, G> + fcoef . f + constant <= 0.
///
/// `gram` is symmetric; <A, G> is the trace inner product.
struct PepConstraint {
  Eigen::MatrixXd gram;
  Eigen::VectorXd fcoef;
  double constant = 0.0;
  std::string label;
};

/// Performance-estimation SDP in Gram form:
///
///   maximize   objective . f
///   subject to <M_i, G> + c_i . f + d_i <= 0,   G PSD.
///
/// Function values are normalised so that f* = 0 and f(x^1) = 1; only the
/// remaining values appear as variables, listed in `fval_labels`. Position
/// vectors are expressed relative to `pinned`, which sits at the origin.
struct PepProblem {
  int gram_dim = 0;
  int n_fvals = 0;
  std::vector<PepConstraint> constraints;
  Eigen::VectorXd objective;
  std::vector<std::string> basis_labels;
  std::vector<std::string> fval_labels;
  std::string pinned;

  /// Index of the constraint with the given label, or -1.
  int find(const std::string& label) const;
};

/// One step of the gradient method on PL functions in F_{mu,L}:
/// basis [g1, g2]; constraints interp(x2,x1), interp(x1,x2), pl(x1),
/// pl(x2), nonneg(f2).
PepProblem build_pep_pl(const CurvatureClass& cls, double mu_p, double t);

/// One step with t = 1/L on F_{-L,L} under quadratic gradient growth:
/// basis [g1, g2, y1, y2], x1 pinned, x2 = -g1/L.
PepProblem build_pep_qgg(double L, double mu_g);

/// N steps with t = 1/L on F_{-L,L} under quadratic functional growth:
/// basis [g1..g(N+1), y1..y(N+1)], x1 pinned.
PepProblem build_pep_qfg(double L, double mu_q, int N, int max_N = 10);

/// Plain-text form for cross-checking with external solvers. See
/// docs in README; not meant to be bit-stable.
void write_problem(std::ostream& os, const PepProblem& p);
PepProblem read_problem(std::istream& is);

}  // namespace gdcert

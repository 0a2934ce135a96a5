#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Core>

namespace gdcert {

/// Raised when an input violates the documented range of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Curvature interval [mu, L] of a smooth, possibly non-convex function.
///
/// Only the weakly convex regime is modelled: 0 < L < inf and mu <= 0.
/// Instances can only be obtained through `make`, so every live object
/// satisfies the invariants.
class CurvatureClass {
 public:
  static CurvatureClass make(double mu, double L);

  double mu() const { return mu_; }
  double L() const { return L_; }

 private:
  CurvatureClass(double mu, double L) : mu_(mu), L_(L) {}
  double mu_;
  double L_;
};

/// Same as CurvatureClass::make; kept as a free function for call sites that
/// read better as validation.
CurvatureClass validate_class(double mu, double L);

enum class GrowthKind { PL, QuadFuncGrowth, QuadGradGrowth, Quasar };

/// One growth condition together with its constant(s).
struct GrowthSpec {
  GrowthKind kind;
  double constant;     // mu_p, mu_q, mu_g or mu_s depending on kind
  double gamma = 1.0;  // quasar only

  static GrowthSpec pl(const CurvatureClass& cls, double mu_p);
  static GrowthSpec quad_func_growth(double mu_q);
  static GrowthSpec quad_grad_growth(const CurvatureClass& cls, double mu_g);
  static GrowthSpec quasar(double gamma, double mu_s);
};

/// Everything known about a test function's class membership. `mu` may be
/// positive here (e.g. a strongly convex quadratic); `curvature()` clamps it
/// into the modelled regime, which only enlarges the class.
struct FunctionClassSpec {
  double mu = 0.0;
  double L = 1.0;
  std::optional<double> mu_p;
  std::optional<double> mu_q;
  std::optional<double> mu_g;
  std::optional<std::pair<double, double>> quasar;  // (gamma, mu_s)

  CurvatureClass curvature() const;
};

/// A sampled (position, gradient, value) triple.
struct DataPoint {
  Eigen::VectorXd x;
  Eigen::VectorXd g;
  double f = 0.0;
};

/// LHS minus RHS of the F_{mu,L} interpolation inequality for the ordered
/// pair (i, j). Non-positive iff the pair is consistent with some function in
/// the class.
double interpolation_residual(const CurvatureClass& cls, const DataPoint& p_i,
                              const DataPoint& p_j);

// Constant conversions between growth conditions. None of these inspect an
// actual function; they map constants under the stated hypothesis.

/// Quadratic gradient growth => PL with mu_p = mu_g^2 / L.
double pl_from_quad_grad_growth(const CurvatureClass& cls, double mu_g);

/// PL => quadratic functional growth with the same constant.
double qfg_from_pl(double mu_p);

/// Quadratic functional growth => quadratic gradient growth; requires
/// mu_q > -mu L / (L - mu).
double qgg_from_qfg(const CurvatureClass& cls, double mu_q);

/// Quadratic functional growth => quadratic gradient growth with mu_q / 2.
/// Valid only if the caller knows f(x) - f* <= <grad f(x), x - x*> holds on
/// the level set; that cannot be checked from constants.
double qgg_from_qfg_star(double mu_q);

/// (gamma, mu_s)-quasar-convexity => quadratic gradient growth.
double qgg_from_quasar(double gamma, double mu_s);

struct QuasarConstants {
  double gamma;
  double mu_s;
};

/// Quadratic gradient growth => quasar-convexity, parameterised by any
/// ell > max(L/2, mu_g).
QuasarConstants quasar_from_qgg(const CurvatureClass& cls, double mu_g,
                                double ell);

/// (gamma, mu_s)-quasar-convexity => PL with mu_p = mu_s gamma^2.
double pl_from_quasar(double gamma, double mu_s);

/// PL constant implied by a per-step contraction factor `gamma_rate` of one
/// gradient step with t = 1/L: mu_p = L^2 (1 - gamma) / (2L - mu).
double pl_from_linear_convergence(const CurvatureClass& cls,
                                  double gamma_rate);

}  // namespace gdcert

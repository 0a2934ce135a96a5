#pragma once

#include <span>
#include <utility>
#include <vector>

#include "gdcert/classes.hpp"

namespace gdcert {

/// Which closed form produced a bound.
enum class Regime { CaseI, CaseII, CaseIII, Baseline, NStep };

const char* to_string(Regime r);

/// Inputs echoed back with every bound. Fields that do not apply are NaN
/// (or 1 for `steps`).
struct RateInputs {
  double mu;
  double L;
  double constant;  // mu_p, mu_g, mu_q or mu_s
  double step;
  int steps = 1;
  double gamma;  // quasar only
};

/// Contraction factor on f - f* (per step, or over `steps` steps for NStep).
struct RateBound {
  double rho;
  Regime regime;
  RateInputs params;
};

/// Step-length thresholds separating the three PL regimes.
struct StepRegime {
  double threshold_low;   // 1/L
  double threshold_high;  // 3 / (mu + L + sqrt(mu^2 - L mu + L^2))
};

StepRegime step_regime(const CurvatureClass& cls);

/// CaseI for t < 1/L, CaseII on [1/L, threshold_high], CaseIII above.
Regime regime_of(const CurvatureClass& cls, double t);

/// Evaluates one branch of the PL bound without regime checks, so each
/// branch can be evaluated at (or slightly past) its boundary. Only CaseI,
/// CaseII and CaseIII are accepted.
double pl_branch(Regime branch, const CurvatureClass& cls, double mu_p,
                 double t);

/// One-step PL bound for the gradient method with step t in (0, 2/L).
RateBound rate_pl(const CurvatureClass& cls, double mu_p, double t);

/// Classical PL bound 1 - tL(2 - tL) mu_p / L.
RateBound rate_pl_polyak(double L, double mu_p, double t);

/// h(t) on a grid; each t must lie in (0, 2/L).
std::vector<std::pair<double, double>> h_curve(const CurvatureClass& cls,
                                               double mu_p,
                                               std::span<const double> grid);

/// Closed-form h'(1/L) = 2 L mu_p (mu_p - L) / (L + mu_p - mu)^2.
double h_slope_at_inverse_L(const CurvatureClass& cls, double mu_p);

/// The cubic whose root in [1/L, threshold_high] is the optimal step.
double step_polynomial(const CurvatureClass& cls, double mu_p, double t);

/// Step length minimising the one-step PL bound.
double optimal_step(const CurvatureClass& cls, double mu_p);

/// Bound for quadratic gradient growth at t = 1/L, mu = -L.
RateBound rate_qgg(double L, double mu_g);

/// N-step bound for quadratic functional growth at t = 1/L, mu = -L:
/// (L/mu_q)(2 - 2 mu_q/L)^N.
RateBound rate_qfg_nstep(double L, double mu_q, int N);

/// N-th power of the per-step bound obtained by routing quadratic
/// functional growth through quadratic gradient growth.
RateBound rate_qfg_naive(double L, double mu_q, int N);

struct QuasarRates {
  RateBound baseline;
  RateBound improved;
};

/// Quasar-convex bounds at t = 1/L: 1 - gamma^2 mu_s / L and the tighter
/// (2L - 2 mu_s gamma^2) / (2L + mu_s gamma^2).
QuasarRates rate_quasar(double L, double gamma, double mu_s);

}  // namespace gdcert

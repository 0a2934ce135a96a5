#include "gdcert/rates.hpp"

#include <cmath>
#include <limits>

namespace gdcert {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

void check_step(double L, double t) {
  require(std::isfinite(t) && t > 0.0 && t < 2.0 / L,
          "step length must lie in (0, 2/L)");
}

void check_mu_p(double L, double mu_p) {
  require(std::isfinite(mu_p) && mu_p > 0.0 && mu_p <= L,
          "mu_p must lie in (0, L]");
}

}  // namespace

const char* to_string(Regime r) {
  switch (r) {
    case Regime::CaseI: return "CaseI";
    case Regime::CaseII: return "CaseII";
    case Regime::CaseIII: return "CaseIII";
    case Regime::Baseline: return "Baseline";
    case Regime::NStep: return "NStep";
  }
  return "?";
}

StepRegime step_regime(const CurvatureClass& cls) {
  const double mu = cls.mu();
  const double L = cls.L();
  return {1.0 / L, 3.0 / (mu + L + std::sqrt(mu * mu - L * mu + L * L))};
}

Regime regime_of(const CurvatureClass& cls, double t) {
  check_step(cls.L(), t);
  const auto th = step_regime(cls);
  if (t < th.threshold_low) return Regime::CaseI;
  if (t <= th.threshold_high) return Regime::CaseII;
  return Regime::CaseIII;
}

double pl_branch(Regime branch, const CurvatureClass& cls, double mu_p,
                 double t) {
  const double mu = cls.mu();
  const double L = cls.L();
  switch (branch) {
    case Regime::CaseI: {
      const double radicand =
          (L - mu) * (mu - mu_p) * (2.0 - L * t) * mu_p * t + (L - mu) * (L - mu);
      require(radicand >= 0.0, "negative radicand in the short-step bound");
      const double base =
          (mu_p * (1.0 - L * t) + std::sqrt(radicand)) / (L - mu + mu_p);
      return base * base;
    }
    case Regime::CaseII:
      return (L * t - 2.0) * (mu * t - 2.0) * mu_p * t /
                 ((L + mu - mu_p) * t - 2.0) +
             1.0;
    case Regime::CaseIII: {
      const double a = (L * t - 1.0) * (L * t - 1.0);
      return a / (a + mu_p * t * (2.0 - L * t));
    }
    default:
      throw DomainError("pl_branch: only CaseI/CaseII/CaseIII are PL branches");
  }
}

RateBound rate_pl(const CurvatureClass& cls, double mu_p, double t) {
  check_mu_p(cls.L(), mu_p);
  const Regime r = regime_of(cls, t);
  return {pl_branch(r, cls, mu_p, t), r, {cls.mu(), cls.L(), mu_p, t, 1, kNaN}};
}

RateBound rate_pl_polyak(double L, double mu_p, double t) {
  require(std::isfinite(L) && L > 0.0, "L must be positive");
  check_mu_p(L, mu_p);
  check_step(L, t);
  const double tl = t * L;
  return {1.0 - tl * (2.0 - tl) * mu_p / L, Regime::Baseline,
          {kNaN, L, mu_p, t, 1, kNaN}};
}

std::vector<std::pair<double, double>> h_curve(const CurvatureClass& cls,
                                               double mu_p,
                                               std::span<const double> grid) {
  std::vector<std::pair<double, double>> out;
  out.reserve(grid.size());
  for (double t : grid) out.emplace_back(t, rate_pl(cls, mu_p, t).rho);
  return out;
}

double h_slope_at_inverse_L(const CurvatureClass& cls, double mu_p) {
  check_mu_p(cls.L(), mu_p);
  const double L = cls.L();
  const double d = L + mu_p - cls.mu();
  return 2.0 * L * mu_p * (mu_p - L) / (d * d);
}

double step_polynomial(const CurvatureClass& cls, double mu_p, double t) {
  const double mu = cls.mu();
  const double L = cls.L();
  const double c3 = L * mu * (L + mu - mu_p);
  const double c2 = -(L * L - mu_p * (L + mu) + 5.0 * L * mu + mu * mu);
  const double c1 = 4.0 * (L + mu);
  return ((c3 * t + c2) * t + c1) * t - 4.0;
}

double optimal_step(const CurvatureClass& cls, double mu_p) {
  check_mu_p(cls.L(), mu_p);
  const auto th = step_regime(cls);
  double lo = th.threshold_low;
  double hi = th.threshold_high;
  double r_lo = step_polynomial(cls, mu_p, lo);
  const double r_hi = step_polynomial(cls, mu_p, hi);
  if (r_lo == 0.0) return lo;
  if (r_hi == 0.0) return hi;
  if ((r_lo < 0.0) == (r_hi < 0.0)) return hi;  // no root in the interval

  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double r_mid = step_polynomial(cls, mu_p, mid);
    if (r_mid == 0.0) return mid;
    if ((r_mid < 0.0) == (r_lo < 0.0)) {
      lo = mid;
      r_lo = r_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

RateBound rate_qgg(double L, double mu_g) {
  require(std::isfinite(L) && L > 0.0, "L must be positive");
  require(std::isfinite(mu_g) && mu_g > 0.0 && mu_g <= L,
          "mu_g must lie in (0, L]");
  const double g2 = mu_g * mu_g;
  return {(2.0 * L * L - 2.0 * g2) / (2.0 * L * L + g2), Regime::Baseline,
          {-L, L, mu_g, 1.0 / L, 1, kNaN}};
}

RateBound rate_qfg_nstep(double L, double mu_q, int N) {
  require(std::isfinite(L) && L > 0.0, "L must be positive");
  require(std::isfinite(mu_q) && mu_q > L / 2.0 && mu_q < L,
          "mu_q must lie in (L/2, L)");
  require(N >= 1, "N must be >= 1");
  return {(L / mu_q) * std::pow(2.0 - 2.0 * mu_q / L, N), Regime::NStep,
          {-L, L, mu_q, 1.0 / L, N, kNaN}};
}

RateBound rate_qfg_naive(double L, double mu_q, int N) {
  require(std::isfinite(L) && L > 0.0, "L must be positive");
  require(std::isfinite(mu_q) && mu_q >= L / 2.0 && mu_q <= L,
          "mu_q must lie in [L/2, L]");
  require(N >= 1, "N must be >= 1");
  const double m = mu_q - L / 2.0;
  const double per_step = (2.0 * L * L - 2.0 * m * m) / (2.0 * L * L + m * m);
  return {std::pow(per_step, N), Regime::NStep,
          {-L, L, mu_q, 1.0 / L, N, kNaN}};
}

QuasarRates rate_quasar(double L, double gamma, double mu_s) {
  require(std::isfinite(L) && L > 0.0, "L must be positive");
  require(std::isfinite(gamma) && gamma > 0.0 && gamma <= 1.0,
          "gamma must lie in (0, 1]");
  require(std::isfinite(mu_s) && mu_s > 0.0 && mu_s * gamma * gamma <= L,
          "mu_s must lie in (0, L / gamma^2]");
  const double m = mu_s * gamma * gamma;
  const RateInputs in{kNaN, L, mu_s, 1.0 / L, 1, gamma};
  return {{1.0 - m / L, Regime::Baseline, in},
          {(2.0 * L - 2.0 * m) / (2.0 * L + m), Regime::Baseline, in}};
}

}  // namespace gdcert

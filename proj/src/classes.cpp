#include "gdcert/classes.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gdcert {
namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

void require_finite(double v, const char* name) {
  require(std::isfinite(v), std::string(name) + " must be finite, got " + fmt(v));
}

}  // namespace

CurvatureClass CurvatureClass::make(double mu, double L) {
  require_finite(mu, "mu");
  require_finite(L, "L");
  require(L > 0.0, "L must be positive, got " + fmt(L));
  require(mu <= 0.0, "mu must be <= 0, got " + fmt(mu));
  require(mu < L, "mu must be < L");
  return CurvatureClass(mu, L);
}

CurvatureClass validate_class(double mu, double L) {
  return CurvatureClass::make(mu, L);
}

GrowthSpec GrowthSpec::pl(const CurvatureClass& cls, double mu_p) {
  require_finite(mu_p, "mu_p");
  require(mu_p > 0.0 && mu_p <= cls.L(),
          "mu_p must lie in (0, L], got " + fmt(mu_p));
  // Strong convexity already implies PL with constant mu; with mu <= 0 this
  // never changes anything.
  return {GrowthKind::PL, std::max(cls.mu(), mu_p)};
}

GrowthSpec GrowthSpec::quad_func_growth(double mu_q) {
  require_finite(mu_q, "mu_q");
  require(mu_q > 0.0, "mu_q must be positive, got " + fmt(mu_q));
  return {GrowthKind::QuadFuncGrowth, mu_q};
}

GrowthSpec GrowthSpec::quad_grad_growth(const CurvatureClass& cls,
                                        double mu_g) {
  require_finite(mu_g, "mu_g");
  require(mu_g > 0.0 && mu_g <= cls.L(),
          "mu_g must lie in (0, L], got " + fmt(mu_g));
  return {GrowthKind::QuadGradGrowth, mu_g};
}

GrowthSpec GrowthSpec::quasar(double gamma, double mu_s) {
  require_finite(gamma, "gamma");
  require_finite(mu_s, "mu_s");
  require(gamma > 0.0 && gamma <= 1.0,
          "gamma must lie in (0, 1], got " + fmt(gamma));
  require(mu_s >= 0.0, "mu_s must be >= 0, got " + fmt(mu_s));
  return {GrowthKind::Quasar, mu_s, gamma};
}

CurvatureClass FunctionClassSpec::curvature() const {
  return CurvatureClass::make(std::min(mu, 0.0), L);
}

double interpolation_residual(const CurvatureClass& cls, const DataPoint& p_i,
                              const DataPoint& p_j) {
  const auto n = p_i.x.size();
  if (p_i.g.size() != n || p_j.x.size() != n || p_j.g.size() != n) {
    throw DomainError("interpolation_residual: dimension mismatch");
  }
  const double mu = cls.mu();
  const double L = cls.L();
  const Eigen::VectorXd dg = p_i.g - p_j.g;
  const Eigen::VectorXd dx = p_i.x - p_j.x;
  // <g_j - g_i, x_j - x_i> == <dg, dx>
  const double lhs =
      (dg.squaredNorm() / L + mu * dx.squaredNorm() - 2.0 * mu / L * dg.dot(dx)) /
      (2.0 * (1.0 - mu / L));
  const double rhs = p_i.f - p_j.f - p_j.g.dot(dx);
  return lhs - rhs;
}

double pl_from_quad_grad_growth(const CurvatureClass& cls, double mu_g) {
  require(std::isfinite(mu_g) && mu_g > 0.0 && mu_g <= cls.L(),
          "mu_g must lie in (0, L], got " + fmt(mu_g));
  return mu_g * mu_g / cls.L();
}

double qfg_from_pl(double mu_p) {
  require(std::isfinite(mu_p) && mu_p > 0.0,
          "mu_p must be positive, got " + fmt(mu_p));
  return mu_p;
}

double qgg_from_qfg(const CurvatureClass& cls, double mu_q) {
  const double mu = cls.mu();
  const double L = cls.L();
  const double lower = -mu * L / (L - mu);
  require(std::isfinite(mu_q) && mu_q > lower,
          "mu_q must exceed -mu L / (L - mu) = " + fmt(lower) + ", got " +
              fmt(mu_q));
  return 0.5 * mu_q * (1.0 - mu / L) + 0.5 * mu;
}

double qgg_from_qfg_star(double mu_q) {
  require(std::isfinite(mu_q) && mu_q > 0.0,
          "mu_q must be positive, got " + fmt(mu_q));
  return 0.5 * mu_q;
}

double qgg_from_quasar(double gamma, double mu_s) {
  const auto spec = GrowthSpec::quasar(gamma, mu_s);
  return spec.constant * gamma / 2.0 + spec.constant * gamma * gamma / 4.0;
}

QuasarConstants quasar_from_qgg(const CurvatureClass& cls, double mu_g,
                                double ell) {
  require(std::isfinite(mu_g) && mu_g > 0.0 && mu_g <= cls.L(),
          "mu_g must lie in (0, L], got " + fmt(mu_g));
  const double lower = std::max(cls.L() / 2.0, mu_g);
  require(std::isfinite(ell) && ell > lower,
          "ell must exceed max(L/2, mu_g) = " + fmt(lower) + ", got " +
              fmt(ell));
  return {mu_g / ell, ell - cls.L() / 2.0};
}

double pl_from_quasar(double gamma, double mu_s) {
  require(std::isfinite(gamma) && gamma > 0.0 && gamma <= 1.0,
          "gamma must lie in (0, 1], got " + fmt(gamma));
  require(std::isfinite(mu_s) && mu_s > 0.0,
          "mu_s must be positive, got " + fmt(mu_s));
  return mu_s * gamma * gamma;
}

double pl_from_linear_convergence(const CurvatureClass& cls,
                                  double gamma_rate) {
  require(std::isfinite(gamma_rate) && gamma_rate >= 0.0 && gamma_rate < 1.0,
          "contraction factor must lie in [0, 1), got " + fmt(gamma_rate));
  const double L = cls.L();
  return L * L * (1.0 - gamma_rate) / (2.0 * L - cls.mu());
}

}  // namespace gdcert

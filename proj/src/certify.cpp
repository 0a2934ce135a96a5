#include "gdcert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "gdcert/rates.hpp"

namespace gdcert {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

std::string name(const char* prefix, int k) { return prefix + std::to_string(k); }

void check_pl_params(const CurvatureClass& cls, double mu_p, double t,
                     Regime expected) {
  require(std::isfinite(mu_p) && mu_p > 0.0 && mu_p <= cls.L(),
          "mu_p must lie in (0, L]");
  require(regime_of(cls, t) == expected,
          std::string("step length is outside the ") + to_string(expected) +
              " regime");
}

// A sampled instance: named points plus the optimal value.
struct Sample {
  std::map<std::string, DataPoint> pts;
  double f_star = 0.0;
};

// Non-positive form of the constraint with the given label.
double constraint_value(const Certificate& cert, const CurvatureClass& cls,
                        const Sample& s, const std::string& label) {
  const auto open = label.find('(');
  const std::string kind = label.substr(0, open);
  const std::string args = label.substr(open + 1, label.size() - open - 2);
  if (kind == "interp") {
    const auto comma = args.find(',');
    return interpolation_residual(cls, s.pts.at(args.substr(0, comma)),
                                  s.pts.at(args.substr(comma + 1)));
  }
  const DataPoint& p = s.pts.at(args);
  if (kind == "pl") {
    return p.f - s.f_star - p.g.squaredNorm() / (2.0 * cert.params.constant);
  }
  if (kind == "growth") {
    const DataPoint& y = s.pts.at("y" + args.substr(1));
    return 0.5 * cert.params.constant * (p.x - y.x).squaredNorm() - (p.f - s.f_star);
  }
  throw DomainError("unknown constraint label '" + label + "'");
}

// The closed-form remainder each proof reduces the weighted sum to.
double remainder(const Certificate& cert, const Sample& s) {
  const auto& prm = cert.params;
  const double mu = prm.mu, L = prm.L, mu_p = prm.constant, t = prm.t;
  switch (cert.kind) {
    case CertificateCase::PL_CaseI: {
      const auto cls = CurvatureClass::make(mu, L);
      const auto m = multipliers_case_i(cls, mu_p, t);
      const double c = (m.alpha + mu_p * (1.0 - L * t)) / (L - mu + mu_p);
      const Eigen::VectorXd v = c * s.pts.at("x1").g - s.pts.at("x2").g;
      return -(1.0 - L * t) / (2.0 * m.alpha) * v.squaredNorm();
    }
    case CertificateCase::PL_CaseII:
      return 0.0;
    case CertificateCase::PL_CaseIII: {
      const double beta =
          (L * t - 1.0) * (L * t - 1.0) + mu_p * t * (2.0 - L * t);
      const double root = std::sqrt(L * t - 1.0);
      const Eigen::VectorXd v = root * s.pts.at("x1").g + s.pts.at("x2").g / root;
      return -(1.0 - L * t) * (mu * t * (L * t - 2.0) + 2.0 * (1.0 - L * t) + 1.0) /
             (2.0 * beta * (L - mu)) * v.squaredNorm();
    }
    case CertificateCase::QFG_NStep: {
      const int N = prm.N;
      const double r = 1.0 - prm.constant / L;
      const Eigen::VectorXd& x1 = s.pts.at("x1").x;
      Eigen::VectorXd gsum = Eigen::VectorXd::Zero(x1.size());
      for (int l = 1; l <= N + 1; ++l) gsum += s.pts.at(name("x", l)).g;
      gsum /= L;
      double out = -(L / 4.0) * std::pow(r, N - 1) *
                   (s.pts.at("y1").x - x1 + gsum).squaredNorm();
      for (int i = 2; i <= N; ++i) {
        out -= (prm.constant / 4.0) * std::pow(r, N - i) *
               (s.pts.at(name("y", i)).x - x1 + gsum).squaredNorm();
      }
      return out;
    }
  }
  return 0.0;
}

Sample draw(const Certificate& cert, int dim, double scale, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  auto vec = [&] {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = scale * normal(rng);
    return v;
  };
  Sample s;
  s.f_star = scale * normal(rng);
  const int K = cert.kind == CertificateCase::QFG_NStep ? cert.params.N + 1 : 2;
  const double step = cert.kind == CertificateCase::QFG_NStep ? 1.0 / cert.params.L
                                                               : cert.params.t;
  Eigen::VectorXd x = vec();
  for (int k = 1; k <= K; ++k) {
    DataPoint p{x, vec(), scale * normal(rng)};
    x = x - step * p.g;
    s.pts.emplace(name("x", k), std::move(p));
  }
  if (cert.kind == CertificateCase::QFG_NStep) {
    for (int k = 1; k <= K; ++k) {
      s.pts.emplace(name("y", k), DataPoint{vec(), Eigen::VectorXd::Zero(dim), s.f_star});
    }
  }
  return s;
}

}  // namespace

const char* to_string(CertificateCase c) {
  switch (c) {
    case CertificateCase::PL_CaseI: return "PL_CaseI";
    case CertificateCase::PL_CaseII: return "PL_CaseII";
    case CertificateCase::PL_CaseIII: return "PL_CaseIII";
    case CertificateCase::QFG_NStep: return "QFG_NStep";
  }
  return "?";
}

CaseIMultipliers multipliers_case_i(const CurvatureClass& cls, double mu_p,
                                    double t) {
  check_pl_params(cls, mu_p, t, Regime::CaseI);
  const double mu = cls.mu(), L = cls.L();
  const double alpha =
      std::sqrt((L - mu) * (mu_p * t * (mu_p - mu) * (L * t - 2.0) + (L - mu)));
  const double b1 =
      (L - mu) * (alpha + mu_p * (1.0 - L * t)) / (alpha * (L - mu + mu_p));
  const double c = alpha * b1 / (L - mu);
  return {b1, b1 - c * c, alpha};
}

CaseIIMultipliers multipliers_case_ii(const CurvatureClass& cls, double mu_p,
                                      double t) {
  check_pl_params(cls, mu_p, t, Regime::CaseII);
  const double mu = cls.mu(), L = cls.L();
  const double den = (L + mu - mu_p) * t - 2.0;
  return {(mu * t - 1.0) / den, (1.0 - L * t) / den,
          -((L * t - 2.0) * (mu * t - 2.0) - 1.0) * mu_p * t / den,
          -mu_p * t / den};
}

CaseIIIMultipliers multipliers_case_iii(const CurvatureClass& cls, double mu_p,
                                        double t) {
  check_pl_params(cls, mu_p, t, Regime::CaseIII);
  const double L = cls.L();
  const double a = L * t - 1.0;
  const double beta = a * a + mu_p * t * (2.0 - L * t);
  return {beta, a * a / beta, mu_p * t * (2.0 - L * t) / beta,
          a * (2.0 - L * t) / beta, a / beta};
}

QfgMultipliers multipliers_qfg(double L, double mu_q, int N) {
  const double bound = rate_qfg_nstep(L, mu_q, N).rho;  // validates the range
  const double r = 1.0 - mu_q / L;
  QfgMultipliers m{N, Eigen::MatrixXd::Zero(N + 1, N + 2),
                   Eigen::VectorXd::Zero(N + 2), 0.0, bound};
  for (int j = 1; j <= N + 1; ++j) {
    m.interp(1, j) = std::pow(2.0, N + 1 - j) * std::pow(r, N - 1);
  }
  for (int i = 2; i <= N; ++i) {
    for (int j = i; j <= N + 1; ++j) {
      m.interp(i, j) = std::pow(2.0, N + 1 - j) * (mu_q / L) * std::pow(r, N - i);
    }
  }
  for (int j = 2; j <= N; ++j) m.growth(j) = std::pow(2.0, N + 1 - j) * std::pow(r, N - j);
  m.growth(1) = std::pow(2.0, N) * std::pow(r, N - 1) + bound;
  m.f1_coefficient = m.growth(1);
  return m;
}

Certificate make_certificate(CertificateCase kind, const CertificateParams& prm) {
  Certificate c{kind, prm, 0.0, {}};
  if (kind == CertificateCase::QFG_NStep) {
    const auto m = multipliers_qfg(prm.L, prm.constant, prm.N);
    c.params.mu = -prm.L;
    c.params.t = 1.0 / prm.L;
    c.bound = m.bound;
    for (int i = 1; i <= prm.N; ++i) {
      for (int j = 1; j <= prm.N + 1; ++j) {
        if (m.interp(i, j) != 0.0) {
          c.multipliers.push_back({"interp(" + name("y", i) + "," + name("x", j) + ")",
                                   m.interp(i, j)});
        }
      }
    }
    for (int j = 1; j <= prm.N + 1; ++j) {
      if (m.growth(j) != 0.0) {
        c.multipliers.push_back({"growth(" + name("x", j) + ")", m.growth(j)});
      }
    }
    return c;
  }

  const auto cls = CurvatureClass::make(prm.mu, prm.L);
  switch (kind) {
    case CertificateCase::PL_CaseI: {
      const auto m = multipliers_case_i(cls, prm.constant, prm.t);
      c.bound = m.b1 - m.b2;
      c.multipliers = {{"interp(x1,x2)", m.b1}, {"pl(x1)", m.b2}, {"pl(x2)", 1.0 - m.b1}};
      break;
    }
    case CertificateCase::PL_CaseII: {
      const auto m = multipliers_case_ii(cls, prm.constant, prm.t);
      c.bound = 1.0 - m.a3 - m.a4;
      c.multipliers = {{"interp(x1,x2)", m.a1}, {"interp(x2,x1)", m.a2},
                       {"pl(x1)", m.a3}, {"pl(x2)", m.a4}};
      break;
    }
    case CertificateCase::PL_CaseIII: {
      const auto m = multipliers_case_iii(cls, prm.constant, prm.t);
      c.bound = m.rate;
      c.multipliers = {{"interp(x2,x1)", m.interp21}, {"interp(x1,x2)", m.interp12},
                       {"pl(x2)", m.pl2}};
      break;
    }
    default:
      break;
  }
  return c;
}

Certificate certificate_for_pl(const CurvatureClass& cls, double mu_p, double t) {
  CertificateCase kind = CertificateCase::PL_CaseII;
  switch (regime_of(cls, t)) {
    case Regime::CaseI: kind = CertificateCase::PL_CaseI; break;
    case Regime::CaseIII: kind = CertificateCase::PL_CaseIII; break;
    default: break;
  }
  return make_certificate(kind, {cls.mu(), cls.L(), mu_p, t, 1});
}

PepProblem matching_pep(const Certificate& cert) {
  const auto& p = cert.params;
  if (cert.kind == CertificateCase::QFG_NStep) {
    return build_pep_qfg(p.L, p.constant, p.N, std::max(10, p.N));
  }
  return build_pep_pl(CurvatureClass::make(p.mu, p.L), p.constant, p.t);
}

Eigen::VectorXd dual_vector(const Certificate& cert, const PepProblem& pep) {
  Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(pep.constraints.size()));
  for (const auto& m : cert.multipliers) {
    const int k = pep.find(m.label);
    require(k >= 0, "problem has no constraint labelled '" + m.label + "'");
    y(k) += m.value;
  }
  return y;
}

IdentityReport identity_report(const Certificate& cert, const IdentityOptions& opts) {
  require(opts.dim >= 2, "identity sampling needs dim >= 2");
  require(opts.n_samples >= 1, "identity sampling needs at least one sample");
  const auto cls = CurvatureClass::make(cert.params.mu, cert.params.L);
  const std::string last =
      cert.kind == CertificateCase::QFG_NStep ? name("x", cert.params.N + 1) : "x2";

  std::mt19937_64 rng(opts.seed);
  IdentityReport rep;
  for (int k = 0; k < opts.n_samples; ++k) {
    const Sample s = draw(cert, opts.dim, opts.scale, rng);
    const double gap_last = s.pts.at(last).f - s.f_star;
    const double gap_first = s.pts.at("x1").f - s.f_star;
    double lhs = gap_last - cert.bound * gap_first;
    double largest = std::max(std::abs(gap_last), std::abs(cert.bound * gap_first));
    for (const auto& m : cert.multipliers) {
      const double term = m.value * constraint_value(cert, cls, s, m.label);
      lhs -= term;
      largest = std::max(largest, std::abs(term));
    }
    const double rhs = remainder(cert, s);
    largest = std::max(largest, std::abs(rhs));
    const double diff = std::abs(lhs - rhs);
    rep.max_abs_residual = std::max(rep.max_abs_residual, diff);
    rep.max_residual = std::max(rep.max_residual, diff / (1.0 + largest));
  }
  rep.samples = opts.n_samples;
  return rep;
}

double verify_identity(const Certificate& cert, int n_samples, int dim,
                       std::uint64_t seed) {
  return identity_report(cert, {n_samples, dim, seed, 1.0}).max_residual;
}

}  // namespace gdcert

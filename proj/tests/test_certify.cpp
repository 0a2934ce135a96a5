#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "gdcert/certify.hpp"
#include "gdcert/rates.hpp"
#include "gdcert/sdp.hpp"

using namespace gdcert;

namespace {

struct PlPoint {
  double mu, mu_p, t;
};

// Ten (mu, mu_p, t) points inside the given regime, L = 1.
std::vector<PlPoint> regime_grid(Regime r) {
  std::vector<PlPoint> out;
  const double mus[] = {-2.0, -1.0, -0.5, -0.1, 0.0};
  const double mps[] = {0.2, 0.8};
  for (double mu : mus) {
    const auto c = CurvatureClass::make(mu, 1.0);
    const double th = step_regime(c).threshold_high;
    for (double mp : mps) {
      double t = 0.0;
      switch (r) {
        case Regime::CaseI: t = 0.6; break;
        case Regime::CaseII: t = 0.5 * (1.0 + th); break;
        default: t = 0.5 * (th + 2.0); break;
      }
      out.push_back({mu, mp, t});
    }
  }
  return out;
}

CertificateCase case_of(Regime r) {
  switch (r) {
    case Regime::CaseI: return CertificateCase::PL_CaseI;
    case Regime::CaseII: return CertificateCase::PL_CaseII;
    default: return CertificateCase::PL_CaseIII;
  }
}

std::vector<double> open_grid(double lo, double hi, int n) {
  std::vector<double> g;
  for (int k = 1; k <= n; ++k) g.push_back(lo + (hi - lo) * k / (n + 1));
  return g;
}

}  // namespace

TEST_CASE("short-step multipliers") {
  const auto c = CurvatureClass::make(-1.0, 1.0);
  const auto m = multipliers_case_i(c, 0.5, 0.5);
  CHECK(m.alpha == doctest::Approx(std::sqrt(2.875)).epsilon(1e-14));
  CHECK(m.alpha == doctest::Approx(1.6956).epsilon(1e-4));
  CHECK(m.b2 == doctest::Approx(m.b1 - std::pow(m.alpha * m.b1 / 2.0, 2)));
  CHECK_THROWS_AS(multipliers_case_i(c, 0.5, 1.0), DomainError);

  for (double mu : open_grid(-3.0, 0.0, 8)) {
    const auto cc = CurvatureClass::make(mu, 1.0);
    for (double mp : open_grid(0.0, 1.0, 8)) {
      for (double t : open_grid(0.0, 1.0, 12)) {
        const auto mm = multipliers_case_i(cc, mp, t);
        CHECK(mm.b1 >= -1e-12);
        CHECK(mm.b2 >= -1e-12);
        CHECK(1.0 - mm.b1 >= -1e-12);
        CHECK(mm.b1 - mm.b2 == doctest::Approx(rate_pl(cc, mp, t).rho).epsilon(1e-12));
      }
      // The remainder's coefficient (1 - Lt)/(2 alpha) vanishes at 1/L.
      const auto edge = multipliers_case_i(cc, mp, 1.0 - 1e-12);
      CHECK((1.0 - (1.0 - 1e-12)) / (2.0 * edge.alpha) <= 1e-12);
    }
  }
}

TEST_CASE("medium-step multipliers") {
  const auto c = CurvatureClass::make(-1.0, 1.0);
  const auto m = multipliers_case_ii(c, 0.5, 1.0);
  CHECK(m.a1 == doctest::Approx(0.8));
  CHECK(m.a2 == doctest::Approx(0.0));
  CHECK(m.a3 == doctest::Approx(0.4));
  CHECK(m.a4 == doctest::Approx(0.2));
  CHECK(1.0 - m.a3 - m.a4 == doctest::Approx(0.4));
  CHECK_THROWS_AS(multipliers_case_ii(c, 0.5, 0.9), DomainError);
  CHECK_THROWS_AS(multipliers_case_ii(c, 0.5, 1.8), DomainError);

  for (double mu : open_grid(-3.0, 0.0, 8)) {
    const auto cc = CurvatureClass::make(mu, 1.0);
    const double th = step_regime(cc).threshold_high;
    for (double mp : open_grid(0.0, 1.0, 8)) {
      CHECK(multipliers_case_ii(cc, mp, 1.0).a2 == 0.0);
      for (double t : open_grid(1.0, th, 10)) {
        CHECK((1.0 + mu - mp) * t - 2.0 < 0.0);
        const auto mm = multipliers_case_ii(cc, mp, t);
        for (double v : {mm.a1, mm.a2, mm.a3, mm.a4}) CHECK(v >= -1e-12);
        CHECK(1.0 - mm.a3 - mm.a4 == doctest::Approx(rate_pl(cc, mp, t).rho).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("long-step multipliers") {
  const auto c = CurvatureClass::make(-1.0, 1.0);
  const auto m = multipliers_case_iii(c, 0.5, 1.8);
  CHECK(m.beta == doctest::Approx(0.82));
  CHECK(m.rate == doctest::Approx(0.64 / 0.82));
  CHECK(m.rate == doctest::Approx(0.78049).epsilon(1e-5));
  CHECK(multipliers_case_iii(c, 0.5, 2.0 - 1e-10).pl2 <= 1e-9);
  CHECK_THROWS_AS(multipliers_case_iii(c, 0.5, 1.5), DomainError);

  for (double mu : open_grid(-3.0, 0.0, 8)) {
    const auto cc = CurvatureClass::make(mu, 1.0);
    const double th = step_regime(cc).threshold_high;
    for (double mp : open_grid(0.0, 1.0, 8)) {
      for (double t : open_grid(th, 2.0, 10)) {
        const auto mm = multipliers_case_iii(cc, mp, t);
        CHECK(mm.beta > 0.0);
        for (double v : {mm.rate, mm.pl2, mm.interp21, mm.interp12}) CHECK(v >= -1e-12);
        CHECK(mm.rate == doctest::Approx(rate_pl(cc, mp, t).rho).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("functional growth multipliers") {
  auto m = multipliers_qfg(1.0, 0.75, 1);
  CHECK(m.f1_coefficient == doctest::Approx(2.0 + 2.0 / 3.0));
  CHECK(m.bound == doctest::Approx(2.0 / 3.0));
  CHECK_THROWS_AS(multipliers_qfg(1.0, 0.5, 1), DomainError);
  CHECK_THROWS_AS(multipliers_qfg(1.0, 0.75, 0), DomainError);

  for (int N = 1; N <= 5; ++N) {
    for (double mq : open_grid(0.51, 0.99, 20)) {
      const auto w = multipliers_qfg(1.0, mq, N);
      CHECK(w.interp.minCoeff() >= -1e-12);
      CHECK(w.growth.minCoeff() >= -1e-12);
      CHECK(w.f1_coefficient == doctest::Approx(std::pow(2.0, N) * std::pow(1 - mq, N - 1) +
                                                rate_qfg_nstep(1.0, mq, N).rho));
    }
    // Powers of (1 - mu_q / L) with positive exponent vanish as mu_q -> L.
    m = multipliers_qfg(1.0, 1.0 - 1e-9, N);
    for (int i = 2; i <= N; ++i) {
      if (N - i >= 1) CHECK(m.interp(i, N + 1) <= 1e-8);
    }
  }
}

TEST_CASE("certificate identities hold on random samples") {
  CHECK(verify_identity(make_certificate(CertificateCase::PL_CaseII, {-1.0, 1.0, 0.5, 1.0, 1}),
                        1000, 3) <= 1e-10);
  CHECK(verify_identity(make_certificate(CertificateCase::QFG_NStep, {-1.0, 1.0, 0.75, 1.0, 2}),
                        500) <= 1e-9);

  for (Regime r : {Regime::CaseI, Regime::CaseII, Regime::CaseIII}) {
    for (const auto& p : regime_grid(r)) {
      const auto cert = make_certificate(case_of(r), {p.mu, 1.0, p.mu_p, p.t, 1});
      CHECK(verify_identity(cert, 300) <= 1e-9);
    }
  }
  for (int N = 1; N <= 4; ++N) {
    for (double mq : {0.55, 0.7, 0.9}) {
      const auto cert = make_certificate(CertificateCase::QFG_NStep, {-2.0, 2.0, 2 * mq, 0.5, N});
      CHECK(verify_identity(cert, 300) <= 1e-9);
    }
  }
}

TEST_CASE("identity sampling details") {
  const auto cert = make_certificate(CertificateCase::PL_CaseI, {-1.0, 1.0, 0.5, 0.5, 1});
  // All-zero samples make every term vanish.
  CHECK(identity_report(cert, {50, 4, 1, 0.0}).max_abs_residual == 0.0);

  // Doubling every sample at most quadruples the raw residual.
  for (auto kind : {CertificateCase::PL_CaseI, CertificateCase::PL_CaseIII}) {
    const auto c = make_certificate(kind, {-1.0, 1.0, 0.5, kind == CertificateCase::PL_CaseI ? 0.5 : 1.8, 1});
    const double r1 = identity_report(c, {500, 4, 9, 1.0}).max_abs_residual;
    const double r2 = identity_report(c, {500, 4, 9, 2.0}).max_abs_residual;
    CHECK(r2 <= 4.0 * r1 + 1e-12);
  }

  // A wrong multiplier is caught.
  auto broken = make_certificate(CertificateCase::PL_CaseII, {-1.0, 1.0, 0.5, 1.2, 1});
  broken.multipliers[0].value *= 1.001;
  CHECK(verify_identity(broken, 100) > 1e-6);

  CHECK_THROWS_AS(identity_report(cert, {10, 1, 1, 1.0}), DomainError);
  CHECK_THROWS_AS(make_certificate(CertificateCase::PL_CaseI, {-1.0, 1.0, 0.5, 1.5, 1}), DomainError);
  CHECK_THROWS_AS(make_certificate(CertificateCase::QFG_NStep, {-1.0, 1.0, 0.4, 1.0, 1}), DomainError);
}

TEST_CASE("certificates are feasible duals of the matching problem") {
  for (Regime r : {Regime::CaseI, Regime::CaseII, Regime::CaseIII}) {
    for (const auto& p : regime_grid(r)) {
      const auto cert = make_certificate(case_of(r), {p.mu, 1.0, p.mu_p, p.t, 1});
      const auto pep = matching_pep(cert);
      const auto y = dual_vector(cert, pep);
      CHECK(check_dual_feasibility(pep, y) <= 1e-8);
      const double rate = rate_pl(CurvatureClass::make(p.mu, 1.0), p.mu_p, p.t).rho;
      CHECK(std::abs(dual_objective(pep, y) - rate) <= 1e-10);
      CHECK(solve(pep).objective <= rate + 1e-6);
    }
  }
  for (int N = 1; N <= 4; ++N) {
    for (double mq : {0.55, 0.75, 0.95}) {
      const auto cert = make_certificate(CertificateCase::QFG_NStep, {-1.0, 1.0, mq, 1.0, N});
      const auto pep = matching_pep(cert);
      const auto y = dual_vector(cert, pep);
      CHECK(check_dual_feasibility(pep, y) <= 1e-8);
      CHECK(std::abs(dual_objective(pep, y) - rate_qfg_nstep(1.0, mq, N).rho) <= 1e-10);
    }
  }
}

TEST_CASE("certificate_for_pl picks the regime") {
  const auto c = CurvatureClass::make(-1.0, 1.0);
  CHECK(certificate_for_pl(c, 0.5, 0.5).kind == CertificateCase::PL_CaseI);
  CHECK(certificate_for_pl(c, 0.5, 1.0).kind == CertificateCase::PL_CaseII);
  CHECK(certificate_for_pl(c, 0.5, 1.9).kind == CertificateCase::PL_CaseIII);
  CHECK(certificate_for_pl(c, 0.5, 1.0).bound == doctest::Approx(0.4));
  CHECK(std::string(to_string(CertificateCase::QFG_NStep)) == "QFG_NStep");
}

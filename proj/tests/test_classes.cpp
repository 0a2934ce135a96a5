#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "gdcert/classes.hpp"

using namespace gdcert;

namespace {

// Exact samples of f(x) = 0.5 x' diag(d) x.
DataPoint quad_point(const Eigen::VectorXd& d, const Eigen::VectorXd& x) {
  return {x, d.cwiseProduct(x), 0.5 * x.dot(d.cwiseProduct(x))};
}

}  // namespace

TEST_CASE("curvature class validation") {
  CHECK_NOTHROW(validate_class(-1.0, 1.0));
  CHECK_NOTHROW(validate_class(0.0, 1.0));
  CHECK_THROWS_AS(validate_class(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(validate_class(0.5, 1.0), DomainError);
  CHECK_THROWS_AS(validate_class(-1.0, 0.0), DomainError);
  CHECK_THROWS_AS(validate_class(-1.0, -2.0), DomainError);
  CHECK_THROWS_AS(validate_class(std::nan(""), 1.0), DomainError);
  CHECK_THROWS_AS(validate_class(-1.0, std::numeric_limits<double>::infinity()),
                  DomainError);
  const auto c = CurvatureClass::make(-2.0, 3.0);
  CHECK(c.mu() == -2.0);
  CHECK(c.L() == 3.0);
}

TEST_CASE("growth specs enforce their ranges") {
  const auto cls = CurvatureClass::make(-1.0, 1.0);
  CHECK(GrowthSpec::pl(cls, 0.5).constant == 0.5);
  CHECK(GrowthSpec::pl(cls, 1.0).constant == 1.0);
  CHECK_THROWS_AS(GrowthSpec::pl(cls, 0.0), DomainError);
  CHECK_THROWS_AS(GrowthSpec::pl(cls, 1.5), DomainError);
  CHECK_NOTHROW(GrowthSpec::quad_grad_growth(cls, 1.0));
  CHECK_THROWS_AS(GrowthSpec::quad_grad_growth(cls, 1.01), DomainError);
  CHECK_THROWS_AS(GrowthSpec::quad_func_growth(-0.1), DomainError);
  CHECK_NOTHROW(GrowthSpec::quasar(1.0, 0.0));
  CHECK_THROWS_AS(GrowthSpec::quasar(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(GrowthSpec::quasar(1.1, 1.0), DomainError);
  CHECK_THROWS_AS(GrowthSpec::quasar(0.5, -1.0), DomainError);
}

TEST_CASE("function class spec clamps positive curvature") {
  FunctionClassSpec s;
  s.mu = 0.5;
  s.L = 2.0;
  CHECK(s.curvature().mu() == 0.0);
  s.mu = -3.0;
  CHECK(s.curvature().mu() == -3.0);
}

TEST_CASE("interpolation residual") {
  const auto cls = CurvatureClass::make(-1.0, 1.0);

  SUBCASE("identical points give exactly zero") {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> n;
    for (int k = 0; k < 100; ++k) {
      DataPoint p{Eigen::VectorXd::NullaryExpr(3, [&] { return n(rng); }),
                  Eigen::VectorXd::NullaryExpr(3, [&] { return n(rng); }), n(rng)};
      CHECK(interpolation_residual(cls, p, p) == 0.0);
    }
  }

  SUBCASE("x^2/2 sampled at 0 and 1 satisfies both orderings") {
    const Eigen::VectorXd d = Eigen::VectorXd::Ones(1);
    const auto a = quad_point(d, Eigen::VectorXd::Zero(1));
    const auto b = quad_point(d, Eigen::VectorXd::Ones(1));
    // By hand both orderings evaluate to 0.5 - 0.5: tight at curvature L.
    CHECK(interpolation_residual(cls, a, b) <= 1e-15);
    CHECK(interpolation_residual(cls, b, a) <= 1e-15);
  }

  SUBCASE("quadratics with spectrum inside [mu, L]") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::normal_distribution<double> n;
    for (int trial = 0; trial < 50; ++trial) {
      const Eigen::VectorXd d = Eigen::VectorXd::NullaryExpr(4, [&] { return u(rng); });
      std::vector<DataPoint> pts;
      for (int k = 0; k < 5; ++k) {
        pts.push_back(quad_point(d, Eigen::VectorXd::NullaryExpr(4, [&] { return n(rng); })));
      }
      for (const auto& p : pts) {
        for (const auto& q : pts) CHECK(interpolation_residual(cls, p, q) <= 1e-12);
      }
    }
  }

  SUBCASE("too much curvature is detected") {
    const auto convex = CurvatureClass::make(0.0, 1.0);
    const Eigen::VectorXd d = Eigen::VectorXd::Constant(1, 3.0);
    const auto a = quad_point(d, Eigen::VectorXd::Zero(1));
    const auto b = quad_point(d, Eigen::VectorXd::Ones(1));
    CHECK(std::max(interpolation_residual(convex, a, b),
                   interpolation_residual(convex, b, a)) > 0.0);
  }

  SUBCASE("lowering f_i far enough breaks the inequality") {
    const Eigen::VectorXd d = Eigen::VectorXd::Constant(2, 0.5);
    auto a = quad_point(d, Eigen::Vector2d(1.0, -1.0));
    const auto b = quad_point(d, Eigen::Vector2d(-0.5, 2.0));
    CHECK(interpolation_residual(cls, a, b) <= 0.0);
    a.f -= 10.0;
    CHECK(interpolation_residual(cls, a, b) > 0.0);
  }

  CHECK_THROWS_AS(interpolation_residual(cls, {Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(2), 0},
                                         {Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3), 0}),
                  DomainError);
}

TEST_CASE("constant conversions") {
  CHECK(pl_from_quad_grad_growth(CurvatureClass::make(-2.0, 2.0), 1.0) == doctest::Approx(0.5));
  CHECK(pl_from_quad_grad_growth(CurvatureClass::make(-1.0, 1.0), 1.0) == doctest::Approx(1.0));
  CHECK(pl_from_quad_grad_growth(CurvatureClass::make(-4.0, 4.0), 1.0) == doctest::Approx(0.25));
  CHECK_THROWS_AS(pl_from_quad_grad_growth(CurvatureClass::make(-1.0, 1.0), 1.5), DomainError);

  CHECK(qfg_from_pl(0.5) == 0.5);
  CHECK(qfg_from_pl(1.0) == 1.0);
  CHECK(qfg_from_pl(0.01) == 0.01);

  CHECK(qgg_from_qfg(CurvatureClass::make(-1.0, 1.0), 0.75) == doctest::Approx(0.25));
  CHECK(qgg_from_qfg(CurvatureClass::make(0.0, 1.0), 0.5) == doctest::Approx(0.25));
  CHECK_THROWS_AS(qgg_from_qfg(CurvatureClass::make(-1.0, 1.0), 0.5), DomainError);

  CHECK(qgg_from_qfg_star(1.0) == 0.5);
  CHECK(qgg_from_qfg_star(0.5) == 0.25);
  CHECK(qgg_from_qfg_star(2.0) == 1.0);

  CHECK(qgg_from_quasar(1.0, 1.0) == doctest::Approx(0.75));
  CHECK(qgg_from_quasar(1.0, 0.0) == 0.0);
  CHECK(qgg_from_quasar(0.5, 2.0) == doctest::Approx(0.625));

  auto q = quasar_from_qgg(CurvatureClass::make(-1.0, 1.0), 0.75, 1.0);
  CHECK(q.gamma == doctest::Approx(0.75));
  CHECK(q.mu_s == doctest::Approx(0.5));
  q = quasar_from_qgg(CurvatureClass::make(-2.0, 2.0), 1.0, 2.0);
  CHECK(q.gamma == doctest::Approx(0.5));
  CHECK(q.mu_s == doctest::Approx(1.0));
  CHECK_THROWS_AS(quasar_from_qgg(CurvatureClass::make(-1.0, 1.0), 0.4, 0.5), DomainError);

  CHECK(pl_from_quasar(1.0, 1.0) == 1.0);
  CHECK(pl_from_quasar(0.5, 1.0) == doctest::Approx(0.25));
  CHECK(pl_from_quasar(1.0, 0.3) == doctest::Approx(0.3));
}

TEST_CASE("qgg_from_qfg with mu = -L is mu_q - L/2") {
  for (double L : {0.5, 1.0, 3.0}) {
    const auto cls = CurvatureClass::make(-L, L);
    for (int k = 1; k < 50; ++k) {
      const double mu_q = L / 2.0 + L / 2.0 * k / 50.0;
      CHECK(std::abs(qgg_from_qfg(cls, mu_q) - (mu_q - L / 2.0)) <= 1e-15 * (1.0 + L));
    }
  }
}

TEST_CASE("quasar round trip never expands mu_g") {
  for (double L : {1.0, 2.0}) {
    const auto cls = CurvatureClass::make(-L, L);
    for (int i = 1; i <= 20; ++i) {
      const double mu_g = L * i / 20.0;
      for (double factor : {1.01, 1.5, 2.0, 10.0}) {
        const double ell = std::max(L / 2.0, mu_g) * factor;
        const auto q = quasar_from_qgg(cls, mu_g, ell);
        const double back = qgg_from_quasar(q.gamma, q.mu_s);
        CHECK(back <= mu_g + 1e-12);
        CHECK(q.gamma > 0.0);
        CHECK(q.gamma < 1.0);
        CHECK(q.mu_s > 0.0);
        // Every route lands in (0, L].
        const double via_quasar = pl_from_quasar(q.gamma, q.mu_s);
        CHECK(via_quasar > 0.0);
        CHECK(via_quasar <= L);
        const double via_qgg = pl_from_quad_grad_growth(cls, mu_g);
        CHECK(via_qgg > 0.0);
        CHECK(via_qgg <= L);
      }
    }
  }
}

TEST_CASE("PL constant from one-step contraction") {
  const auto cls = CurvatureClass::make(-1.0, 1.0);
  // f = x^2/2: one step with t = 1/L lands on the minimiser, gamma = 0.
  const double mp = pl_from_linear_convergence(cls, 0.0);
  CHECK(mp == doctest::Approx(1.0 / 3.0));
  for (double x : {-2.0, 0.3, 5.0}) {
    const double gap = 0.5 * x * x;
    CHECK(gap <= x * x / (2.0 * mp) + 1e-15);
  }
  CHECK(pl_from_linear_convergence(cls, 1.0 - 1e-12) < 1e-11);
  CHECK_THROWS_AS(pl_from_linear_convergence(cls, 1.0), DomainError);
  CHECK_THROWS_AS(pl_from_linear_convergence(cls, -0.1), DomainError);

  // Convex quadratics with spectrum in (0, 1]: contraction at t = 1 is
  // max (1 - d)^2, and the returned constant must satisfy PL at random points.
  const auto convex = CurvatureClass::make(0.0, 1.0);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 1.0);
  std::normal_distribution<double> n;
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::Vector3d d(u(rng), u(rng), u(rng));
    const double gamma = (Eigen::Vector3d::Ones() - d).array().square().maxCoeff();
    const double m = pl_from_linear_convergence(convex, gamma);
    CHECK(m > 0.0);
    const Eigen::Vector3d x(n(rng), n(rng), n(rng));
    const double gap = 0.5 * x.dot(d.cwiseProduct(x));
    CHECK(gap <= d.cwiseProduct(x).squaredNorm() / (2.0 * m) * (1.0 + 1e-12));
  }
}

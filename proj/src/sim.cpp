#include "gdcert/sim.hpp"

#include <cmath>
#include <limits>
#include <ostream>

namespace gdcert {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

void record(Trajectory& tr, const TestFunction& f, const Eigen::VectorXd& x,
            Eigen::VectorXd& g) {
  const double fx = f.eval(x);
  g = f.grad(x);
  const double gn = g.norm();
  if (!x.allFinite() || !std::isfinite(fx) || !std::isfinite(gn)) {
    throw DivergenceError(f.id + ": non-finite value at iterate " +
                          std::to_string(tr.iterates.size() + 1));
  }
  tr.iterates.push_back(x);
  tr.fvals.push_back(fx);
  tr.gnorms.push_back(gn);
}

void check_start(const TestFunction& f, const Eigen::VectorXd& x1) {
  require(x1.size() == f.dim, f.id + ": start point has dimension " +
                                  std::to_string(x1.size()) + ", expected " +
                                  std::to_string(f.dim));
  require(x1.allFinite(), "start point must be finite");
}

}  // namespace

Trajectory gd_run(const TestFunction& f, const Eigen::VectorXd& x1,
                  std::span<const double> schedule) {
  check_start(f, x1);
  require(!schedule.empty(), "schedule must not be empty");
  for (double t : schedule) {
    require(std::isfinite(t) && t > 0.0, "step lengths must be positive");
  }
  Trajectory tr;
  Eigen::VectorXd x = x1;
  Eigen::VectorXd g;
  record(tr, f, x, g);
  for (double t : schedule) {
    x -= t * g;
    record(tr, f, x, g);
    tr.schedule.push_back(t);
  }
  return tr;
}

Trajectory fgm_run(const TestFunction& f, const Eigen::VectorXd& x1, double L,
                   double mu_p, int N) {
  check_start(f, x1);
  require(std::isfinite(L) && L > 0.0, "L must be positive");
  require(std::isfinite(mu_p) && mu_p > 0.0 && mu_p <= L, "mu_p must lie in (0, L]");
  require(N >= 1, "N must be >= 1");
  const double momentum = (std::sqrt(L) - std::sqrt(mu_p)) / (std::sqrt(L) + std::sqrt(mu_p));

  Trajectory tr;
  Eigen::VectorXd x = x1;
  Eigen::VectorXd y = x1;
  Eigen::VectorXd g;
  record(tr, f, x, g);
  for (int k = 1; k <= N; ++k) {
    const Eigen::VectorXd y_next = x - g / L;
    x = y_next + momentum * (y_next - y);
    y = y_next;
    record(tr, f, x, g);
    tr.schedule.push_back(1.0 / L);
  }
  return tr;
}

double convergence_cutoff(double f_star) { return 1e-14 * (1.0 + std::abs(f_star)); }

std::vector<StepRatio> empirical_rate(const Trajectory& traj, double f_star) {
  std::vector<StepRatio> out;
  const double cutoff = convergence_cutoff(f_star);
  for (std::size_t k = 0; k + 1 < traj.fvals.size(); ++k) {
    const double den = traj.fvals[k] - f_star;
    if (den < cutoff) continue;
    out.push_back({static_cast<int>(k), (traj.fvals[k + 1] - f_star) / den});
  }
  return out;
}

double estimate_pl_constant(const TestFunction& f, const GridSpec& grid) {
  const Box& box = grid.box.lo.size() ? grid.box : f.domain_box;
  require(box.lo.size() == f.dim && box.hi.size() == f.dim,
          "grid box dimension does not match the function");
  require(grid.points_per_axis >= 1, "grid needs at least one point per axis");
  const int n = grid.points_per_axis;

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> idx(f.dim, 0);
  Eigen::VectorXd x(f.dim);
  while (true) {
    for (int d = 0; d < f.dim; ++d) {
      x(d) = n == 1 ? 0.5 * (box.lo(d) + box.hi(d))
                    : box.lo(d) + (box.hi(d) - box.lo(d)) * idx[d] / (n - 1);
    }
    const double gap = f.eval(x) - f.f_star;
    if (gap >= 1e-12) best = std::min(best, f.grad(x).squaredNorm() / (2.0 * gap));
    int d = 0;
    while (d < f.dim && ++idx[d] == n) idx[d++] = 0;
    if (d == f.dim) break;
  }
  require(std::isfinite(best), f.id + ": no grid point above the optimal value");
  return best;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj, double f_star) {
  const auto old = os.precision(17);
  os << "iteration,f_gap,grad_norm\n";
  for (std::size_t k = 0; k < traj.fvals.size(); ++k) {
    os << k + 1 << ',' << traj.fvals[k] - f_star << ',' << traj.gnorms[k] << '\n';
  }
  os.precision(old);
}

}  // namespace gdcert

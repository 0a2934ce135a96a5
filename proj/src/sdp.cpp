#include "gdcert/sdp.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <iostream>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace gdcert {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();

// <M, X> for symmetric M and arbitrary X.
double dot(const MatrixXd& M, const MatrixXd& X) {
  return (M.array() * X.array()).sum();
}

MatrixXd sym(const MatrixXd& X) { return 0.5 * (X + X.transpose()); }

double min_eig(const MatrixXd& X) {
  if (X.size() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(sym(X), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// Largest alpha with X + alpha dX PSD, given X positive definite.
double max_step_psd(const MatrixXd& X, const MatrixXd& dX) {
  if (X.size() == 0) return kInf;
  Eigen::LLT<MatrixXd> llt(X);
  if (llt.info() != Eigen::Success) return 0.0;
  MatrixXd W = llt.matrixL().solve(sym(dX));
  W = llt.matrixL().solve(W.transpose()).transpose();
  const double lo = min_eig(W);
  return lo < 0.0 ? -1.0 / lo : kInf;
}

double max_step_pos(const VectorXd& x, const VectorXd& dx) {
  double a = kInf;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (dx(i) < 0.0) a = std::min(a, -x(i) / dx(i));
  }
  return a;
}

// Dense copies of the problem data.
struct Data {
  int n = 0;  // Gram dimension
  int m = 0;  // inequalities
  int p = 0;  // free function values
  std::vector<MatrixXd> M;
  MatrixXd C;  // m x p
  VectorXd d;  // m
  VectorXd a;  // p

  explicit Data(const PepProblem& prob)
      : n(prob.gram_dim),
        m(static_cast<int>(prob.constraints.size())),
        p(prob.n_fvals),
        C(m, p),
        d(m),
        a(prob.objective) {
    M.reserve(m);
    for (int i = 0; i < m; ++i) {
      const auto& c = prob.constraints[i];
      M.push_back(sym(c.gram));
      C.row(i) = c.fcoef.transpose();
      d(i) = c.constant;
    }
  }

  VectorXd apply(const MatrixXd& G) const {
    VectorXd out(m);
    for (int i = 0; i < m; ++i) out(i) = dot(M[i], G);
    return out;
  }

  MatrixXd adjoint(const VectorXd& y) const {
    MatrixXd S = MatrixXd::Zero(n, n);
    for (int i = 0; i < m; ++i) S += y(i) * M[i];
    return S;
  }
};

struct Iterate {
  MatrixXd G, S;
  VectorXd f, s, lam;
};

struct Direction {
  MatrixXd dG, dS;
  VectorXd df, ds, dlam;
};

void validate(const PepProblem& p) {
  if (p.gram_dim < 0 || p.n_fvals < 0 ||
      p.objective.size() != p.n_fvals ||
      static_cast<int>(p.basis_labels.size()) != p.gram_dim) {
    throw DomainError("solve: malformed problem dimensions");
  }
  for (const auto& c : p.constraints) {
    if (c.gram.rows() != p.gram_dim || c.gram.cols() != p.gram_dim ||
        c.fcoef.size() != p.n_fvals) {
      throw DomainError("solve: constraint '" + c.label + "' has wrong shape");
    }
    if (c.gram.size() == 0) continue;
    const double asym = (c.gram - c.gram.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * (1.0 + c.gram.cwiseAbs().maxCoeff())) {
      throw DomainError("solve: constraint '" + c.label + "' is not symmetric");
    }
  }
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::MaxIter: return "max_iter";
  }
  return "?";
}

double dual_objective(const PepProblem& p, const VectorXd& duals) {
  if (duals.size() != static_cast<Eigen::Index>(p.constraints.size())) {
    throw DomainError("dual vector length does not match constraint count");
  }
  double v = 0.0;
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    v -= duals(i) * p.constraints[i].constant;
  }
  return v;
}

double check_dual_feasibility(const PepProblem& p, const VectorXd& duals) {
  if (duals.size() != static_cast<Eigen::Index>(p.constraints.size())) {
    throw DomainError("dual vector length does not match constraint count");
  }
  double worst = 0.0;
  if (duals.size() > 0) worst = std::max(worst, -duals.minCoeff());

  VectorXd coef = -p.objective;
  MatrixXd S = MatrixXd::Zero(p.gram_dim, p.gram_dim);
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    coef += duals(i) * p.constraints[i].fcoef;
    S += duals(i) * p.constraints[i].gram;
  }
  if (coef.size() > 0) worst = std::max(worst, coef.cwiseAbs().maxCoeff());
  worst = std::max(worst, -min_eig(S));
  return worst;
}

SdpSolution solve(const PepProblem& prob, const SolverOptions& opts) {
  validate(prob);
  const Data D(prob);
  const int n = D.n, m = D.m, p = D.p;
  const double nu = static_cast<double>(n + m);

  const double scale_d = 1.0 + (m > 0 ? D.d.cwiseAbs().maxCoeff() : 0.0);
  const double scale_a = 1.0 + (p > 0 ? D.a.cwiseAbs().maxCoeff() : 0.0);

  Iterate x;
  x.G = MatrixXd::Identity(n, n);
  x.S = MatrixXd::Identity(n, n);
  x.f = VectorXd::Zero(p);
  x.s = VectorXd::Ones(m);
  x.lam = VectorXd::Ones(m);
  {
    // Lift the slack so the initial primal residual is moderate.
    const VectorXd r = D.apply(x.G) + D.d;
    const double shift = std::max(1.0, r.size() ? r.cwiseAbs().maxCoeff() : 0.0);
    x.s.setConstant(shift);
    x.G *= std::sqrt(shift);
  }

  SdpSolution out;
  out.status = SolveStatus::MaxIter;

  auto finish = [&](SolveStatus status, int iter) {
    out.status = status;
    out.iterations = iter;
    out.G = x.G;
    out.fvals = x.f;
    out.duals = x.lam;
    out.objective = p > 0 ? D.a.dot(x.f) : 0.0;
    out.dual_objective = m > 0 ? -D.d.dot(x.lam) : 0.0;
    out.gap = out.dual_objective - out.objective;
    const VectorXd viol = D.apply(x.G) + D.C * x.f + D.d;
    out.primal_residual = m > 0 ? std::max(0.0, viol.maxCoeff()) : 0.0;
    out.dual_residual = check_dual_feasibility(prob, x.lam);
    return out;
  };

  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const VectorXd rp = D.apply(x.G) + D.C * x.f + x.s + D.d;
    const MatrixXd RS = D.adjoint(x.lam) - x.S;
    const VectorXd rd = D.C.transpose() * x.lam - D.a;
    const double comp = dot(x.G, x.S) + x.s.dot(x.lam);
    const double mu = comp / nu;

    const double pobj = p > 0 ? D.a.dot(x.f) : 0.0;
    const double dobj = m > 0 ? -D.d.dot(x.lam) : 0.0;
    const double pinf = rp.size() ? rp.cwiseAbs().maxCoeff() / scale_d : 0.0;
    const double dinf = std::max(RS.size() ? RS.cwiseAbs().maxCoeff() : 0.0,
                                 rd.size() ? rd.cwiseAbs().maxCoeff() : 0.0) /
                        scale_a;
    const double rel_gap = comp / (1.0 + std::abs(pobj) + std::abs(dobj));

    if (opts.verbose) {
      std::clog << std::scientific << std::setprecision(3) << "sdp it " << iter
                << " pobj " << pobj << " dobj " << dobj << " pinf " << pinf
                << " dinf " << dinf << " gap " << rel_gap << "\n";
    }

    if (pinf <= opts.feas_tol && dinf <= opts.feas_tol &&
        rel_gap <= opts.gap_tol) {
      return finish(SolveStatus::Optimal, iter);
    }

    // Infeasibility: lam / |lam| approaches a Farkas ray with d . lam > 0,
    // C^T lam = 0 and sum lam_i M_i PSD.
    const double lam_norm = m > 0 ? x.lam.cwiseAbs().maxCoeff() : 0.0;
    if (lam_norm > 1e8) {
      const VectorXd ray = x.lam / lam_norm;
      const double gain = D.d.dot(ray);
      if (gain > 0.0) {
        const double resid = std::max(
            p > 0 ? (D.C.transpose() * ray).cwiseAbs().maxCoeff() : 0.0,
            -min_eig(D.adjoint(ray)));
        if (resid <= 1e-6 * gain) return finish(SolveStatus::Infeasible, iter);
      }
    }
    // Unboundedness: (G, f) / |(G, f)| approaches a recession direction with
    // a . f > 0 along which every constraint stays satisfied.
    const double primal_norm =
        std::max(x.G.cwiseAbs().maxCoeff(), p > 0 ? x.f.cwiseAbs().maxCoeff() : 0.0);
    if (primal_norm > 1e8) {
      const MatrixXd Gr = x.G / primal_norm;
      const VectorXd fr = x.f / primal_norm;
      const double gain = p > 0 ? D.a.dot(fr) : 0.0;
      if (gain > 0.0) {
        const VectorXd lhs = D.apply(Gr) + D.C * fr;
        const double resid = m > 0 ? std::max(0.0, lhs.maxCoeff()) : 0.0;
        if (resid <= 1e-6 * gain) return finish(SolveStatus::Unbounded, iter);
      }
    }

    // Normal equations. H_ij = <M_i, G M_j S^{-1}>.
    Eigen::LLT<MatrixXd> S_llt(x.S);
    if (S_llt.info() != Eigen::Success) break;
    const MatrixXd S_inv = S_llt.solve(MatrixXd::Identity(n, n));
    std::vector<MatrixXd> B(m);
    for (int j = 0; j < m; ++j) B[j] = x.G * D.M[j] * S_inv;
    MatrixXd K(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        const double h = 0.5 * (dot(D.M[i], B[j]) + dot(D.M[j], B[i]));
        K(i, j) = h;
        K(j, i) = h;
      }
      K(i, i) += x.s(i) / x.lam(i);
    }
    Eigen::LLT<MatrixXd> K_llt(K);
    if (K_llt.info() != Eigen::Success) {
      K.diagonal().array() += 1e-14 * (1.0 + K.diagonal().cwiseAbs().maxCoeff());
      K_llt.compute(K);
      if (K_llt.info() != Eigen::Success) break;
    }
    const MatrixXd KinvC = K_llt.solve(D.C);
    const MatrixXd schur = D.C.transpose() * KinvC;
    const Eigen::FullPivLU<MatrixXd> schur_lu(schur);

    // Reduced system  -K dlam + C df = q,  C^T dlam = r.
    auto reduced = [&](const VectorXd& q, const VectorXd& r, VectorXd& dlam,
                       VectorXd& df) {
      const VectorXd Kq = K_llt.solve(q);
      df = p > 0 ? VectorXd(schur_lu.solve(r + D.C.transpose() * Kq)) : VectorXd(0);
      dlam = KinvC * df - Kq;
    };

    // Direction for complementarity targets (Rc, rc). The reduced system is
    // refined against the unreduced linearised equations, which keeps the
    // primal residual shrinking when K becomes ill-conditioned.
    const MatrixXd G_RS = x.G * RS;
    auto direction = [&](const MatrixXd& Rc, const VectorXd& rc) {
      const MatrixXd T = (Rc - G_RS) * S_inv;
      VectorXd u(m);
      for (int i = 0; i < m; ++i) u(i) = dot(D.M[i], T) + rc(i) / x.lam(i);
      Direction dir;
      reduced(-rp - u, -rd, dir.dlam, dir.df);
      auto expand = [&] {
        dir.dS = D.adjoint(dir.dlam) + RS;
        dir.dG = sym((Rc - x.G * dir.dS) * S_inv);
        dir.ds = (rc.array() - x.s.array() * dir.dlam.array()) / x.lam.array();
      };
      expand();
      for (int round = 0; round < 2; ++round) {
        const VectorXd e1 = D.apply(dir.dG) + D.C * dir.df + dir.ds + rp;
        const VectorXd e2 = D.C.transpose() * dir.dlam + rd;
        VectorXd dl, dfc;
        reduced(-e1, -e2, dl, dfc);
        dir.dlam += dl;
        if (p > 0) dir.df += dfc;
        expand();
      }
      return dir;
    };
    auto step_lengths = [&](const Direction& dir) {
      const double ap = std::min({1.0, max_step_psd(x.G, dir.dG),
                                  max_step_pos(x.s, dir.ds)});
      const double ad = std::min({1.0, max_step_psd(x.S, dir.dS),
                                  max_step_pos(x.lam, dir.dlam)});
      return std::pair{ap, ad};
    };

    // Predictor.
    const MatrixXd GS = x.G * x.S;
    const VectorXd slam = (x.s.array() * x.lam.array()).matrix();
    const Direction aff = direction(-GS, -slam);
    const auto [ap_aff, ad_aff] = step_lengths(aff);
    const double mu_aff =
        (dot(x.G + ap_aff * aff.dG, x.S + ad_aff * aff.dS) +
         (x.s + ap_aff * aff.ds).dot(x.lam + ad_aff * aff.dlam)) /
        nu;
    const double sigma = std::clamp(std::pow(mu_aff / mu, 3.0), 0.0, 1.0);

    // Corrector.
    const MatrixXd Rc = sigma * mu * MatrixXd::Identity(n, n) - GS - aff.dG * aff.dS;
    const VectorXd rc = (sigma * mu - slam.array() - aff.ds.array() * aff.dlam.array()).matrix();
    const Direction dir = direction(Rc, rc);
    auto [ap, ad] = step_lengths(dir);
    constexpr double kFraction = 0.95;
    ap = std::min(1.0, kFraction * ap);
    ad = std::min(1.0, kFraction * ad);

    x.G = sym(x.G + ap * dir.dG);
    x.f += ap * dir.df;
    x.s += ap * dir.ds;
    x.S = sym(x.S + ad * dir.dS);
    x.lam += ad * dir.dlam;

    if (!x.G.allFinite() || !x.S.allFinite() || !x.lam.allFinite() ||
        !x.s.allFinite() || !x.f.allFinite()) {
      break;
    }
    out.iterations = iter + 1;
  }
  return finish(SolveStatus::MaxIter, out.iterations);
}

}  // namespace gdcert

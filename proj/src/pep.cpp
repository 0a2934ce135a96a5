#include "gdcert/pep.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace gdcert {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

// Linear combination of the Gram basis vectors.
using Coeffs = Eigen::VectorXd;

// Affine function of the free function values: f . v + k.
struct FValue {
  Eigen::VectorXd f;
  double k = 0.0;
};

struct Point {
  std::string name;
  Coeffs x;
  Coeffs g;
  FValue f;
};

// Gram matrix M with <M, G> = <u, v> for the vectors u, v.
Eigen::MatrixXd inner(const Coeffs& u, const Coeffs& v) {
  return 0.5 * (u * v.transpose() + v * u.transpose());
}

class Builder {
 public:
  Builder(std::vector<std::string> basis, std::vector<std::string> fvals,
          std::string pinned) {
    p_.gram_dim = static_cast<int>(basis.size());
    p_.n_fvals = static_cast<int>(fvals.size());
    p_.basis_labels = std::move(basis);
    p_.fval_labels = std::move(fvals);
    p_.pinned = std::move(pinned);
    p_.objective = Eigen::VectorXd::Zero(p_.n_fvals);
  }

  Coeffs zero() const { return Coeffs::Zero(p_.gram_dim); }
  Coeffs unit(int i) const { return Coeffs::Unit(p_.gram_dim, i); }
  FValue constant(double k) const { return {Eigen::VectorXd::Zero(p_.n_fvals), k}; }
  FValue variable(int i) const { return {Eigen::VectorXd::Unit(p_.n_fvals, i), 0.0}; }

  void add(std::string label, Eigen::MatrixXd gram, const FValue& rest) {
    p_.constraints.push_back({std::move(gram), rest.f, rest.k, std::move(label)});
  }

  // F_{mu,L} interpolation inequality for the ordered pair (i, j), written
  // as LHS - RHS <= 0 with one division by 2(1 - mu/L).
  void interpolation(double mu, double L, const Point& pi, const Point& pj) {
    const Coeffs dg = pi.g - pj.g;
    const Coeffs dx = pi.x - pj.x;
    Eigen::MatrixXd M = (inner(dg, dg) / L + mu * inner(dx, dx) -
                         (2.0 * mu / L) * inner(dg, dx)) /
                        (2.0 * (1.0 - mu / L));
    M += inner(pj.g, dx);
    add("interp(" + pi.name + "," + pj.name + ")", std::move(M),
        {pj.f.f - pi.f.f, pj.f.k - pi.f.k});
  }

  void nonnegative(const std::string& name, const FValue& f) {
    add("nonneg(" + name + ")", Eigen::MatrixXd::Zero(p_.gram_dim, p_.gram_dim),
        {-f.f, -f.k});
  }

  void maximize(int i) { p_.objective(i) = 1.0; }

  PepProblem finish() { return std::move(p_); }

 private:
  PepProblem p_;
};

std::string idx(const char* prefix, int k) {
  return prefix + std::to_string(k);
}

}  // namespace

int PepProblem::find(const std::string& label) const {
  for (std::size_t i = 0; i < constraints.size(); ++i) {
    if (constraints[i].label == label) return static_cast<int>(i);
  }
  return -1;
}

PepProblem build_pep_pl(const CurvatureClass& cls, double mu_p, double t) {
  const double L = cls.L();
  require(std::isfinite(t) && t > 0.0 && t < 2.0 / L,
          "step length must lie in (0, 2/L)");
  require(std::isfinite(mu_p) && mu_p > 0.0 && mu_p <= L,
          "mu_p must lie in (0, L]");

  Builder b({"g1", "g2"}, {"f2"}, "");
  const Coeffs g1 = b.unit(0);
  const Coeffs g2 = b.unit(1);
  // Only gradients enter once x2 - x1 = -t g1 is substituted, so positions
  // are expressed in the same basis.
  const Point p1{"x1", b.zero(), g1, b.constant(1.0)};
  const Point p2{"x2", -t * g1, g2, b.variable(0)};

  b.interpolation(cls.mu(), L, p2, p1);
  b.interpolation(cls.mu(), L, p1, p2);
  for (const Point* p : {&p1, &p2}) {
    b.add("pl(" + p->name + ")", -inner(p->g, p->g) / (2.0 * mu_p), p->f);
  }
  b.nonnegative("f2", p2.f);
  b.maximize(0);
  return b.finish();
}

PepProblem build_pep_qgg(double L, double mu_g) {
  require(std::isfinite(L) && L > 0.0, "L must be positive");
  require(std::isfinite(mu_g) && mu_g > 0.0 && mu_g <= L,
          "mu_g must lie in (0, L]");
  const double mu = -L;

  Builder b({"g1", "g2", "y1", "y2"}, {"f2"}, "x1");
  const Coeffs g1 = b.unit(0);
  const Point x1{"x1", b.zero(), g1, b.constant(1.0)};
  const Point x2{"x2", -g1 / L, b.unit(1), b.variable(0)};
  const Point y1{"y1", b.unit(2), b.zero(), b.constant(0.0)};
  const Point y2{"y2", b.unit(3), b.zero(), b.constant(0.0)};

  const std::vector<const Point*> pts{&x1, &x2, &y1, &y2};
  for (const Point* pi : pts) {
    for (const Point* pj : pts) {
      if (pi != pj) b.interpolation(mu, L, *pi, *pj);
    }
  }
  // <g, x - y> >= mu_g |x - y|^2
  for (auto [x, y] : {std::pair{&x1, &y1}, std::pair{&x2, &y2}}) {
    const Coeffs d = x->x - y->x;
    b.add("growth(" + x->name + ")", mu_g * inner(d, d) - inner(x->g, d),
          b.constant(0.0));
  }
  // y^k is the projection of x^k onto the solution set.
  auto projection = [&](const Point& x, const Point& own, const Point& other) {
    const Coeffs a = x.x - own.x;
    const Coeffs c = x.x - other.x;
    b.add("proj(" + x.name + ";" + own.name + "," + other.name + ")",
          inner(a, a) - inner(c, c), b.constant(0.0));
  };
  projection(x1, y1, y2);
  projection(x2, y2, y1);
  b.nonnegative("f2", x2.f);
  b.maximize(0);
  return b.finish();
}

PepProblem build_pep_qfg(double L, double mu_q, int N, int max_N) {
  require(std::isfinite(L) && L > 0.0, "L must be positive");
  require(std::isfinite(mu_q) && mu_q > L / 2.0 && mu_q < L,
          "mu_q must lie in (L/2, L)");
  require(N >= 1, "N must be >= 1");
  require(N <= max_N, "N exceeds the configured maximum of " +
                          std::to_string(max_N) + " steps");
  const double mu = -L;
  const int K = N + 1;

  std::vector<std::string> basis;
  for (int k = 1; k <= K; ++k) basis.push_back(idx("g", k));
  for (int k = 1; k <= K; ++k) basis.push_back(idx("y", k));
  std::vector<std::string> fvals;
  for (int k = 2; k <= K; ++k) fvals.push_back(idx("f", k));
  Builder b(basis, fvals, "x1");

  std::vector<Point> xs;
  std::vector<Point> ys;
  Coeffs x = b.zero();
  for (int k = 1; k <= K; ++k) {
    const Coeffs g = b.unit(k - 1);
    xs.push_back({idx("x", k), x, g, k == 1 ? b.constant(1.0) : b.variable(k - 2)});
    x -= g / L;
  }
  for (int k = 1; k <= K; ++k) {
    ys.push_back({idx("y", k), b.unit(K + k - 1), b.zero(), b.constant(0.0)});
  }

  std::vector<const Point*> pts;
  for (const auto& p : xs) pts.push_back(&p);
  for (const auto& p : ys) pts.push_back(&p);
  for (const Point* pi : pts) {
    for (const Point* pj : pts) {
      if (pi != pj) b.interpolation(mu, L, *pi, *pj);
    }
  }
  // f^k - f* >= (mu_q / 2) |x^k - y^k|^2
  for (int k = 0; k < K; ++k) {
    const Coeffs d = xs[k].x - ys[k].x;
    b.add("growth(" + xs[k].name + ")", 0.5 * mu_q * inner(d, d),
          {-xs[k].f.f, -xs[k].f.k});
  }
  for (int k = 0; k < K; ++k) {
    for (int kk = 0; kk < K; ++kk) {
      if (k == kk) continue;
      const Coeffs a = xs[k].x - ys[k].x;
      const Coeffs c = xs[k].x - ys[kk].x;
      b.add("proj(" + xs[k].name + ";" + ys[k].name + "," + ys[kk].name + ")",
            inner(a, a) - inner(c, c), b.constant(0.0));
    }
  }
  for (int k = 1; k < K; ++k) b.nonnegative(fvals[k - 1], xs[k].f);
  b.maximize(N - 1);
  return b.finish();
}

// Format:
//   pep 1
//   gram_dim <n>
//   n_fvals <m>
//   basis <label>...
//   fvals <label>...
//   pinned <label or ->
//   objective <m numbers>
//   constraints <count>
//   <label> <constant> <m f-coefficients> <n*n gram entries, row-major>
void write_problem(std::ostream& os, const PepProblem& p) {
  const auto old_precision = os.precision(17);
  os << "pep 1\n";
  os << "gram_dim " << p.gram_dim << "\n";
  os << "n_fvals " << p.n_fvals << "\n";
  os << "basis";
  for (const auto& s : p.basis_labels) os << ' ' << s;
  os << "\nfvals";
  for (const auto& s : p.fval_labels) os << ' ' << s;
  os << "\npinned " << (p.pinned.empty() ? "-" : p.pinned) << "\n";
  os << "objective";
  for (int i = 0; i < p.n_fvals; ++i) os << ' ' << p.objective(i);
  os << "\nconstraints " << p.constraints.size() << "\n";
  for (const auto& c : p.constraints) {
    os << c.label << ' ' << c.constant;
    for (int i = 0; i < p.n_fvals; ++i) os << ' ' << c.fcoef(i);
    for (int r = 0; r < p.gram_dim; ++r) {
      for (int s = 0; s < p.gram_dim; ++s) os << ' ' << c.gram(r, s);
    }
    os << "\n";
  }
  os.precision(old_precision);
}

PepProblem read_problem(std::istream& is) {
  auto expect = [&](const char* key) {
    std::string word;
    if (!(is >> word) || word != key) {
      throw std::runtime_error(std::string("read_problem: expected '") + key + "'");
    }
  };
  auto labels = [&](const char* key, int n) {
    expect(key);
    std::vector<std::string> out(n);
    for (auto& s : out) is >> s;
    return out;
  };

  PepProblem p;
  int version = 0;
  expect("pep");
  is >> version;
  if (version != 1) throw std::runtime_error("read_problem: unsupported version");
  expect("gram_dim");
  is >> p.gram_dim;
  expect("n_fvals");
  is >> p.n_fvals;
  if (!is || p.gram_dim < 0 || p.n_fvals < 0) {
    throw std::runtime_error("read_problem: bad dimensions");
  }
  p.basis_labels = labels("basis", p.gram_dim);
  p.fval_labels = labels("fvals", p.n_fvals);
  expect("pinned");
  is >> p.pinned;
  if (p.pinned == "-") p.pinned.clear();
  expect("objective");
  p.objective.resize(p.n_fvals);
  for (int i = 0; i < p.n_fvals; ++i) is >> p.objective(i);
  std::size_t count = 0;
  expect("constraints");
  is >> count;
  for (std::size_t k = 0; k < count && is; ++k) {
    PepConstraint c;
    is >> c.label >> c.constant;
    c.fcoef.resize(p.n_fvals);
    for (int i = 0; i < p.n_fvals; ++i) is >> c.fcoef(i);
    c.gram.resize(p.gram_dim, p.gram_dim);
    for (int r = 0; r < p.gram_dim; ++r) {
      for (int s = 0; s < p.gram_dim; ++s) is >> c.gram(r, s);
    }
    p.constraints.push_back(std::move(c));
  }
  if (!is) throw std::runtime_error("read_problem: truncated input");
  return p;
}

}  // namespace gdcert

#include "gdcert/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <ostream>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "gdcert/certify.hpp"
#include "gdcert/classes.hpp"
#include "gdcert/pep.hpp"
#include "gdcert/rates.hpp"
#include "gdcert/sdp.hpp"
#include "gdcert/sim.hpp"

namespace gdcert::cli {
namespace {

using Row = nlohmann::ordered_json;

void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

std::string number(double v, int digits) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

std::string cell(const Row& v, int digits) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_float()) return number(v.get<double>(), digits);
  if (v.is_null()) return "nan";
  return v.dump();
}

void emit(std::ostream& os, const std::string& format, const std::vector<Row>& rows) {
  if (rows.empty()) return;
  std::vector<std::string> keys;
  for (const auto& item : rows.front().items()) keys.push_back(item.key());

  if (format == "json") {
    os << (rows.size() == 1 ? Row(rows.front()) : Row(rows)).dump(2) << "\n";
    return;
  }
  if (format == "csv") {
    for (std::size_t k = 0; k < keys.size(); ++k) os << (k ? "," : "") << keys[k];
    os << "\n";
    for (const auto& r : rows) {
      for (std::size_t k = 0; k < keys.size(); ++k) {
        os << (k ? "," : "") << cell(r.at(keys[k]), 17);
      }
      os << "\n";
    }
    return;
  }
  std::vector<std::vector<std::string>> cells;
  std::vector<std::size_t> width(keys.size());
  for (std::size_t k = 0; k < keys.size(); ++k) width[k] = keys[k].size();
  for (const auto& r : rows) {
    auto& line = cells.emplace_back();
    for (std::size_t k = 0; k < keys.size(); ++k) {
      line.push_back(cell(r.at(keys[k]), 10));
      width[k] = std::max(width[k], line.back().size());
    }
  }
  auto print = [&](const std::vector<std::string>& line) {
    for (std::size_t k = 0; k < line.size(); ++k) {
      os << (k ? "  " : "") << std::string(width[k] - line[k].size(), ' ') << line[k];
    }
    os << "\n";
  };
  print(keys);
  for (const auto& line : cells) print(line);
}

// Runs fn(0..n-1) on a small thread pool; rethrows the first failure.
template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next++) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < threads; ++k) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

SolverOptions solver_options() {
  SolverOptions opts;
  const char* level = std::getenv("GDCERT_LOG");
  opts.verbose = level && *level && std::string(level) != "0";
  return opts;
}

void add_format(CLI::App* app, std::string& format) {
  app->add_option("--format", format, "Output format")
      ->check(CLI::IsMember({"csv", "json", "table"}));
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path);
  require(static_cast<bool>(file), "cannot write '" + path + "'");
  return file;
}

struct Settings {
  std::string format = "table";
  double mu = -1.0;
  double L = 1.0;
  double mu_p = 0.5;
  double mu_g = 0.5;
  double mu_q = 0.75;
  int N = 1;
  int max_N = 10;
  std::vector<double> t;
  int t_grid = 0;
  bool certificate = false;
  std::string problem_out;
  int points = 50;
  double lo = 0.05;
  double hi = 0.95;
  unsigned threads = 0;
  std::string out;
  std::string cert_case;
  int samples = 1000;
  int dim = 4;
  std::uint64_t seed = IdentityOptions{}.seed;
  double tol = 1e-9;
  std::string function;
  std::vector<double> start;
  std::string method = "gd";
  int steps = 20;
  bool list = false;
};

int cmd_bound(const Settings& s, std::ostream& out) {
  const auto cls = CurvatureClass::make(s.mu, s.L);
  std::vector<double> ts = s.t;
  if (s.t_grid > 0) {
    for (int k = 1; k <= s.t_grid; ++k) ts.push_back(2.0 * k / (s.L * (s.t_grid + 1)));
  }
  if (ts.empty()) ts.push_back(1.0 / s.L);
  for (double t : ts) rate_pl(cls, s.mu_p, t);  // validate everything up front

  std::vector<Row> rows(ts.size());
  parallel_for(ts.size(), s.threads, [&](std::size_t i) {
    const auto b = rate_pl(cls, s.mu_p, ts[i]);
    rows[i] = Row{{"t", ts[i]},
                  {"regime", to_string(b.regime)},
                  {"rate", b.rho},
                  {"polyak", rate_pl_polyak(s.L, s.mu_p, ts[i]).rho}};
  });
  emit(out, s.format, rows);
  return kOk;
}

int cmd_step(const Settings& s, std::ostream& out) {
  const auto cls = CurvatureClass::make(s.mu, s.L);
  const double t = optimal_step(cls, s.mu_p);
  const auto b = rate_pl(cls, s.mu_p, t);
  emit(out, s.format,
       {Row{{"mu", s.mu}, {"L", s.L}, {"mup", s.mu_p}, {"t_star", t},
            {"rate", b.rho}, {"regime", to_string(b.regime)}}});
  return kOk;
}

int cmd_pep(const std::string& kind, const Settings& s, std::ostream& out,
            std::ostream& err) {
  PepProblem pep;
  double closed = 0.0;
  std::optional<Certificate> cert;
  if (kind == "pl") {
    const auto cls = CurvatureClass::make(s.mu, s.L);
    const double t = s.t.empty() ? 1.0 / s.L : s.t.front();
    require(s.t.size() <= 1, "pep pl takes a single step length");
    closed = rate_pl(cls, s.mu_p, t).rho;
    pep = build_pep_pl(cls, s.mu_p, t);
    if (s.certificate) cert = certificate_for_pl(cls, s.mu_p, t);
  } else if (kind == "qgg") {
    closed = rate_qgg(s.L, s.mu_g).rho;
    pep = build_pep_qgg(s.L, s.mu_g);
    require(!s.certificate, "no certificate is known for the qgg problem");
  } else {
    closed = rate_qfg_nstep(s.L, s.mu_q, s.N).rho;
    pep = build_pep_qfg(s.L, s.mu_q, s.N, s.max_N);
    if (s.certificate) {
      cert = make_certificate(CertificateCase::QFG_NStep, {-s.L, s.L, s.mu_q, 1.0 / s.L, s.N});
    }
  }
  if (!s.problem_out.empty()) {
    auto file = open_output(s.problem_out);
    write_problem(file, pep);
  }

  const auto sol = solve(pep, solver_options());
  Row row{{"problem", kind},
          {"objective", sol.objective},
          {"dual_objective", sol.dual_objective},
          {"closed_form", closed},
          {"gap", closed - sol.objective},
          {"status", to_string(sol.status)},
          {"iterations", sol.iterations}};
  if (cert) {
    const auto y = dual_vector(*cert, pep);
    row["certificate_objective"] = dual_objective(pep, y);
    row["certificate_residual"] = check_dual_feasibility(pep, y);
  }
  emit(out, s.format, {row});
  if (sol.status != SolveStatus::Optimal) {
    err << "error: solver finished with status " << to_string(sol.status) << "\n";
    return kFailure;
  }
  return kOk;
}

int cmd_figure1(const Settings& s, std::ostream& out, std::ostream& err) {
  require(s.points >= 1, "--points must be >= 1");
  require(s.lo > 0.0 && s.hi < 1.0 && s.lo <= s.hi,
          "grid must satisfy 0 < lo <= hi < 1");
  std::vector<double> grid(s.points);
  for (int k = 0; k < s.points; ++k) {
    grid[k] = s.points == 1 ? s.lo : s.lo + (s.hi - s.lo) * k / (s.points - 1);
  }
  std::ofstream file;
  if (!s.out.empty() && s.out != "-") file = open_output(s.out);
  std::ostream& dest = file.is_open() ? static_cast<std::ostream&>(file) : out;

  std::vector<SdpSolution> sols(grid.size());
  const auto opts = solver_options();
  parallel_for(grid.size(), s.threads,
               [&](std::size_t i) { sols[i] = solve(build_pep_qgg(1.0, grid[i]), opts); });

  int bad = 0;
  dest << "ratio,pep_bound,closed_bound\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double closed = rate_qgg(1.0, grid[i]).rho;
    dest << number(grid[i], 17) << ',' << number(sols[i].objective, 17) << ','
         << number(closed, 17) << '\n';
    if (sols[i].status != SolveStatus::Optimal) {
      err << "error: ratio " << grid[i] << ": solver status "
          << to_string(sols[i].status) << "\n";
      ++bad;
    } else if (sols[i].objective > closed + 1e-6) {
      err << "error: ratio " << grid[i] << ": performance estimate exceeds the bound\n";
      ++bad;
    }
  }
  if (file.is_open()) out << "wrote " << grid.size() << " rows to " << s.out << "\n";
  return bad ? kFailure : kOk;
}

CertificateCase parse_case(const std::string& name) {
  if (name == "case-i" || name == "PL_CaseI") return CertificateCase::PL_CaseI;
  if (name == "case-ii" || name == "PL_CaseII") return CertificateCase::PL_CaseII;
  if (name == "case-iii" || name == "PL_CaseIII") return CertificateCase::PL_CaseIII;
  if (name == "qfg" || name == "QFG_NStep") return CertificateCase::QFG_NStep;
  throw DomainError("unknown certificate case '" + name + "'");
}

int cmd_certify(const Settings& s, std::ostream& out, std::ostream& err) {
  const auto kind = parse_case(s.cert_case);
  CertificateParams prm{s.mu, s.L, s.mu_p, s.t.empty() ? 1.0 / s.L : s.t.front(), s.N};
  if (kind == CertificateCase::QFG_NStep) prm.constant = s.mu_q;
  const auto cert = make_certificate(kind, prm);
  const auto pep = matching_pep(cert);
  const auto y = dual_vector(cert, pep);
  const auto rep = identity_report(cert, {s.samples, s.dim, s.seed, 1.0});
  const double dual_res = check_dual_feasibility(pep, y);
  const bool ok = rep.max_residual <= s.tol && dual_res <= 1e-8;
  emit(out, s.format,
       {Row{{"case", to_string(kind)},
            {"bound", cert.bound},
            {"identity_residual", rep.max_residual},
            {"dual_residual", dual_res},
            {"dual_objective", dual_objective(pep, y)},
            {"samples", rep.samples},
            {"verdict", ok ? "pass" : "fail"}}});
  if (!ok) err << "error: certificate check failed\n";
  return ok ? kOk : kFailure;
}

int cmd_simulate(const Settings& s, std::ostream& out, std::ostream& err) {
  if (s.list) {
    std::vector<Row> rows;
    for (const auto& f : builtin_zoo()) {
      const auto& k = f.known_constants;
      rows.push_back(Row{{"id", f.id}, {"dim", f.dim}, {"mu", k.mu}, {"L", k.L},
                         {"mup", k.mu_p.value_or(NAN)}, {"description", f.description}});
    }
    emit(out, s.format, rows);
    return kOk;
  }
  require(!s.function.empty(), "--function is required (see --list)");
  const TestFunction f = zoo_function(s.function);
  const auto& k = f.known_constants;
  require(s.steps >= 1, "--steps must be >= 1");
  require(s.method == "gd" || s.method == "fgm", "--method must be gd or fgm");

  Eigen::VectorXd x1(f.dim);
  if (!s.start.empty()) {
    require(static_cast<int>(s.start.size()) == f.dim,
            "--start needs " + std::to_string(f.dim) + " coordinates");
    for (int i = 0; i < f.dim; ++i) x1(i) = s.start[i];
  } else {
    std::mt19937_64 rng(s.seed);
    for (int i = 0; i < f.dim; ++i) {
      x1(i) = std::uniform_real_distribution<double>(f.start_box.lo(i), f.start_box.hi(i))(rng);
    }
  }

  Row verdict{{"function", f.id}, {"method", s.method}};
  bool ok = true;
  Trajectory tr;
  if (s.method == "gd") {
    const double t = s.t.empty() ? 1.0 / k.L : s.t.front();
    require(s.t.size() <= 1, "simulate takes a single step length");
    const auto cls = k.curvature();
    require(k.mu_p.has_value(), f.id + " has no known PL constant");
    const double bound = rate_pl(cls, *k.mu_p, t).rho;
    const std::vector<double> schedule(s.steps, t);
    tr = gd_run(f, x1, schedule);
    double worst = 0.0;
    for (const auto& r : empirical_rate(tr, f.f_star)) worst = std::max(worst, r.ratio);
    ok = worst <= bound + 1e-10;
    verdict["t"] = t;
    verdict["max_ratio"] = worst;
    verdict["bound"] = bound;
    verdict["polyak"] = rate_pl_polyak(k.L, *k.mu_p, t).rho;
  } else {
    const double mu_p = k.mu_p.value_or(0.0);
    tr = fgm_run(f, x1, k.L, mu_p, s.steps);
    const Eigen::VectorXd g1 = f.grad(x1);
    const Eigen::VectorXd expect = x1 - 2.0 / (k.L + std::sqrt(k.L * mu_p)) * g1;
    const double gn = g1.norm();
    const double res = (tr.iterates[1] - expect).norm() / (gn > 0.0 ? gn : 1.0);
    ok = res <= 1e-12;
    verdict["first_step_residual"] = res;
    verdict["final_gap"] = tr.fvals.back() - f.f_star;
  }
  verdict["verdict"] = ok ? "pass" : "fail";

  if (!s.out.empty() && s.out != "-") {
    auto file = open_output(s.out);
    write_trajectory_csv(file, tr, f.f_star);
    emit(out, s.format, {verdict});
  } else {
    write_trajectory_csv(out, tr, f.f_star);
    emit(err, "csv", {verdict});
  }
  return ok ? kOk : kFailure;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Worst-case rates of the gradient method under growth conditions", "gdcert"};
  app.require_subcommand(1);
  Settings s;

  auto add_class = [&](CLI::App* c) {
    c->add_option("--mu", s.mu, "Lower curvature bound (<= 0)");
    c->add_option("--L", s.L, "Upper curvature bound (> 0)");
  };

  auto* bound = app.add_subcommand("bound", "One-step PL bound and the classical bound");
  add_class(bound);
  bound->add_option("--mup", s.mu_p, "PL constant");
  bound->add_option("--t", s.t, "Step length(s)");
  bound->add_option("--t-grid", s.t_grid, "Evenly spaced steps in (0, 2/L)");
  bound->add_option("--threads", s.threads, "Worker threads (0 = all cores)");
  add_format(bound, s.format);

  auto* step = app.add_subcommand("step", "Step length minimising the PL bound");
  add_class(step);
  step->add_option("--mup", s.mu_p, "PL constant");
  add_format(step, s.format);

  auto* pep = app.add_subcommand("pep", "Solve a performance estimation problem");
  pep->require_subcommand(1);
  auto* pep_pl = pep->add_subcommand("pl", "One step under the PL inequality");
  add_class(pep_pl);
  pep_pl->add_option("--mup", s.mu_p, "PL constant");
  pep_pl->add_option("--t", s.t, "Step length");
  auto* pep_qgg = pep->add_subcommand("qgg", "One step t = 1/L under gradient growth");
  pep_qgg->add_option("--L", s.L, "Smoothness constant");
  pep_qgg->add_option("--mug", s.mu_g, "Quadratic gradient growth constant");
  auto* pep_qfg = pep->add_subcommand("qfg", "N steps t = 1/L under functional growth");
  pep_qfg->add_option("--L", s.L, "Smoothness constant");
  pep_qfg->add_option("--muq", s.mu_q, "Quadratic functional growth constant");
  pep_qfg->add_option("--N", s.N, "Number of steps");
  pep_qfg->add_option("--max-N", s.max_N, "Largest N accepted");
  for (auto* c : {pep_pl, pep_qgg, pep_qfg}) {
    add_format(c, s.format);
    c->add_option("--write-problem", s.problem_out, "Also write the SDP data here");
  }
  pep_pl->add_flag("--certificate", s.certificate, "Check the closed-form multipliers");
  pep_qfg->add_flag("--certificate", s.certificate, "Check the closed-form multipliers");

  auto* fig = app.add_subcommand("figure1", "PEP bound versus closed form under gradient growth");
  fig->add_option("--points", s.points, "Grid size");
  fig->add_option("--lo", s.lo, "Smallest mu_g / L");
  fig->add_option("--hi", s.hi, "Largest mu_g / L");
  fig->add_option("--out", s.out, "CSV destination (- for stdout)");
  fig->add_option("--threads", s.threads, "Worker threads (0 = all cores)");

  auto* certify = app.add_subcommand("certify", "Check a closed-form certificate");
  certify->add_option("--case", s.cert_case, "case-i, case-ii, case-iii or qfg")->required();
  add_class(certify);
  certify->add_option("--mup", s.mu_p, "PL constant");
  certify->add_option("--t", s.t, "Step length");
  certify->add_option("--muq", s.mu_q, "Quadratic functional growth constant");
  certify->add_option("--N", s.N, "Number of steps");
  certify->add_option("--samples", s.samples, "Random samples");
  certify->add_option("--dim", s.dim, "Sample dimension");
  certify->add_option("--seed", s.seed, "Random seed");
  certify->add_option("--tol", s.tol, "Largest accepted normalised residual");
  add_format(certify, s.format);

  auto* sim = app.add_subcommand("simulate", "Run a method on a built-in test function");
  sim->add_flag("--list", s.list, "List the built-in functions");
  sim->add_option("--function", s.function, "Function id");
  sim->add_option("--start", s.start, "Start point, comma separated")->delimiter(',');
  sim->add_option("--seed", s.seed, "Seed for a random start point");
  sim->add_option("--method", s.method, "gd or fgm");
  sim->add_option("--t", s.t, "Step length (gd)");
  sim->add_option("--steps", s.steps, "Number of iterations");
  sim->add_option("--out", s.out, "Trajectory CSV destination (- for stdout)");
  add_format(sim, s.format);

  std::reverse(args.begin(), args.end());
  try {
    app.parse(std::move(args));
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*bound) return cmd_bound(s, out);
    if (*step) return cmd_step(s, out);
    if (*pep_pl) return cmd_pep("pl", s, out, err);
    if (*pep_qgg) return cmd_pep("qgg", s, out, err);
    if (*pep_qfg) return cmd_pep("qfg", s, out, err);
    if (*fig) return cmd_figure1(s, out, err);
    if (*certify) return cmd_certify(s, out, err);
    if (*sim) return cmd_simulate(s, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}

}  // namespace gdcert::cli

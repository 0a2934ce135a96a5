#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gdcert/classes.hpp"
#include "gdcert/pep.hpp"

namespace gdcert {

enum class CertificateCase { PL_CaseI, PL_CaseII, PL_CaseIII, QFG_NStep };

const char* to_string(CertificateCase c);

struct CertificateParams {
  double mu = -1.0;
  double L = 1.0;
  double constant = 0.5;  // mu_p for the PL cases, mu_q for QFG_NStep
  double t = 1.0;         // PL cases only; QFG uses t = 1/L
  int N = 1;              // QFG only
};

/// Weight on one PEP constraint, identified by its label in the matching
/// PepProblem (e.g. "interp(x1,x2)", "pl(x2)", "growth(x3)").
struct Multiplier {
  std::string label;
  double value;
};

/// Explicit Lagrange multipliers proving  f_last - f* <= bound (f^1 - f*).
struct Certificate {
  CertificateCase kind;
  CertificateParams params;
  double bound;
  std::vector<Multiplier> multipliers;
};

struct CaseIMultipliers {
  double b1;
  double b2;
  double alpha;
};
/// Short steps, t in (0, 1/L).
CaseIMultipliers multipliers_case_i(const CurvatureClass& cls, double mu_p,
                                    double t);

struct CaseIIMultipliers {
  double a1;  // interp(x1,x2)
  double a2;  // interp(x2,x1)
  double a3;  // pl(x1)
  double a4;  // pl(x2)
};
/// Medium steps, t in [1/L, threshold_high].
CaseIIMultipliers multipliers_case_ii(const CurvatureClass& cls, double mu_p,
                                      double t);

struct CaseIIIMultipliers {
  double beta;      // (Lt - 1)^2 + mu_p t (2 - Lt)
  double rate;      // (Lt - 1)^2 / beta
  double pl2;       // mu_p t (2 - Lt) / beta
  double interp21;  // (Lt - 1)(2 - Lt) / beta
  double interp12;  // (Lt - 1) / beta
};
/// Long steps, t in (threshold_high, 2/L).
CaseIIIMultipliers multipliers_case_iii(const CurvatureClass& cls, double mu_p,
                                        double t);

struct QfgMultipliers {
  int N;
  /// interp(i, j) is the weight on interp(y_i, x_j); 1-based, i in 1..N,
  /// j in 1..N+1, zero where unused.
  Eigen::MatrixXd interp;
  /// growth(j), j in 1..N+1 (1-based, entry 0 unused).
  Eigen::VectorXd growth;
  double f1_coefficient;  // == growth(1)
  double bound;
};
QfgMultipliers multipliers_qfg(double L, double mu_q, int N);

/// Builds the certificate of the given case; throws DomainError when the
/// parameters are outside that case's regime.
Certificate make_certificate(CertificateCase kind, const CertificateParams& params);

/// PL certificate for the regime that `t` falls in.
Certificate certificate_for_pl(const CurvatureClass& cls, double mu_p, double t);

/// The PEP whose constraint labels the certificate refers to.
PepProblem matching_pep(const Certificate& cert);

/// Dense dual vector for `pep` (zero on constraints the certificate skips).
Eigen::VectorXd dual_vector(const Certificate& cert, const PepProblem& pep);

struct IdentityOptions {
  int n_samples = 1000;
  int dim = 4;
  std::uint64_t seed = 20220411;
  double scale = 1.0;  // multiplies every sampled vector and value
};

struct IdentityReport {
  double max_residual = 0.0;      // |LHS - RHS| / (1 + largest term)
  double max_abs_residual = 0.0;  // |LHS - RHS|
  int samples = 0;
};

/// Samples random gradients, positions and function values, evaluates the
/// multiplier-weighted combination of constraint expressions and compares it
/// with the closed-form non-positive remainder of the certificate.
IdentityReport identity_report(const Certificate& cert, const IdentityOptions& opts);

double verify_identity(const Certificate& cert, int n_samples = 1000, int dim = 4,
                       std::uint64_t seed = IdentityOptions{}.seed);

}  // namespace gdcert

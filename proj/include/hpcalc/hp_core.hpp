#pragma once

#include "hpcalc/measures.hpp"
#include "hpcalc/quadrature.hpp"
#include "hpcalc/semigroup.hpp"

namespace hpcalc {

struct Evaluation {
  Vec value;
  IntegralReport report;
};

struct BlockEvaluation {
  Mat value;
  IntegralReport report;
};

struct DomainVerdict {
  bool member = false;
  /// Report of int ||T(t) x|| d|a|(t).
  IntegralReport report;
};

/// g(A) x = int_0^inf T(t) x da(t). Throws NotInDomain on divergence.
Evaluation hp_apply(const HalfLineMeasure& a, const Generator& A,
                    const Vec& x, const QuadratureSpec& spec = {});

/// hp_apply on every column of X with one shared quadrature.
BlockEvaluation hp_apply_block(const HalfLineMeasure& a, const Generator& A,
                               const Mat& X, const QuadratureSpec& spec = {});

DomainVerdict in_domain(const HalfLineMeasure& a, const Generator& A,
                        const Vec& x, const QuadratureSpec& spec = {});

struct NormCertificate {
  double bound = kInf;
  bool certified = false;
};

/// Upper bound on int ||T(t)|| d|a|(t).
NormCertificate bounded_norm_certificate(const HalfLineMeasure& a,
                                         const Generator& A,
                                         const QuadratureSpec& spec = {});

/// ||A g(A) x - g(A) A x|| / max(1, ||g(A) A x||).
double commutation_residual(const HalfLineMeasure& a, const Generator& A,
                            const Vec& x, const QuadratureSpec& spec = {});

/// f(n) T(n) x - f(0+) x - int_0^n T(t) x f'(t) dt.
Vec apply_via_parts(const StieltjesFunction& f, const Generator& A,
                    const Vec& x, double n, const QuadratureSpec& spec = {});

/// int_0^n T(t) (A x) f(t) dt, the left-hand side of the parts formula.
Vec parts_direct(const StieltjesFunction& f, const Generator& A, const Vec& x,
                 double n, const QuadratureSpec& spec = {});

/// S x = int_0^inf T(t) x df(t). Throws NotInDomain on divergence.
Evaluation s_operator(const StieltjesFunction& f, const Generator& A,
                      const Vec& x, const QuadratureSpec& spec = {});

struct LimitResult {
  Vec value;
  bool converged = false;
};

/// Strong limit of f(n) T(n) x along n = 1, 2, 4, ..., 2^20.
LimitResult limit_fT(const std::function<double(double)>& f,
                     const Generator& A, const Vec& x);

/// Throws the error matching a failed report.
void raise_on_failure(const IntegralReport& report, const std::string& what);

/// Column-stacked view used for block integrands.
Vec flatten(const Mat& X);
Mat unflatten(const Vec& v, Eigen::Index rows, Eigen::Index cols);

}  // namespace hpcalc

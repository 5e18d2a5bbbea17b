#pragma once

#include <memory>
#include <string>

#include "hpcalc/bernstein.hpp"
#include "hpcalc/measures.hpp"
#include "hpcalc/semigroup.hpp"

namespace hpcalc {

/// Scalar symbol g evaluated on the spectrum. Principal branches throughout:
/// (-s)^p and log(1 - s) use the cut of std::pow / std::log, i.e. the
/// continuation from s < 0 that avoids the ray s >= 0 (resp. s >= 1).
struct ScalarFunction {
  enum class Kind {
    Reciprocal,          // 1/s
    NegPower,            // (-s)^-alpha
    BernsteinNegPower,   // -(-s)^beta
    LogShift,            // -log(1 - s)
    ReciprocalLogShift,  // -1/log(1 - s)
    LogInverse,          // 1/log(1 - s)
    LaplaceOfMeasure,    // La(s), closed forms only
    BernsteinOf,         // psi(s), closed form only
    Product,             // lhs(s) * rhs(s)
  };

  Kind kind = Kind::Reciprocal;
  double param = 0.0;
  std::shared_ptr<const HalfLineMeasure> measure;
  std::shared_ptr<const BernsteinFunction> psi;
  std::shared_ptr<const ScalarFunction> lhs;
  std::shared_ptr<const ScalarFunction> rhs;

  static ScalarFunction reciprocal();
  static ScalarFunction neg_power(double alpha);
  static ScalarFunction bernstein_neg_power(double beta);
  static ScalarFunction log_shift();
  static ScalarFunction reciprocal_log_shift();
  static ScalarFunction log_inverse();
  static ScalarFunction laplace_of(HalfLineMeasure a);
  static ScalarFunction bernstein_of(BernsteinFunction psi);
  static ScalarFunction product(ScalarFunction g, ScalarFunction h);

  std::string name() const;
};

cplx scalar_eval(const ScalarFunction& g, cplx lambda);

struct OracleResult {
  Mat value;
  /// kappa(V) * eps * max |g(lambda)| * ||X||, a first-order error scale.
  double error_bound = 0.0;
};

/// V diag(g(lambda)) V^-1 X.
OracleResult spectral_apply(const ScalarFunction& g, const Generator& A,
                            const Mat& X);
Vec spectral_apply(const ScalarFunction& g, const Generator& A, const Vec& x);

}  // namespace hpcalc

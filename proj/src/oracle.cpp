#include "hpcalc/oracle.hpp"

#include <cmath>
#include <limits>

namespace hpcalc {

namespace {

ScalarFunction tagged(ScalarFunction::Kind kind, double param = 0.0) {
  ScalarFunction g;
  g.kind = kind;
  g.param = param;
  return g;
}

void domain(bool ok, const std::string& what) {
  require(ok, ErrorKind::DomainError, what);
}

}  // namespace

ScalarFunction ScalarFunction::reciprocal() { return tagged(Kind::Reciprocal); }
ScalarFunction ScalarFunction::neg_power(double alpha) {
  return tagged(Kind::NegPower, alpha);
}
ScalarFunction ScalarFunction::bernstein_neg_power(double beta) {
  return tagged(Kind::BernsteinNegPower, beta);
}
ScalarFunction ScalarFunction::log_shift() { return tagged(Kind::LogShift); }
ScalarFunction ScalarFunction::reciprocal_log_shift() {
  return tagged(Kind::ReciprocalLogShift);
}
ScalarFunction ScalarFunction::log_inverse() { return tagged(Kind::LogInverse); }

ScalarFunction ScalarFunction::laplace_of(HalfLineMeasure a) {
  ScalarFunction g = tagged(Kind::LaplaceOfMeasure);
  g.measure = std::make_shared<const HalfLineMeasure>(std::move(a));
  return g;
}

ScalarFunction ScalarFunction::bernstein_of(BernsteinFunction psi) {
  ScalarFunction g = tagged(Kind::BernsteinOf);
  g.psi = std::make_shared<const BernsteinFunction>(std::move(psi));
  return g;
}

ScalarFunction ScalarFunction::product(ScalarFunction g, ScalarFunction h) {
  ScalarFunction p = tagged(Kind::Product);
  p.lhs = std::make_shared<const ScalarFunction>(std::move(g));
  p.rhs = std::make_shared<const ScalarFunction>(std::move(h));
  return p;
}

std::string ScalarFunction::name() const {
  switch (kind) {
    case Kind::Reciprocal: return "1/s";
    case Kind::NegPower: return "(-s)^-" + std::to_string(param);
    case Kind::BernsteinNegPower: return "-(-s)^" + std::to_string(param);
    case Kind::LogShift: return "-log(1-s)";
    case Kind::ReciprocalLogShift: return "-1/log(1-s)";
    case Kind::LogInverse: return "1/log(1-s)";
    case Kind::LaplaceOfMeasure: return "L(" + measure->label() + ")";
    case Kind::BernsteinOf: return psi->label();
    case Kind::Product: return lhs->name() + "*" + rhs->name();
  }
  return "?";
}

cplx scalar_eval(const ScalarFunction& g, cplx lambda) {
  using K = ScalarFunction::Kind;
  const bool half_plane = lambda.real() <= 0.0;
  switch (g.kind) {
    case K::Reciprocal:
      domain(lambda != 0.0, "1/s at s = 0");
      return 1.0 / lambda;
    case K::NegPower:
      domain(lambda != 0.0 && half_plane, "(-s)^-alpha off its principal domain");
      return std::pow(-lambda, -g.param);
    case K::BernsteinNegPower:
      domain(half_plane, "-(-s)^beta off its principal domain");
      return -std::pow(-lambda, g.param);
    case K::LogShift:
      domain(half_plane, "-log(1-s) off its principal domain");
      return -std::log(1.0 - lambda);
    case K::ReciprocalLogShift:
    case K::LogInverse: {
      domain(half_plane && lambda != 0.0, "1/log(1-s) at a branch point");
      const cplx v = 1.0 / std::log(1.0 - lambda);
      return g.kind == K::LogInverse ? v : -v;
    }
    case K::LaplaceOfMeasure: {
      domain(lambda.real() < 0.0, "La(s) needs Re s < 0");
      const auto v = laplace_closed_form(*g.measure, lambda);
      domain(v.has_value(), "measure " + g.measure->label() + " has no closed-form transform");
      return *v;
    }
    case K::BernsteinOf:
      domain(half_plane, "psi(s) needs Re s <= 0");
      domain(static_cast<bool>(g.psi->closed_form()),
             "Bernstein function " + g.psi->label() + " has no closed form");
      return g.psi->closed_form()(lambda);
    case K::Product:
      return scalar_eval(*g.lhs, lambda) * scalar_eval(*g.rhs, lambda);
  }
  fail(ErrorKind::DomainError, "unknown scalar function");
}

OracleResult spectral_apply(const ScalarFunction& g, const Generator& A,
                            const Mat& X) {
  require(X.rows() == A.dim(), ErrorKind::InvalidArgument,
          "vector dimension does not match the generator");
  const Mat& V = A.eigenvectors();
  const Mat& Vinv = A.eigenvectors_inverse();
  const auto& lambda = A.eigenvalues();
  Eigen::VectorXcd gl(lambda.size());
  double gmax = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    gl(i) = scalar_eval(g, lambda(i));
    gmax = std::max(gmax, std::abs(gl(i)));
  }
  OracleResult r;
  r.value = V * (gl.asDiagonal() * (Vinv * X));
  r.error_bound = A.condition() * std::numeric_limits<double>::epsilon() *
                  static_cast<double>(A.dim()) * gmax * X.norm();
  return r;
}

Vec spectral_apply(const ScalarFunction& g, const Generator& A, const Vec& x) {
  return spectral_apply(g, A, Mat(x)).value.col(0);
}

}  // namespace hpcalc

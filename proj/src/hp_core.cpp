#include "hpcalc/hp_core.hpp"

#include <cmath>

namespace hpcalc {

Vec flatten(const Mat& X) {
  return Eigen::Map<const Vec>(X.data(), X.size());
}

Mat unflatten(const Vec& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Mat>(v.data(), rows, cols);
}

void raise_on_failure(const IntegralReport& report, const std::string& what) {
  if (report.converged) return;
  const std::string msg = what + ": " + std::string(to_string(report.diagnosis));
  if (report.diagnosis == Diagnosis::PanelBudgetExceeded) {
    throw Error(ErrorKind::PanelBudgetExceeded, msg, report.diagnosis);
  }
  throw Error(ErrorKind::NotInDomain, msg, report.diagnosis);
}

namespace {

void check_dims(const Generator& A, Eigen::Index rows) {
  require(rows == A.dim(), ErrorKind::InvalidArgument,
          "vector dimension does not match the generator");
}

double max_col_norm(const Mat& X) {
  double m = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) m = std::max(m, X.col(j).norm());
  return m;
}

}  // namespace

BlockEvaluation hp_apply_block(const HalfLineMeasure& a, const Generator& A,
                               const Mat& X, const QuadratureSpec& spec) {
  A.require_bounded("hp_apply");
  check_dims(A, X.rows());
  const Eigen::Index n = X.rows();
  const Eigen::Index k = X.cols();
  IntegrandHint hint;
  hint.growth = A.growth_bound(max_col_norm(X));
  hint.increment = [&A, &X](double t) { return flatten(A.apply_increment(t, X)); };
  // The value integral accumulates int ||T(t)X|| d|a| window by window, so
  // its verdict is the Bochner (absolute) convergence test.
  const auto report = integrate_halfline(
      [&A, &X](double t) { return flatten(A.apply(t, X)); }, a, spec, hint);
  raise_on_failure(report, "hp_apply");
  return {unflatten(report.value, n, k), report};
}

Evaluation hp_apply(const HalfLineMeasure& a, const Generator& A,
                    const Vec& x, const QuadratureSpec& spec) {
  auto block = hp_apply_block(a, A, Mat(x), spec);
  return {block.value.col(0), block.report};
}

DomainVerdict in_domain(const HalfLineMeasure& a, const Generator& A,
                        const Vec& x, const QuadratureSpec& spec) {
  A.require_bounded("in_domain");
  check_dims(A, x.size());
  IntegrandHint hint;
  hint.growth = A.growth_bound(x.norm());
  const Vec x0 = x;
  hint.increment = [&A, x0](double t) {
    return Vec::Constant(1, A.apply(t, x0).norm() - x0.norm());
  };
  DomainVerdict v;
  v.report = integrate_halfline(
      [&A, x0](double t) { return Vec::Constant(1, A.apply(t, x0).norm()); },
      a.absolute(), spec, hint);
  v.member = v.report.converged;
  return v;
}

NormCertificate bounded_norm_certificate(const HalfLineMeasure& a,
                                         const Generator& A,
                                         const QuadratureSpec& spec) {
  A.require_bounded("bounded_norm_certificate");
  IntegrandHint hint;
  hint.growth = A.growth_bound(1.0);
  hint.increment = [&A](double t) {
    return Vec::Constant(1, A.semigroup_norm(t) - 1.0);
  };
  const auto report = integrate_halfline(
      [&A](double t) { return Vec::Constant(1, A.semigroup_norm(t)); },
      a.absolute(), spec, hint);
  NormCertificate c;
  c.certified = report.converged;
  if (c.certified) c.bound = report.value(0).real() + report.error_estimate;
  return c;
}

double commutation_residual(const HalfLineMeasure& a, const Generator& A,
                            const Vec& x, const QuadratureSpec& spec) {
  const Vec Ax = A.matrix() * x;
  const Vec gx = hp_apply(a, A, x, spec).value;
  const Vec gAx = hp_apply(a, A, Ax, spec).value;
  return (A.matrix() * gx - gAx).norm() / std::max(1.0, gAx.norm());
}

Vec apply_via_parts(const StieltjesFunction& f, const Generator& A,
                    const Vec& x, double n, const QuadratureSpec& spec) {
  A.require_bounded("apply_via_parts");
  check_dims(A, x.size());
  require(n > 0.0, ErrorKind::InvalidArgument, "n must be positive");
  require(f.value_at_zero.has_value(), ErrorKind::PreconditionFailed,
          "integration by parts needs a finite f(0+)");
  const auto rep = integrate_interval(
      [&A, &x](double t) { return A.apply(t, x); }, f.derivative_measure(),
      0.0, n, spec);
  raise_on_failure(rep, "apply_via_parts");
  return f.value(n) * A.apply(n, x) - *f.value_at_zero * x - rep.value;
}

Vec parts_direct(const StieltjesFunction& f, const Generator& A, const Vec& x,
                 double n, const QuadratureSpec& spec) {
  A.require_bounded("parts_direct");
  check_dims(A, x.size());
  const Vec Ax = A.matrix() * x;
  auto fv = f.value;
  const auto m = measure::from_density(
      density::custom([fv](double t) { return cplx(fv(t)); }, 0.0,
                      TailClass::compact(n)),
      "f");
  const auto rep = integrate_interval(
      [&A, &Ax](double t) { return A.apply(t, Ax); }, m, 0.0, n, spec);
  raise_on_failure(rep, "parts_direct");
  return rep.value;
}

Evaluation s_operator(const StieltjesFunction& f, const Generator& A,
                      const Vec& x, const QuadratureSpec& spec) {
  A.require_bounded("s_operator");
  check_dims(A, x.size());
  IntegrandHint hint;
  hint.growth = A.growth_bound(x.norm());
  const auto rep = integrate_stieltjes(
      [&A, &x](double t) { return A.apply(t, x); }, f, spec, hint);
  raise_on_failure(rep, "s_operator");
  return {rep.value, rep};
}

LimitResult limit_fT(const std::function<double(double)>& f,
                     const Generator& A, const Vec& x) {
  A.require_bounded("limit_fT");
  check_dims(A, x.size());
  const double tol = 1e-9 * std::max(x.norm(), 1e-300);
  std::vector<Vec> window;
  LimitResult out;
  out.value = Vec::Zero(x.size());
  for (int k = 0; k <= 20; ++k) {
    const double n = std::ldexp(1.0, k);
    const double fn = f(n);
    const Vec tx = A.apply(n, x);
    if (!std::isfinite(fn)) break;
    const Vec v = fn * tx;
    if (!v.allFinite()) break;
    window.push_back(v);
    out.value = v;
    if (window.size() > 4) window.erase(window.begin());
    if (window.size() == 4) {
      double spread = 0.0;
      for (const Vec& w : window) spread = std::max(spread, (w - v).norm());
      if (spread <= tol) {
        out.converged = true;
        return out;
      }
    }
  }
  return out;
}

}  // namespace hpcalc

#include "hpcalc/bernstein.hpp"

#include <cmath>

namespace hpcalc {

namespace {

constexpr double kSeriesCut = 1e-4;

// (e^{su} - 1) / u with the removable singularity handled by series.
double bernstein_kernel(double s, double u) {
  const double z = s * u;
  if (std::abs(z) < kSeriesCut) return s * (1.0 + z / 2.0 + z * z / 6.0);
  return std::expm1(z) / u;
}

void check_rho(const HalfLineMeasure& rho) {
  for (const Atom& at : rho.atoms()) {
    require(at.weight.imag() == 0.0 && at.weight.real() >= 0.0,
            ErrorKind::InvalidArgument, "rho atoms must be nonnegative");
  }
  if (!rho.density()) return;
  const Density& d = *rho.density();
  require(d.real_nonnegative, ErrorKind::InvalidArgument,
          "rho density must be real and nonnegative");
  // int_1^inf u^-1 drho < inf
  const TailClass& tc = d.tail;
  const bool tail_ok =
      tc.kind == TailClass::Kind::Compact ||
      (tc.kind == TailClass::Kind::ExpDecay && tc.rate > 0.0) ||
      (tc.kind == TailClass::Kind::PolyDecay && tc.power > 0.0);
  require(tail_ok, ErrorKind::InvalidArgument,
          "rho must satisfy int_1^inf u^-1 drho(u) < inf");
}

}  // namespace

BernsteinFunction::BernsteinFunction(double psi0, HalfLineMeasure rho,
                                     std::string label,
                                     std::function<cplx(cplx)> closed_form)
    : psi0_(psi0), rho_(std::move(rho)), label_(std::move(label)),
      closed_(std::move(closed_form)) {
  require(std::isfinite(psi0_) && psi0_ <= 0.0, ErrorKind::InvalidArgument,
          "psi(0) must be finite and <= 0");
  check_rho(rho_);
  double prev = -kInf;
  for (double s : {-50.0, -20.0, -5.0, -1.0, -0.1, 0.0}) {
    const double v = eval_bernstein(*this, s);
    require(v <= 1e-12 && v >= prev - 1e-10 * std::abs(prev), ErrorKind::ValidationFailed,
            "Bernstein function is not nonpositive and nondecreasing at s = " +
                std::to_string(s));
    prev = v;
  }
}

BernsteinFunction neg_power_bernstein(double beta) {
  require(beta > 0.0 && beta < 1.0, ErrorKind::InvalidArgument,
          "neg_power needs 0 < beta < 1");
  auto rho = measure::from_density(
      density::power_exp(beta / std::tgamma(1.0 - beta), -beta, 0.0), "rho");
  return BernsteinFunction(0.0, std::move(rho),
                           "neg_power(" + std::to_string(beta) + ")",
                           [beta](cplx s) { return -std::pow(-s, beta); });
}

BernsteinFunction log_shift() {
  auto rho = measure::from_density(density::power_exp(1.0, 0.0, 1.0), "rho");
  BernsteinFunction psi(0.0, std::move(rho), "log_shift",
                        [](cplx s) { return -std::log(1.0 - s); });
  // The Frullani representation is checked rather than trusted.
  for (double s : {-0.5, -(std::exp(1.0) - 1.0), -7.0}) {
    const double got = eval_bernstein(psi, s);
    const double want = -std::log1p(-s);
    require(std::abs(got - want) <= 1e-9 * std::abs(want),
            ErrorKind::ValidationFailed,
            "log_shift representation check failed at s = " + std::to_string(s));
  }
  return psi;
}

BernsteinFunction single_atom(double u0) {
  require(u0 > 0.0 && std::isfinite(u0), ErrorKind::InvalidArgument,
          "single_atom needs u0 > 0");
  return BernsteinFunction(0.0, measure::unit_atom(u0, u0),
                           "atom(" + std::to_string(u0) + ")",
                           [u0](cplx s) { return std::exp(s * u0) - 1.0; });
}

double eval_bernstein(const BernsteinFunction& psi, double s) {
  require(s <= 0.0, ErrorKind::InvalidArgument, "Bernstein argument must be <= 0");
  if (s == 0.0) return psi.psi0();
  IntegrandHint hint;
  // |e^{su} - 1| / u <= 1 / u
  hint.growth = GrowthBound{1.0, 0.0, 1.0, kInf};
  QuadratureSpec spec;
  spec.abs_tol = 1e-13;
  spec.rel_tol = 1e-12;
  const auto rep = integrate_halfline(
      [s](double u) { return Vec::Constant(1, bernstein_kernel(s, u)); },
      psi.rho(), spec, hint);
  raise_on_failure(rep, "eval_bernstein");
  return psi.psi0() + rep.value(0).real();
}

BlockEvaluation bp_apply_block(const BernsteinFunction& psi,
                               const Generator& A, const Mat& X,
                               const QuadratureSpec& spec) {
  A.require_bounded("bp_apply");
  require(X.rows() == A.dim(), ErrorKind::InvalidArgument,
          "vector dimension does not match the generator");
  const Mat AX = A.matrix() * X;
  const Mat A2X = A.matrix() * AX;
  const Mat A3X = A.matrix() * A2X;
  // Below this u the 3-term series beats the cancellation in T(u)x - x.
  const double cut = kSeriesCut * std::min(1.0, 1.0 / std::max(A.norm(), 1e-300));
  auto kernel = [&](double u) -> Vec {
    if (u < cut) return flatten(AX + (u / 2.0) * A2X + (u * u / 6.0) * A3X);
    return flatten(A.apply_increment(u, X) / u);
  };
  double xn = 0.0;
  for (Eigen::Index j = 0; j < X.cols(); ++j) xn = std::max(xn, X.col(j).norm());
  IntegrandHint hint;
  GrowthBound g = A.growth_bound(xn);
  g.coef += xn;
  g.omega = 0.0;
  g.decay_power = 1.0;
  hint.growth = g;
  const auto rep = integrate_halfline(kernel, psi.rho(), spec, hint);
  raise_on_failure(rep, "bp_apply");
  return {psi.psi0() * X + unflatten(rep.value, X.rows(), X.cols()), rep};
}

Evaluation bp_apply(const BernsteinFunction& psi, const Generator& A,
                    const Vec& x, const QuadratureSpec& spec) {
  auto b = bp_apply_block(psi, A, Mat(x), spec);
  return {b.value.col(0), b.report};
}

double psi_tilde_density(const BernsteinFunction& psi, double r) {
  require(psi.psi0() == 0.0, ErrorKind::InvalidArgument,
          "psi_tilde needs psi(0) = 0");
  return rho_inverse_tail(psi.rho(), r);
}

double rho_inverse_tail(const HalfLineMeasure& rho, double r) {
  require(r > 0.0, ErrorKind::InvalidArgument, "r must be positive");
  double f = 0.0;
  for (const Atom& at : rho.atoms()) {
    if (at.location >= r) f += at.weight.real() / at.location;
  }
  if (!rho.density()) return f;
  const Density& d = *rho.density();
  if (d.inverse_moment_tail) return f + d.inverse_moment_tail(r).real();
  IntegrandHint hint;
  hint.growth = GrowthBound{1.0, 0.0, 1.0, kInf};
  QuadratureSpec spec;
  spec.abs_tol = 1e-13;
  spec.rel_tol = 1e-11;
  const auto rep = integrate_interval(
      [](double u) { return Vec::Constant(1, 1.0 / u); },
      HalfLineMeasure({}, d), r, kInf, spec, hint);
  raise_on_failure(rep, "rho_inverse_tail");
  return f + rep.value(0).real();
}

HalfLineMeasure psi_tilde_measure(const BernsteinFunction& psi) {
  require(psi.psi0() == 0.0, ErrorKind::InvalidArgument,
          "psi_tilde needs psi(0) = 0");
  const HalfLineMeasure& rho = psi.rho();
  require(rho.atom_at_zero() == cplx(0.0), ErrorKind::InvalidArgument,
          "psi_tilde is undefined for an atom of rho at zero");
  double sing = 0.0;
  double support = 0.0;
  std::vector<double> breaks;
  for (const Atom& at : rho.atoms()) {
    support = std::max(support, at.location);
    breaks.push_back(at.location);
  }
  TailClass tail = TailClass::compact(support);
  if (rho.density()) {
    const Density& d = *rho.density();
    // f(r) ~ r^gamma for gamma < 0, ~ log r otherwise; r^-0.5 dominates log.
    sing = d.sing_exponent < 0.0 ? d.sing_exponent : -0.5;
    const TailClass& tc = d.tail;
    switch (tc.kind) {
      case TailClass::Kind::Compact:
        tail = TailClass::compact(std::max(support, tc.support));
        break;
      case TailClass::Kind::PolyDecay:
        tail = TailClass::poly_decay(tc.power, tc.coef / tc.power, std::max(tc.from, support));
        break;
      case TailClass::Kind::ExpDecay: {
        const double p = tc.power - 1.0;
        const double from = std::max({tc.from, support, 2.0 * std::max(p, 0.0) / tc.rate});
        const double slack = tc.rate - std::max(p, 0.0) / from;
        tail = TailClass::exp_decay(tc.rate, tc.coef / slack, p, from);
        break;
      }
    }
    breaks.insert(breaks.end(), d.breakpoints.begin(), d.breakpoints.end());
  }
  Density f = density::custom(
      [psi](double r) { return cplx(psi_tilde_density(psi, r)); }, sing, tail,
      "psi_tilde");
  f.breakpoints = std::move(breaks);
  f.real_nonnegative = true;
  if (psi.closed_form()) {
    auto cf = psi.closed_form();
    f.laplace = [cf](cplx s) { return cf(s) / s; };
  }
  return measure::from_density(std::move(f), "psi_tilde(" + psi.label() + ")");
}

double representation_residual(const BernsteinFunction& psi, const Generator& A,
                         const Vec& x, const QuadratureSpec& spec) {
  const Vec px = bp_apply(psi, A, x, spec).value;
  const Vec tx = hp_apply(psi_tilde_measure(psi), A, x, spec).value;
  return (px - A.matrix() * tx).norm() / std::max(1.0, px.norm());
}

}  // namespace hpcalc

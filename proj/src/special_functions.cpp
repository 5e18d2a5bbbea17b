#include "hpcalc/special_functions.hpp"

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "hpcalc/bernstein.hpp"

namespace hpcalc {

void FracPowerSpec::validate() const {
  require(exponent > 0.0, ErrorKind::InvalidArgument,
          "fractional exponent must be positive");
  if (branch == FracBranch::NegPowerFactored || branch == FracBranch::PosPowerBernstein) {
    require(exponent < 1.0, ErrorKind::InvalidArgument,
            "this branch needs an exponent in (0, 1)");
  }
}

namespace {

// Integrates a positive, unimodal-ish function of xi over (0, inf): locate
// the mode on a coarse scan, then walk right until the integrand is
// negligible.
double xi_integral(const std::function<double(double)>& g, double scan_max,
                   double rel_tol) {
  constexpr int kScan = 256;
  double mode = 0.0;
  double gmax = 0.0;
  auto probe = [&](double xi) {
    const double v = g(xi);
    if (v > gmax) {
      gmax = v;
      mode = xi;
    }
  };
  for (int i = 1; i <= kScan; ++i) probe(scan_max * i / kScan);
  for (double xi = 1e-6; xi < scan_max / kScan; xi *= 2.0) probe(xi);
  if (gmax == 0.0) return 0.0;

  const double h = std::max(1.0, std::sqrt(mode));
  double end = mode + h;
  while (g(end) > 1e-20 * gmax) end += h;

  const double abs_tol = 1e-3 * rel_tol * gmax * std::min(end, 1.0);
  double total = 0.0;
  double lo = 0.0;
  for (double cut : {0.5 * mode, mode, mode + h, end}) {
    if (cut <= lo) continue;
    total += integrate_scalar(g, lo, cut, abs_tol, rel_tol, 4000).value;
    lo = cut;
  }
  return total;
}

}  // namespace

double volterra_nu_scaled(double t, double rate, double rel_tol) {
  require(t > 0.0, ErrorKind::InvalidArgument, "nu(t, -1) needs t > 0");
  const double lt = std::log(t);
  // t^(xi-1)/Gamma(xi) = xi t^(xi-1)/Gamma(xi+1), finite at xi = 0.
  auto g = [lt, t, rate](double xi) {
    return xi * std::exp((xi - 1.0) * lt - std::lgamma(xi + 1.0) - rate * t);
  };
  return xi_integral(g, std::max(4.0, 2.0 * t + 10.0), rel_tol);
}

double volterra_nu(double t, double rel_tol) {
  return volterra_nu_scaled(t, 0.0, rel_tol);
}

double volterra_nu_scaled_integral(double t0, double rate, double rel_tol) {
  require(rate >= 0.0, ErrorKind::InvalidArgument, "rate must be >= 0");
  if (t0 <= 0.0) return 0.0;
  const double lt = std::log(t0);
  // int_0^t0 e^{-rate t} t^(xi-1)/Gamma(xi) dt = rate^-xi P(xi, rate t0).
  std::function<double(double)> g;
  if (rate == 0.0) {
    g = [lt](double xi) { return std::exp(xi * lt - std::lgamma(xi + 1.0)); };
  } else {
    const double lr = std::log(rate);
    const double x = rate * t0;
    g = [lr, x](double xi) {
      if (xi <= 0.0) return 1.0;
      return std::exp(-xi * lr) * boost::math::gamma_p(xi, x);
    };
  }
  return xi_integral(g, std::max(4.0, 2.0 * t0 + 10.0), rel_tol);
}

Vec neg_frac_power(const Generator& A, const FracPowerSpec& fs, const Vec& x,
                   const QuadratureSpec& spec) {
  fs.validate();
  switch (fs.branch) {
    case FracBranch::NegPowerDirect:
      return hp_apply(measure::fractional(fs.exponent), A, x, spec).value;
    case FracBranch::NegPowerFactored: {
      // (-A)^-(1+alpha) (-A x)
      const Vec minus_ax = -(A.matrix() * x);
      return hp_apply(measure::fractional(1.0 + fs.exponent), A, minus_ax, spec)
          .value;
    }
    case FracBranch::PosPowerBernstein:
      break;
  }
  fail(ErrorKind::InvalidArgument, "PosPowerBernstein is not a negative power");
}

Vec neg_frac_power(const Generator& A, double alpha, const Vec& x,
                   const QuadratureSpec& spec) {
  return neg_frac_power(A, FracPowerSpec{alpha, FracBranch::NegPowerDirect}, x,
                        spec);
}

Vec pos_frac_power(const Generator& A, double beta, const Vec& x,
                   const QuadratureSpec& spec) {
  FracPowerSpec{beta, FracBranch::PosPowerBernstein}.validate();
  return bp_apply(neg_power_bernstein(beta), A, x, spec).value;
}

double frac_power_compose_check(const Generator& A, double alpha, double beta,
                                const Vec& x, const QuadratureSpec& spec) {
  require(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < alpha,
          ErrorKind::InvalidArgument, "needs 0 < beta < alpha < 1");
  require(A.spectral_abscissa() < 0.0, ErrorKind::PreconditionFailed,
          "composition check needs a uniformly stable semigroup");
  const Vec y = neg_frac_power(A, alpha, x, spec);
  const Vec lhs = -pos_frac_power(A, beta, y, spec);
  const Vec rhs = neg_frac_power(A, alpha - beta, x, spec);
  const double diff = (lhs - rhs).norm();
  if (diff == 0.0) return 0.0;
  return diff / rhs.norm();
}

Mat log_resolvent_inverse(const Generator& A, const Mat& X,
                          const QuadratureSpec& spec) {
  require(A.spectral_abscissa() < 0.0, ErrorKind::NotInDomain,
          "log(I - A)^-1 needs a uniformly stable semigroup");
  const auto f = measure::from_density(density::volterra_f(1.0, 1.0), "f");
  return hp_apply_block(f, A, X, spec).value;
}

Vec log_resolvent_inverse(const Generator& A, const Vec& x,
                          const QuadratureSpec& spec) {
  return log_resolvent_inverse(A, Mat(x), spec).col(0);
}

double log_inverse_norm_bound(const Generator& A) {
  const GrowthProfile& g = A.growth();
  require(g.omega < 0.0, ErrorKind::NotInDomain,
          "the norm bound needs omega < 0");
  return g.M / std::log1p(-g.omega);
}

}  // namespace hpcalc

#pragma once

#include "hpcalc/hp_core.hpp"
#include "hpcalc/quadrature.hpp"
#include "hpcalc/semigroup.hpp"

namespace hpcalc {

enum class FracBranch { NegPowerDirect, NegPowerFactored, PosPowerBernstein };

struct FracPowerSpec {
  double exponent = 0.5;
  FracBranch branch = FracBranch::NegPowerDirect;

  void validate() const;
};

/// nu(t, -1) = int_0^inf t^(xi-1) / Gamma(xi) dxi, t > 0.
double volterra_nu(double t, double rel_tol = 1e-11);

/// exp(-rate t) nu(t, -1), evaluated without overflow for large t.
double volterra_nu_scaled(double t, double rate, double rel_tol = 1e-11);

/// int_0^t0 exp(-rate t) nu(t, -1) dt.
double volterra_nu_scaled_integral(double t0, double rate,
                                   double rel_tol = 1e-11);

/// (-A)^(-alpha) x by the direct or the factored branch.
Vec neg_frac_power(const Generator& A, const FracPowerSpec& fs, const Vec& x,
                   const QuadratureSpec& spec = {});
Vec neg_frac_power(const Generator& A, double alpha, const Vec& x,
                   const QuadratureSpec& spec = {});

/// -(-A)^beta x, 0 < beta < 1.
Vec pos_frac_power(const Generator& A, double beta, const Vec& x,
                   const QuadratureSpec& spec = {});

/// || (-A)^beta (-A)^-alpha x - (-A)^(beta-alpha) x || / ||(-A)^(beta-alpha) x||.
double frac_power_compose_check(const Generator& A, double alpha, double beta,
                                const Vec& x, const QuadratureSpec& spec = {});

/// (log(I - A))^-1 x = int T(t) x exp(-t) nu(t, -1) dt.
Vec log_resolvent_inverse(const Generator& A, const Vec& x,
                          const QuadratureSpec& spec = {});
Mat log_resolvent_inverse(const Generator& A, const Mat& X,
                          const QuadratureSpec& spec = {});

/// M / log(1 - omega) from the growth profile.
double log_inverse_norm_bound(const Generator& A);

}  // namespace hpcalc

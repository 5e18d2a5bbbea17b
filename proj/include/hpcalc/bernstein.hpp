#pragma once

#include <functional>
#include <string>

#include "hpcalc/hp_core.hpp"

namespace hpcalc {

/// psi(s) = psi(0) + int (e^{su} - 1) u^-1 drho(u), rho >= 0, psi(0) <= 0.
class BernsteinFunction {
 public:
  BernsteinFunction(double psi0, HalfLineMeasure rho, std::string label,
                    std::function<cplx(cplx)> closed_form = nullptr);

  double psi0() const { return psi0_; }
  const HalfLineMeasure& rho() const { return rho_; }
  const std::string& label() const { return label_; }
  /// Principal-branch closed form, when known (used by the oracle).
  const std::function<cplx(cplx)>& closed_form() const { return closed_; }

 private:
  double psi0_;
  HalfLineMeasure rho_;
  std::string label_;
  std::function<cplx(cplx)> closed_;
};

/// -(-s)^beta, rho = beta / Gamma(1 - beta) u^-beta du.
BernsteinFunction neg_power_bernstein(double beta);
/// -log(1 - s), rho = e^-u du (checked against the closed form).
BernsteinFunction log_shift();
/// e^{s u0} - 1, rho = u0 delta_{u0}.
BernsteinFunction single_atom(double u0);

double eval_bernstein(const BernsteinFunction& psi, double s);

/// psi(A) x = psi(0) x + int (T(u) x - x) u^-1 drho(u).
Evaluation bp_apply(const BernsteinFunction& psi, const Generator& A,
                    const Vec& x, const QuadratureSpec& spec = {});
BlockEvaluation bp_apply_block(const BernsteinFunction& psi,
                               const Generator& A, const Mat& X,
                               const QuadratureSpec& spec = {});

/// f(r) = int_[r, inf) u^-1 drho(u); needs psi(0) = 0.
double psi_tilde_density(const BernsteinFunction& psi, double r);

/// int_[r, inf) u^-1 drho(u) for any rho.
double rho_inverse_tail(const HalfLineMeasure& rho, double r);

/// The measure f(t) dt with L(f) = psi(s) / s.
HalfLineMeasure psi_tilde_measure(const BernsteinFunction& psi);

/// ||psi(A) x - A int T(t) x f(t) dt|| / max(1, ||psi(A) x||).
double representation_residual(const BernsteinFunction& psi, const Generator& A,
                         const Vec& x, const QuadratureSpec& spec = {});

}  // namespace hpcalc

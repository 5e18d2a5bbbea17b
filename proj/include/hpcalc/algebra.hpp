#pragma once

#include <functional>
#include <map>
#include <vector>

#include "hpcalc/bernstein.hpp"
#include "hpcalc/hp_core.hpp"

namespace hpcalc {

/// b(t) = psi(0) a(t) + int (a(t - u) - a(t)) u^-1 drho(u), the distribution
/// function of the measure representing h = g psi.
cplx product_distribution(const HalfLineMeasure& a, const BernsteinFunction& psi,
                          double t, const QuadratureSpec& spec = {});

/// Memoized b(t) for one (a, psi) pair. Not thread-safe: one per context.
class ProductDistribution {
 public:
  ProductDistribution(HalfLineMeasure a, BernsteinFunction psi,
                      QuadratureSpec inner = default_inner());

  cplx operator()(double t) const;

  /// Extrapolated |b(+0)|, which must vanish.
  double b_at_zero() const { return b0_; }
  /// Envelope |b(t)| <= C t^P e^{-r t} for t >= 1, fitted on t = 1..1024
  /// with a factor-2 margin (empirical, not a proof).
  const TailClass& growth() const { return growth_; }
  /// Points where b may jump (atoms of a, shifted by atoms of rho).
  const std::vector<double>& breakpoints() const { return breaks_; }

  /// The measure b(t) dt; the returned handle refers to *this.
  HalfLineMeasure as_density() const;

  /// Lb(s_k) = -s_k int e^{s_k t} b(t) dt for all samples in one pass.
  std::vector<cplx> laplace(const std::vector<double>& s,
                            const QuadratureSpec& spec = {}) const;

  static QuadratureSpec default_inner();

 private:
  HalfLineMeasure a_;
  BernsteinFunction psi_;
  QuadratureSpec inner_;
  std::vector<double> breaks_;
  TailClass growth_;
  double b0_ = 0.0;
  mutable std::map<double, cplx> memo_;
};

/// max_s |Lb(s) - La(s) psi(s)| / |La(s) psi(s)|.
double verify_product_transform(const HalfLineMeasure& a,
                                const BernsteinFunction& psi,
                                const std::vector<double>& s_samples,
                                const QuadratureSpec& spec = {});

/// w0 x + int T(t) (-A x) a(t) dt with a(t) the distribution function.
Vec hp_apply_stable_form(const HalfLineMeasure& a, const Generator& A,
                         const Vec& x, const QuadratureSpec& spec = {});

/// Same, for a distribution function given pointwise with its envelope.
Vec stable_form(const std::function<cplx(double)>& dist,
                const TailClass& growth, const std::vector<double>& breaks,
                const Generator& A, const Vec& x,
                const QuadratureSpec& spec = {});

/// a(t) ||T(t) x|| -> 0 for every x in xs. Throws Inconclusive.
bool in_LMT(const HalfLineMeasure& a, const Generator& A,
            const std::vector<Vec>& xs);
bool in_LMT(const std::function<cplx(double)>& dist, const TailClass& growth,
            const Generator& A, const std::vector<Vec>& xs);

struct ProductReport {
  double r1 = 0.0;
  double r2 = 0.0;
  Vec h_x;
  bool lmt_b = false;
};

/// r1: psi(A) g(A) x vs h(A) x; r2: g(A) psi(A) x vs h(A) x.
ProductReport product_residuals(const HalfLineMeasure& a,
                                  const BernsteinFunction& psi,
                                  const Generator& A, const Vec& x,
                                  const QuadratureSpec& spec = {});

/// y = (1/psi)(A) x through a caller-supplied measure with L(recip) = 1/psi.
Vec reciprocal_inverse(const BernsteinFunction& psi, const Generator& A,
                       const Vec& x, const HalfLineMeasure& recip,
                       const QuadratureSpec& spec = {});

}  // namespace hpcalc

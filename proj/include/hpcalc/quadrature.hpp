#pragma once

#include <array>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "hpcalc/errors.hpp"
#include "hpcalc/measures.hpp"

namespace hpcalc {

using Vec = Eigen::VectorXcd;
using VecFn = std::function<Vec(double)>;

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  double t_split = 1.0;
  int max_panels = 65536;
  double window_growth_factor = 2.0;
  double divergence_ratio = 0.9;

  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;
  /// Copy with both tolerances multiplied by `factor`.
  QuadratureSpec scaled(double factor) const;
};

struct IntegralReport {
  Vec value;
  double error_estimate = 0.0;
  bool converged = false;
  double truncation_T = 0.0;
  /// Accumulated int ||integrand|| d|a|.
  double absolute_mass = 0.0;
  Diagnosis diagnosis = Diagnosis::Converged;
  /// True when the truncated tail is bounded by an envelope certificate
  /// rather than by the empirical doubling-window test.
  bool tail_certified = false;
  int panels = 0;
};

/// Envelope ||phi(t)|| <= coef * exp(omega t) * t^(-decay_power) for
/// 1 <= t <= valid_up_to.
struct GrowthBound {
  double coef = 1.0;
  double omega = 0.0;
  double decay_power = 0.0;
  double valid_up_to = kInf;
};

/// Optional knowledge about the integrand supplied by the caller.
struct IntegrandHint {
  /// ||phi(t)|| ~ t^zero_exponent as t -> 0.
  double zero_exponent = 0.0;
  std::optional<GrowthBound> growth;
  /// t -> phi(t) - phi(0), used to subtract log-type density singularities.
  VecFn increment;
  /// Extra points where the integrand is not smooth.
  std::vector<double> breakpoints;
};

/// Sum_k w_k phi(t_k) + int_0^inf phi(t) density(t) dt.
IntegralReport integrate_halfline(const VecFn& integrand,
                                  const HalfLineMeasure& a,
                                  const QuadratureSpec& spec = {},
                                  const IntegrandHint& hint = {});

/// Same contract restricted to atoms in [lo, hi) and density on (lo, hi);
/// hi may be +inf.
IntegralReport integrate_interval(const VecFn& integrand,
                                  const HalfLineMeasure& a, double lo,
                                  double hi, const QuadratureSpec& spec = {},
                                  const IntegrandHint& hint = {});

/// Scalar f with derivative for Stieltjes integrals int phi df.
struct StieltjesFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;
  /// |f'(t)| <= c t^gamma near zero.
  double derivative_sing_exponent = 0.0;
  TailClass derivative_tail = TailClass::compact(0.0);
  /// f(0+); nullopt when f is unbounded at zero.
  std::optional<double> value_at_zero;

  HalfLineMeasure derivative_measure() const;
};

IntegralReport integrate_stieltjes(const VecFn& integrand,
                                   const StieltjesFunction& f,
                                   const QuadratureSpec& spec = {},
                                   const IntegrandHint& hint = {});

struct ScalarIntegral {
  double value = 0.0;
  double error = 0.0;
  bool converged = false;
};

/// Adaptive G7/K15 on a finite interval for smooth scalar integrands.
ScalarIntegral integrate_scalar(const std::function<double(double)>& f,
                                double lo, double hi, double abs_tol,
                                double rel_tol, int max_panels = 4000);

namespace kronrod {

/// Abscissae of the 15-point Kronrod rule on [-1, 1] (non-negative half,
/// descending); odd indices are the 7-point Gauss abscissae.
inline constexpr std::array<double, 8> kNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

/// The 15 abscissae of [lo, hi] with Kronrod and embedded Gauss weights
/// (Gauss weight zero at non-Gauss abscissae).
struct PanelRule {
  std::array<double, 15> t;
  std::array<double, 15> kronrod;
  std::array<double, 15> gauss;
};

PanelRule panel_rule(double lo, double hi);

}  // namespace kronrod

}  // namespace hpcalc

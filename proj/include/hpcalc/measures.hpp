#pragma once

#include <complex>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace hpcalc {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Large-t envelope of a density, valid for t >= from:
///   ExpDecay   |d(t)| <= coef * t^power * exp(-rate * t)
///   PolyDecay  |d(t)| <= coef * t^(-power)
///   Compact    d(t) == 0 for t > support
/// A negative ExpDecay rate describes exponential growth; the Laplace
/// integral then converges only for s < rate.
struct TailClass {
  enum class Kind { ExpDecay, PolyDecay, Compact };

  Kind kind = Kind::Compact;
  double rate = 0.0;
  double power = 0.0;
  double coef = 0.0;
  double from = 1.0;
  double support = 0.0;

  static TailClass exp_decay(double rate, double coef, double power = 0.0,
                             double from = 1.0);
  static TailClass poly_decay(double power, double coef, double from = 1.0);
  static TailClass compact(double support);

  /// Exponential rate of the envelope (+inf for compact support).
  double effective_rate() const;
  /// Power of t in the envelope (-inf for compact support).
  double effective_power() const;
};

/// Absolutely continuous part of a measure on (0, inf).
///
/// `sing_exponent` bounds the behaviour at zero: |d(t)| <= c t^gamma.
/// gamma == -1 marks a logarithmically integrable singularity
/// (t^-1 / log^2 t); such densities must provide `cumulative`.
struct Density {
  std::string kind;
  std::function<cplx(double)> value;
  double sing_exponent = 0.0;
  TailClass tail;
  /// Points in (0, inf) where the density is not smooth.
  std::vector<double> breakpoints;
  /// Closed-form Laplace transform s -> int e^{st} d(t) dt (optional).
  std::function<cplx(cplx)> laplace;
  /// t -> int_0^t d(u) du (optional; mandatory when sing_exponent <= -1).
  std::function<cplx(double)> cumulative;
  /// r -> int_r^inf d(u) / u du (optional).
  std::function<cplx(double)> inverse_moment_tail;
  bool real_nonnegative = false;
};

struct Atom {
  double location = 0.0;
  cplx weight{0.0, 0.0};
};

/// Complex measure on [0, inf): finitely many atoms plus a density.
class HalfLineMeasure {
 public:
  HalfLineMeasure() = default;
  HalfLineMeasure(std::vector<Atom> atoms, std::optional<Density> density,
                  std::string label = {});

  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::optional<Density>& density() const { return density_; }
  const std::string& label() const { return label_; }

  bool has_atom_at(double t) const;
  /// Weight of the atom at t == 0 (zero if none).
  cplx atom_at_zero() const;
  /// Total variation of the atoms.
  double atom_variation() const;

  /// Measure |a|: absolute atom weights and |density|.
  HalfLineMeasure absolute() const;
  HalfLineMeasure scaled(cplx factor) const;

  friend HalfLineMeasure operator+(const HalfLineMeasure& lhs,
                                   const HalfLineMeasure& rhs);

 private:
  void validate() const;

  std::vector<Atom> atoms_;
  std::optional<Density> density_;
  std::string label_;
};

namespace density {

/// c * t^power * exp(-rate * t), power > -1, rate >= 0.
Density power_exp(cplx coef, double power, double rate);
/// Constant c on (0, inf).
Density constant(cplx c);
/// Piecewise-linear interpolation of (t_i, v_i); zero outside [t_0, t_last].
Density table(std::vector<double> t, std::vector<cplx> values);
/// c * exp(-rate * t) * nu(t, -1) with the Volterra function nu.
Density volterra_f(cplx coef = 1.0, double rate = 1.0);
/// Arbitrary handle with caller-supplied metadata.
Density custom(std::function<cplx(double)> fn, double sing_exponent,
               TailClass tail, std::string kind = "custom");

}  // namespace density

namespace measure {

HalfLineMeasure unit_atom(double location, cplx weight = 1.0);
/// Lebesgue measure times c (c = -1 gives the representing measure of 1/s).
HalfLineMeasure lebesgue(cplx c = 1.0);
/// t^(alpha-1)/Gamma(alpha) dt, representing (-s)^(-alpha).
HalfLineMeasure fractional(double alpha);
HalfLineMeasure from_density(Density d, std::string label = {});
HalfLineMeasure zero();

}  // namespace measure

/// La(s) = int_0^inf e^{st} da(t) for s < 0, by quadrature.
cplx eval_laplace(const HalfLineMeasure& a, double s);

/// Closed-form La(s) for complex s when every part of a provides one.
std::optional<cplx> laplace_closed_form(const HalfLineMeasure& a, cplx s);

/// a([0, t]) with the atom at zero excluded (a(0) = 0); zero for t < 0.
cplx distribution(const HalfLineMeasure& a, double t);

/// Upper bound on int_T^inf d|a|(t); +inf when no bound is certifiable.
double tail_variation(const HalfLineMeasure& a, double T);

/// Envelope of |a(t)| (the distribution function) for t >= 1.
TailClass distribution_growth(const HalfLineMeasure& a);

/// Upper bound on int_T^inf C t^P exp(-kappa t) dt (inf if not certifiable).
double envelope_tail_bound(double coef, double power, double kappa, double T);

}  // namespace hpcalc

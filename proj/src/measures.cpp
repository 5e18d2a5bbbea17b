#include "hpcalc/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "hpcalc/errors.hpp"
#include "hpcalc/quadrature.hpp"
#include "hpcalc/special_functions.hpp"

namespace hpcalc {

TailClass TailClass::exp_decay(double rate, double coef, double power,
                               double from) {
  TailClass t;
  t.kind = Kind::ExpDecay;
  t.rate = rate;
  t.coef = coef;
  t.power = power;
  t.from = from;
  return t;
}

TailClass TailClass::poly_decay(double power, double coef, double from) {
  TailClass t;
  t.kind = Kind::PolyDecay;
  t.power = power;
  t.coef = coef;
  t.from = from;
  return t;
}

TailClass TailClass::compact(double support) {
  TailClass t;
  t.kind = Kind::Compact;
  t.support = support;
  return t;
}

double TailClass::effective_rate() const {
  switch (kind) {
    case Kind::ExpDecay: return rate;
    case Kind::PolyDecay: return 0.0;
    case Kind::Compact: return kInf;
  }
  return 0.0;
}

double TailClass::effective_power() const {
  switch (kind) {
    case Kind::ExpDecay: return power;
    case Kind::PolyDecay: return -power;
    case Kind::Compact: return -kInf;
  }
  return 0.0;
}

namespace {

// Looser of two envelopes, used when adding densities.
TailClass combine_tails(const TailClass& x, const TailClass& y) {
  using K = TailClass::Kind;
  if (x.kind == K::Compact && y.kind == K::Compact) {
    return TailClass::compact(std::max(x.support, y.support));
  }
  if (x.kind == K::Compact) return y;
  if (y.kind == K::Compact) return x;
  const double from = std::max(x.from, y.from);
  // coef * from^power absorbs the power mismatch for t >= from only when
  // the rates agree; otherwise keep the slower rate with summed coefficient.
  const double rate = std::min(x.effective_rate(), y.effective_rate());
  const double power = std::max(x.effective_power(), y.effective_power());
  if (rate == 0.0 && x.kind == K::PolyDecay && y.kind == K::PolyDecay) {
    return TailClass::poly_decay(-power, x.coef + y.coef, from);
  }
  return TailClass::exp_decay(rate, x.coef + y.coef, power, from);
}

// Upper incomplete gamma Gamma(a, x) for a > -1, x > 0.
double upper_gamma(double a, double x) {
  if (a > 0.0) return boost::math::tgamma(a, x);
  if (a == 0.0) return boost::math::expint(1, x);
  return (boost::math::tgamma(a + 1.0, x) - std::pow(x, a) * std::exp(-x)) / a;
}

// int_0^t0 |d| for the density of `a`, by its cumulative when the phase is
// constant, else by quadrature.
double density_mass(const Density& d, double t0) {
  if (t0 <= 0.0) return 0.0;
  if (d.real_nonnegative && d.cumulative) return std::abs(d.cumulative(t0));
  HalfLineMeasure m({}, d);
  const HalfLineMeasure am = m.absolute();
  if (am.density()->cumulative) return std::abs(am.density()->cumulative(t0));
  QuadratureSpec spec;
  spec.abs_tol = 1e-12;
  spec.rel_tol = 1e-10;
  const auto rep = integrate_interval(
      [](double) { return Vec::Ones(1); }, am, 0.0, t0, spec);
  if (!rep.converged) return kInf;
  return std::abs(rep.value(0)) + rep.error_estimate;
}

}  // namespace

HalfLineMeasure::HalfLineMeasure(std::vector<Atom> atoms,
                                 std::optional<Density> density,
                                 std::string label)
    : atoms_(std::move(atoms)), density_(std::move(density)),
      label_(std::move(label)) {
  std::sort(atoms_.begin(), atoms_.end(),
            [](const Atom& x, const Atom& y) { return x.location < y.location; });
  validate();
}

void HalfLineMeasure::validate() const {
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& at = atoms_[i];
    require(std::isfinite(at.location) && at.location >= 0.0,
            ErrorKind::InvalidArgument, "atom locations must be finite and >= 0");
    require(std::isfinite(std::abs(at.weight)), ErrorKind::InvalidArgument,
            "atom weights must be finite");
    if (i > 0) {
      require(atoms_[i - 1].location != at.location,
              ErrorKind::InvalidArgument, "atom locations must be distinct");
    }
  }
  if (!density_) return;
  const Density& d = *density_;
  require(static_cast<bool>(d.value), ErrorKind::InvalidArgument,
          "density handle is empty");
  require(d.sing_exponent > -1.0 ||
              (d.sing_exponent == -1.0 && static_cast<bool>(d.cumulative)),
          ErrorKind::InvalidArgument,
          "density singularity exponent must exceed -1 (or equal -1 with a "
          "cumulative function)");
  // Finite variation on compacts, probed on a grid.
  const double T = d.tail.kind == TailClass::Kind::Compact && d.tail.support > 0
                       ? d.tail.support
                       : 16.0;
  // Offset grid so that sampling never lands on a breakpoint or atom.
  for (int i = 1; i <= 16; ++i) {
    const double t = T * (i - 0.381966) / 16.0;
    require(std::isfinite(std::abs(d.value(t))), ErrorKind::InvalidArgument,
            "density is not finite at t = " + std::to_string(t));
  }
}

bool HalfLineMeasure::has_atom_at(double t) const {
  return std::any_of(atoms_.begin(), atoms_.end(),
                     [t](const Atom& at) { return at.location == t; });
}

cplx HalfLineMeasure::atom_at_zero() const {
  for (const Atom& at : atoms_) {
    if (at.location == 0.0) return at.weight;
  }
  return 0.0;
}

double HalfLineMeasure::atom_variation() const {
  double v = 0.0;
  for (const Atom& at : atoms_) v += std::abs(at.weight);
  return v;
}

HalfLineMeasure HalfLineMeasure::absolute() const {
  std::vector<Atom> atoms;
  for (const Atom& at : atoms_) atoms.push_back({at.location, std::abs(at.weight)});
  std::optional<Density> dens;
  if (density_) {
    Density d = *density_;
    auto fn = density_->value;
    d.value = [fn](double t) { return cplx(std::abs(fn(t))); };
    d.laplace = nullptr;
    d.inverse_moment_tail = nullptr;
    if (!density_->real_nonnegative) {
      d.cumulative = nullptr;
      // Constant-phase densities keep a closed-form cumulative.
      if (density_->cumulative) {
        const cplx probe = fn(1.0);
        if (std::abs(probe) > 0.0 && density_->kind != "custom" &&
            density_->kind != "table" && density_->kind != "sum") {
          const cplx phase = std::conj(probe / std::abs(probe));
          auto cum = density_->cumulative;
          d.cumulative = [cum, phase](double t) {
            return cplx(std::abs(cum(t) * phase));
          };
        }
      }
    }
    d.real_nonnegative = true;
    dens = std::move(d);
  }
  return HalfLineMeasure(std::move(atoms), std::move(dens), "|" + label_ + "|");
}

HalfLineMeasure HalfLineMeasure::scaled(cplx factor) const {
  std::vector<Atom> atoms;
  for (const Atom& at : atoms_) atoms.push_back({at.location, at.weight * factor});
  std::optional<Density> dens;
  if (density_) {
    Density d = *density_;
    auto fn = density_->value;
    d.value = [fn, factor](double t) { return factor * fn(t); };
    if (density_->laplace) {
      auto f = density_->laplace;
      d.laplace = [f, factor](cplx s) { return factor * f(s); };
    }
    if (density_->cumulative) {
      auto f = density_->cumulative;
      d.cumulative = [f, factor](double t) { return factor * f(t); };
    }
    if (density_->inverse_moment_tail) {
      auto f = density_->inverse_moment_tail;
      d.inverse_moment_tail = [f, factor](double r) { return factor * f(r); };
    }
    d.tail.coef *= std::abs(factor);
    d.real_nonnegative = density_->real_nonnegative && factor.imag() == 0.0 &&
                         factor.real() >= 0.0;
    dens = std::move(d);
  }
  return HalfLineMeasure(std::move(atoms), std::move(dens), label_);
}

HalfLineMeasure operator+(const HalfLineMeasure& lhs,
                          const HalfLineMeasure& rhs) {
  std::map<double, cplx> merged;
  for (const Atom& at : lhs.atoms_) merged[at.location] += at.weight;
  for (const Atom& at : rhs.atoms_) merged[at.location] += at.weight;
  std::vector<Atom> atoms;
  for (const auto& [loc, w] : merged) atoms.push_back({loc, w});

  std::optional<Density> dens;
  if (lhs.density_ && rhs.density_) {
    const Density& x = *lhs.density_;
    const Density& y = *rhs.density_;
    Density d;
    d.kind = "sum";
    auto fx = x.value;
    auto fy = y.value;
    d.value = [fx, fy](double t) { return fx(t) + fy(t); };
    d.sing_exponent = std::min(x.sing_exponent, y.sing_exponent);
    d.tail = combine_tails(x.tail, y.tail);
    d.breakpoints = x.breakpoints;
    d.breakpoints.insert(d.breakpoints.end(), y.breakpoints.begin(),
                         y.breakpoints.end());
    if (x.laplace && y.laplace) {
      auto lx = x.laplace;
      auto ly = y.laplace;
      d.laplace = [lx, ly](cplx s) { return lx(s) + ly(s); };
    }
    if (x.cumulative && y.cumulative) {
      auto cx = x.cumulative;
      auto cy = y.cumulative;
      d.cumulative = [cx, cy](double t) { return cx(t) + cy(t); };
    }
    if (x.inverse_moment_tail && y.inverse_moment_tail) {
      auto ix = x.inverse_moment_tail;
      auto iy = y.inverse_moment_tail;
      d.inverse_moment_tail = [ix, iy](double r) { return ix(r) + iy(r); };
    }
    d.real_nonnegative = x.real_nonnegative && y.real_nonnegative;
    dens = std::move(d);
  } else if (lhs.density_) {
    dens = lhs.density_;
  } else if (rhs.density_) {
    dens = rhs.density_;
  }
  return HalfLineMeasure(std::move(atoms), std::move(dens),
                         lhs.label_ + "+" + rhs.label_);
}

namespace density {

Density power_exp(cplx coef, double power, double rate) {
  require(power > -1.0, ErrorKind::InvalidArgument,
          "power_exp needs power > -1");
  require(rate >= 0.0, ErrorKind::InvalidArgument, "power_exp needs rate >= 0");
  Density d;
  d.kind = "power_exp";
  d.value = [coef, power, rate](double t) {
    if (t <= 0.0) return cplx(0.0);
    return coef * std::exp(power * std::log(t) - rate * t);
  };
  d.sing_exponent = std::min(power, 0.0);
  if (rate > 0.0) {
    d.tail = TailClass::exp_decay(rate, std::abs(coef), power);
  } else {
    d.tail = TailClass::poly_decay(-power, std::abs(coef));
  }
  const double g1 = std::tgamma(power + 1.0);
  d.laplace = [coef, power, rate, g1](cplx s) {
    return coef * g1 * std::pow(cplx(rate) - s, -(power + 1.0));
  };
  d.cumulative = [coef, power, rate, g1](double t) {
    if (t <= 0.0) return cplx(0.0);
    if (rate == 0.0) return coef * std::pow(t, power + 1.0) / (power + 1.0);
    return coef * g1 * boost::math::gamma_p(power + 1.0, rate * t) /
           std::pow(rate, power + 1.0);
  };
  d.inverse_moment_tail = [coef, power, rate](double r) {
    // int_r^inf c u^(power-1) e^(-rate u) du
    if (rate == 0.0) {
      if (power >= 0.0) return cplx(kInf);
      return coef * std::pow(r, power) / (-power);
    }
    return coef * std::pow(rate, -power) * upper_gamma(power, rate * r);
  };
  d.real_nonnegative = coef.imag() == 0.0 && coef.real() >= 0.0;
  return d;
}

Density constant(cplx c) {
  Density d = power_exp(c, 0.0, 0.0);
  d.kind = "const";
  return d;
}

Density table(std::vector<double> t, std::vector<cplx> values) {
  require(t.size() >= 2 && t.size() == values.size(),
          ErrorKind::InvalidArgument, "table density needs >= 2 matching points");
  require(t.front() >= 0.0, ErrorKind::InvalidArgument,
          "table abscissae must be >= 0");
  for (std::size_t i = 1; i < t.size(); ++i) {
    require(t[i] > t[i - 1], ErrorKind::InvalidArgument,
            "table abscissae must increase strictly");
  }
  Density d;
  d.kind = "table";
  d.value = [t, values](double x) {
    if (x < t.front() || x > t.back()) return cplx(0.0);
    auto it = std::upper_bound(t.begin(), t.end(), x);
    if (it == t.end()) return values.back();
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    if (i == 0) return values.front();
    const double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return (1.0 - w) * values[i - 1] + w * values[i];
  };
  d.cumulative = [t, values](double x) {
    cplx acc = 0.0;
    for (std::size_t i = 1; i < t.size() && t[i - 1] < x; ++i) {
      const double hi = std::min(x, t[i]);
      const double h = t[i] - t[i - 1];
      const cplx slope = (values[i] - values[i - 1]) / h;
      const double len = hi - t[i - 1];
      acc += values[i - 1] * len + 0.5 * slope * len * len;
    }
    return acc;
  };
  d.sing_exponent = 0.0;
  d.tail = TailClass::compact(t.back());
  d.breakpoints = t;
  d.real_nonnegative = std::all_of(values.begin(), values.end(), [](cplx v) {
    return v.imag() == 0.0 && v.real() >= 0.0;
  });
  return d;
}

Density volterra_f(cplx coef, double rate) {
  require(rate >= 0.0, ErrorKind::InvalidArgument,
          "volterra_f needs rate >= 0");
  Density d;
  d.kind = "volterra_f";
  d.value = [coef, rate](double t) {
    if (t <= 0.0) return cplx(0.0);
    return coef * volterra_nu_scaled(t, rate);
  };
  // nu(t,-1) ~ 1/(t log^2 t) at zero: borderline integrable.
  d.sing_exponent = -1.0;
  // exp(-t) nu(t,-1) decreases to 1 and is below 1.04 for t >= 1.
  d.tail = TailClass::exp_decay(rate - 1.0, 1.04 * std::abs(coef), 0.0, 1.0);
  d.laplace = [coef, rate](cplx s) { return coef / std::log(cplx(rate) - s); };
  d.cumulative = [coef, rate](double t) {
    return coef * volterra_nu_scaled_integral(t, rate);
  };
  d.real_nonnegative = coef.imag() == 0.0 && coef.real() >= 0.0;
  return d;
}

Density custom(std::function<cplx(double)> fn, double sing_exponent,
               TailClass tail, std::string kind) {
  Density d;
  d.kind = std::move(kind);
  d.value = std::move(fn);
  d.sing_exponent = sing_exponent;
  d.tail = tail;
  return d;
}

}  // namespace density

namespace measure {

HalfLineMeasure unit_atom(double location, cplx weight) {
  return HalfLineMeasure({{location, weight}}, std::nullopt, "atom");
}

HalfLineMeasure lebesgue(cplx c) {
  return HalfLineMeasure({}, density::constant(c), "lebesgue");
}

HalfLineMeasure fractional(double alpha) {
  require(alpha > 0.0, ErrorKind::InvalidArgument, "alpha must be positive");
  return HalfLineMeasure(
      {}, density::power_exp(1.0 / std::tgamma(alpha), alpha - 1.0, 0.0),
      "fractional");
}

HalfLineMeasure from_density(Density d, std::string label) {
  return HalfLineMeasure({}, std::move(d), std::move(label));
}

HalfLineMeasure zero() { return HalfLineMeasure({}, std::nullopt, "zero"); }

}  // namespace measure

cplx eval_laplace(const HalfLineMeasure& a, double s) {
  require(s < 0.0, ErrorKind::InvalidArgument, "Laplace argument must be < 0");
  IntegrandHint hint;
  hint.growth = GrowthBound{1.0, s, 0.0, kInf};
  QuadratureSpec spec;
  spec.abs_tol = 1e-12;
  spec.rel_tol = 1e-11;
  const auto rep = integrate_halfline(
      [s](double t) { return Vec::Constant(1, std::exp(s * t)); }, a, spec,
      hint);
  require(rep.converged, ErrorKind::NonConvergent,
          "Laplace integral not certified at s = " + std::to_string(s) + " (" +
              std::string(to_string(rep.diagnosis)) + ")");
  return rep.value(0);
}

std::optional<cplx> laplace_closed_form(const HalfLineMeasure& a, cplx s) {
  cplx v = 0.0;
  for (const Atom& at : a.atoms()) v += at.weight * std::exp(s * at.location);
  if (a.density()) {
    if (!a.density()->laplace) return std::nullopt;
    v += a.density()->laplace(s);
  }
  return v;
}

cplx distribution(const HalfLineMeasure& a, double t) {
  if (t < 0.0) return 0.0;
  cplx v = 0.0;
  for (const Atom& at : a.atoms()) {
    if (at.location > 0.0 && at.location <= t) v += at.weight;
  }
  if (a.density() && t > 0.0) {
    const Density& d = *a.density();
    if (d.cumulative) {
      v += d.cumulative(t);
    } else {
      QuadratureSpec spec;
      spec.abs_tol = 1e-13;
      spec.rel_tol = 1e-12;
      const auto rep =
          integrate_interval([](double) { return Vec::Ones(1); },
                             HalfLineMeasure({}, d), 0.0, t, spec);
      v += rep.value(0);
    }
  }
  return v;
}

double envelope_tail_bound(double coef, double power, double kappa,
                           double T) {
  if (coef == 0.0) return 0.0;
  if (!(T > 0.0)) return kInf;
  if (kappa == 0.0) {
    if (power < -1.0) return coef * std::pow(T, power + 1.0) / (-power - 1.0);
    return kInf;
  }
  const double slack = kappa - std::max(power, 0.0) / T;
  if (!(slack > 0.0)) return kInf;
  return coef * std::exp(power * std::log(T) - kappa * T) / slack;
}

double tail_variation(const HalfLineMeasure& a, double T) {
  require(T >= 0.0, ErrorKind::InvalidArgument, "T must be >= 0");
  double v = 0.0;
  for (const Atom& at : a.atoms()) {
    if (at.location >= T) v += std::abs(at.weight);
  }
  if (!a.density()) return v;
  const Density& d = *a.density();
  const TailClass& tc = d.tail;
  if (tc.kind == TailClass::Kind::Compact) {
    if (T >= tc.support) return v;
    return v + density_mass(d, tc.support) - density_mass(d, T) +
           1e-12 * density_mass(d, tc.support);
  }
  const double from = std::max(tc.from, T);
  const double env = envelope_tail_bound(tc.coef, tc.effective_power(),
                                         tc.effective_rate(), from);
  if (!std::isfinite(env)) return kInf;
  double head = 0.0;
  if (T < from) {
    head = density_mass(d, from) - density_mass(d, T);
    head = std::max(head, 0.0) * (1.0 + 1e-9);
  }
  return v + head + env;
}

TailClass distribution_growth(const HalfLineMeasure& a) {
  const double atoms = a.atom_variation();
  if (!a.density()) return TailClass::exp_decay(0.0, atoms);
  const Density& d = *a.density();
  const TailClass& tc = d.tail;
  if (tc.kind == TailClass::Kind::Compact) {
    return TailClass::exp_decay(0.0, atoms + density_mass(d, std::max(tc.support, 1.0)));
  }
  const double from = std::max(tc.from, 1.0);
  const double head = atoms + density_mass(d, from);
  const double rate = tc.effective_rate();
  const double power = tc.effective_power();
  if (rate > 0.0 || (rate == 0.0 && power < -1.0)) {
    return TailClass::exp_decay(
        0.0, head + envelope_tail_bound(tc.coef, power, rate, from));
  }
  if (rate == 0.0) {
    // int_from^t C u^P du <= C t^(P+1) / (P+1); P = -1 is covered by t^0.5.
    if (power == -1.0) return TailClass::exp_decay(0.0, head + 2.0 * tc.coef, 0.5);
    const double p1 = power + 1.0;
    return TailClass::exp_decay(0.0, head + tc.coef / p1, std::max(p1, 0.0));
  }
  // Exponential growth exp(|rate| t).
  const double g = -rate;
  return TailClass::exp_decay(rate, head + tc.coef / g * std::pow(from, std::min(power, 0.0)),
                              std::max(power, 0.0));
}

}  // namespace hpcalc

#include "hpcalc/algebra.hpp"

#include <algorithm>
#include <cmath>

namespace hpcalc {

namespace {

std::vector<double> jump_points(const HalfLineMeasure& a,
                                const HalfLineMeasure& rho) {
  std::vector<double> pts;
  for (const Atom& at : a.atoms()) {
    if (at.location > 0.0) pts.push_back(at.location);
    for (const Atom& r : rho.atoms()) pts.push_back(at.location + r.location);
  }
  if (a.density()) {
    for (double b : a.density()->breakpoints) {
      pts.push_back(b);
      for (const Atom& r : rho.atoms()) pts.push_back(b + r.location);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace

cplx product_distribution(const HalfLineMeasure& a, const BernsteinFunction& psi,
                          double t, const QuadratureSpec& spec) {
  if (t <= 0.0) return 0.0;
  require(!a.has_atom_at(t), ErrorKind::SingularAtZero,
          "a has an atom at t = " + std::to_string(t) +
              "; (a(t-u) - a(t))/u is not integrable");
  require(a.atom_at_zero() == cplx(0.0), ErrorKind::InvalidArgument,
          "product distribution needs a without an atom at zero");
  const HalfLineMeasure& rho = psi.rho();
  require(rho.atom_at_zero() == cplx(0.0), ErrorKind::InvalidArgument,
          "product distribution needs rho without an atom at zero");

  const cplx at = distribution(a, t);
  // u >= t: a(t - u) = 0.
  cplx b = psi.psi0() * at - at * rho_inverse_tail(rho, t);

  const double simpson_cut = 1e-4 * t;
  const Density* ad = a.density() ? &*a.density() : nullptr;
  auto kernel = [&](double u) -> Vec {
    const double tau = t - u;
    if (u < simpson_cut && ad != nullptr) {
      // a(t) - a(t-u) = int_{t-u}^t d, Simpson on a smooth stretch.
      cplx jump = 0.0;
      for (const Atom& x : a.atoms()) {
        if (x.location > tau && x.location <= t) jump += x.weight;
      }
      const cplx mass = (ad->value(tau) + 4.0 * ad->value(t - 0.5 * u) +
                         ad->value(t)) / 6.0;
      return Vec::Constant(1, -mass - (u > 0.0 ? jump / u : cplx(0.0)));
    }
    if (u <= 0.0) return Vec::Zero(1);
    return Vec::Constant(1, (distribution(a, tau) - at) / u);
  };
  IntegrandHint hint;
  for (const Atom& x : a.atoms()) {
    if (x.location < t) hint.breakpoints.push_back(t - x.location);
  }
  if (ad != nullptr) {
    for (double p : ad->breakpoints) {
      if (p < t) hint.breakpoints.push_back(t - p);
    }
  }
  const auto rep = integrate_interval(kernel, rho, 0.0, t, spec, hint);
  raise_on_failure(rep, "product_distribution");
  return b + rep.value(0);
}

QuadratureSpec ProductDistribution::default_inner() {
  QuadratureSpec s;
  s.abs_tol = 1e-13;
  s.rel_tol = 1e-11;
  return s;
}

ProductDistribution::ProductDistribution(HalfLineMeasure a,
                                         BernsteinFunction psi,
                                         QuadratureSpec inner)
    : a_(std::move(a)), psi_(std::move(psi)), inner_(inner) {
  breaks_ = jump_points(a_, psi_.rho());
  // b(t) ~ b0 + C t^p near zero; Aitken on a geometric sequence.
  const cplx b1 = (*this)(1e-6);
  const cplx b2 = (*this)(1e-9);
  const cplx b3 = (*this)(1e-12);
  const cplx den = b1 + b3 - 2.0 * b2;
  b0_ = std::abs(den) > 1e-300 ? std::abs((b1 * b3 - b2 * b2) / den) : std::abs(b3);

  const TailClass ga = distribution_growth(a_);
  const double rate = ga.effective_rate();
  const double power = ga.effective_power();
  double C = 0.0;
  for (int k = 0; k <= 10; ++k) {
    double t = std::ldexp(1.0, k) * (1.0 + 1e-7);
    while (std::binary_search(breaks_.begin(), breaks_.end(), t)) t *= 1.0 + 1e-9;
    const double env = std::exp(power * std::log(t) - rate * t);
    C = std::max(C, std::abs((*this)(t)) / env);
  }
  growth_ = TailClass::exp_decay(rate, 2.0 * C + 1e-300, power, 1.0);
}

cplx ProductDistribution::operator()(double t) const {
  auto it = memo_.find(t);
  if (it != memo_.end()) return it->second;
  const cplx v = product_distribution(a_, psi_, t, inner_);
  memo_.emplace(t, v);
  return v;
}

HalfLineMeasure ProductDistribution::as_density() const {
  Density d = density::custom([this](double t) { return (*this)(t); }, 0.0,
                              growth_, "product_distribution");
  d.breakpoints = breaks_;
  return measure::from_density(std::move(d), "b");
}

std::vector<cplx> ProductDistribution::laplace(const std::vector<double>& s,
                                               const QuadratureSpec& spec) const {
  if (s.empty()) return {};
  const double s_max = *std::max_element(s.begin(), s.end());
  require(s_max < 0.0, ErrorKind::InvalidArgument, "Laplace samples must be < 0");
  IntegrandHint hint;
  hint.growth = GrowthBound{1.0, s_max, 0.0, kInf};
  const auto rep = integrate_halfline(
      [&s](double t) {
        Vec v(static_cast<Eigen::Index>(s.size()));
        for (std::size_t k = 0; k < s.size(); ++k) v(k) = std::exp(s[k] * t);
        return v;
      },
      as_density(), spec, hint);
  require(rep.converged, ErrorKind::NonConvergent,
          "b-integral tail not certified: " + std::string(to_string(rep.diagnosis)));
  std::vector<cplx> out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = -s[k] * rep.value(k);
  return out;
}

double verify_product_transform(const HalfLineMeasure& a,
                                const BernsteinFunction& psi,
                                const std::vector<double>& s_samples,
                                const QuadratureSpec& spec) {
  const ProductDistribution b(a, psi);
  require(b.b_at_zero() <= 1e-8, ErrorKind::ValidationFailed,
          "b(+0) does not vanish");
  const auto lb = b.laplace(s_samples, spec);
  double worst = 0.0;
  for (std::size_t k = 0; k < s_samples.size(); ++k) {
    const double s = s_samples[k];
    const cplx target = eval_laplace(a, s) * eval_bernstein(psi, s);
    const double gap = std::abs(lb[k] - target);
    if (gap == 0.0) continue;
    worst = std::max(worst, gap / std::max(std::abs(target), 1e-300));
  }
  return worst;
}

Vec stable_form(const std::function<cplx(double)>& dist,
                const TailClass& growth, const std::vector<double>& breaks,
                const Generator& A, const Vec& x, const QuadratureSpec& spec) {
  A.require_bounded("stable_form");
  require(x.size() == A.dim(), ErrorKind::InvalidArgument,
          "vector dimension does not match the generator");
  const Vec minus_ax = -(A.matrix() * x);
  Density d = density::custom(dist, 0.0, growth, "distribution");
  d.breakpoints = breaks;
  IntegrandHint hint;
  hint.growth = A.growth_bound(minus_ax.norm());
  const auto rep = integrate_halfline(
      [&A, &minus_ax](double t) { return A.apply(t, minus_ax); },
      measure::from_density(std::move(d)), spec, hint);
  raise_on_failure(rep, "stable_form");
  return rep.value;
}

Vec hp_apply_stable_form(const HalfLineMeasure& a, const Generator& A,
                         const Vec& x, const QuadratureSpec& spec) {
  require(in_LMT(a, A, {x}), ErrorKind::PreconditionFailed,
          "a(t) ||T(t) x|| does not vanish (not in LM_T)");
  std::vector<double> breaks;
  for (const Atom& at : a.atoms()) {
    if (at.location > 0.0) breaks.push_back(at.location);
  }
  if (a.density()) {
    breaks.insert(breaks.end(), a.density()->breakpoints.begin(),
                  a.density()->breakpoints.end());
  }
  const Vec rest = stable_form([&a](double t) { return distribution(a, t); },
                               distribution_growth(a), breaks, A, x, spec);
  return a.atom_at_zero() * x + rest;
}

bool in_LMT(const std::function<cplx(double)>& dist, const TailClass& growth,
            const Generator& A, const std::vector<Vec>& xs) {
  A.require_bounded("in_LMT");
  for (const Vec& x : xs) {
    require(x.size() == A.dim(), ErrorKind::InvalidArgument,
            "vector dimension does not match the generator");
    if (x.norm() == 0.0) continue;
    // Certificate: C t^P e^{-r t} * K e^{omega t} -> 0.
    const GrowthBound g = A.growth_bound(x.norm());
    const double net = g.omega - growth.effective_rate();
    const bool certified = net < 0.0 && std::isinf(g.valid_up_to);

    std::vector<double> v;
    for (int k = 0; k <= 20; ++k) {
      double t = std::ldexp(1.0, k) * (1.0 + 1e-9);
      v.push_back(std::abs(dist(t)) * A.apply(t, x).norm());
    }
    const double vmax = *std::max_element(v.begin(), v.end());
    const double last = v.back();
    const bool decays = last <= 1e-10 * vmax || last == 0.0;
    bool persists = !decays && last >= 1e-3 * vmax;
    for (std::size_t k = v.size() - 4; k + 1 < v.size() && persists; ++k) {
      if (v[k + 1] < v[k] * (1.0 - 1e-9)) persists = false;
    }
    if (decays) continue;
    if (persists) {
      require(!certified, ErrorKind::Inconclusive,
              "LM_T certificate and numeric trend disagree");
      return false;
    }
    require(certified, ErrorKind::Inconclusive,
            "LM_T membership is undecided on the test vector");
  }
  return true;
}

bool in_LMT(const HalfLineMeasure& a, const Generator& A,
            const std::vector<Vec>& xs) {
  return in_LMT([&a](double t) { return distribution(a, t); },
                distribution_growth(a), A, xs);
}

ProductReport product_residuals(const HalfLineMeasure& a,
                                  const BernsteinFunction& psi,
                                  const Generator& A, const Vec& x,
                                  const QuadratureSpec& spec) {
  require(in_LMT(a, A, {x}), ErrorKind::PreconditionFailed,
          "the product factorization needs g in LM_T");
  const ProductDistribution b(a, psi);
  ProductReport rep;
  rep.h_x = stable_form([&b](double t) { return b(t); }, b.growth(),
                        b.breakpoints(), A, x, spec);
  const Vec psi_g = bp_apply(psi, A, hp_apply(a, A, x, spec).value, spec).value;
  const Vec g_psi = hp_apply(a, A, bp_apply(psi, A, x, spec).value, spec).value;
  const double scale = rep.h_x.norm();
  auto rel = [scale](const Vec& d) {
    const double n = d.norm();
    return n == 0.0 ? 0.0 : n / std::max(scale, 1e-300);
  };
  rep.r1 = rel(psi_g - rep.h_x);
  rep.r2 = rel(g_psi - rep.h_x);
  rep.lmt_b = in_LMT([&b](double t) { return b(t); }, b.growth(), A, {x});
  return rep;
}

Vec reciprocal_inverse(const BernsteinFunction& psi, const Generator& A,
                       const Vec& x, const HalfLineMeasure& recip,
                       const QuadratureSpec& spec) {
  for (int k = 0; k < 10; ++k) {
    const double s = -0.1 * std::pow(100.0, k / 9.0);
    cplx lr;
    try {
      lr = eval_laplace(recip, s);
    } catch (const Error& e) {
      throw Error(ErrorKind::ValidationFailed,
                  std::string("transform of the reciprocal measure: ") + e.what());
    }
    const double gap = std::abs(lr * eval_bernstein(psi, s) - 1.0);
    require(gap <= 1e-6, ErrorKind::ValidationFailed,
            "L(recip) psi != 1 at s = " + std::to_string(s) + " (gap " +
                std::to_string(gap) + ")");
  }
  require(in_LMT(recip, A, {x}), ErrorKind::PreconditionFailed,
          "1/psi is not in LM_T on this vector");
  require(bounded_norm_certificate(recip, A, spec).certified,
          ErrorKind::PreconditionFailed,
          "(1/psi)(A) is not certified bounded");
  const Vec y = hp_apply(recip, A, x, spec).value;
  const double back = (bp_apply(psi, A, y, spec).value - x).norm();
  require(back <= 1e-6 * x.norm(), ErrorKind::NotInvertible,
          "psi(A) (1/psi)(A) x misses x by " + std::to_string(back));
  return y;
}

}  // namespace hpcalc

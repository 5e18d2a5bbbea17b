#include "hpcalc/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace hpcalc {

void QuadratureSpec::validate() const {
  require(abs_tol > 0.0 && rel_tol > 0.0, ErrorKind::InvalidArgument,
          "quadrature tolerances must be positive");
  require(max_panels >= 16, ErrorKind::InvalidArgument,
          "max_panels must be at least 16");
  require(t_split > 0.0, ErrorKind::InvalidArgument,
          "t_split must be positive");
  require(window_growth_factor > 1.0, ErrorKind::InvalidArgument,
          "window_growth_factor must exceed 1");
  require(divergence_ratio > 0.0 && divergence_ratio < 1.0,
          ErrorKind::InvalidArgument, "divergence_ratio must lie in (0, 1)");
}

QuadratureSpec QuadratureSpec::scaled(double factor) const {
  QuadratureSpec out = *this;
  out.abs_tol *= factor;
  out.rel_tol *= factor;
  return out;
}

namespace kronrod {

PanelRule panel_rule(double lo, double hi) {
  PanelRule rule{};
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kNodes[j];
    rule.t[2 * j] = center - dx;
    rule.t[2 * j + 1] = center + dx;
    rule.kronrod[2 * j] = rule.kronrod[2 * j + 1] = half * kKronrodWeights[j];
    const double g = (j % 2 == 1) ? half * kGaussWeights[j / 2] : 0.0;
    rule.gauss[2 * j] = rule.gauss[2 * j + 1] = g;
  }
  rule.t[14] = center;
  rule.kronrod[14] = half * kKronrodWeights[7];
  rule.gauss[14] = half * kGaussWeights[3];
  return rule;
}

}  // namespace kronrod

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTinyMass = 1e-300;
constexpr double kMaxHorizon = 1e12;
constexpr int kDivergentWindows = 4;

double max_abs(const Vec& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

// QUADPACK-style error of one component from the Kronrod/Gauss pair.
double component_error(double diff, double resabs, double resasc) {
  double err = diff;
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * resabs, err);
  }
  return err;
}

// Variable map w -> t for one stretch of the integration range.
struct Segment {
  enum class Map { Identity, Power, Inverse };
  Map map = Map::Identity;
  double p = 1.0;      // Power: t = w^p; Inverse: t = scale * w^-p
  double scale = 1.0;
  bool subtract = false;  // integrand is phi(t) - phi(0)

  std::pair<double, double> to_t(double w) const {
    switch (map) {
      case Map::Identity: return {w, 1.0};
      case Map::Power:
        return {std::pow(w, p), p * std::pow(w, p - 1.0)};
      case Map::Inverse: {
        const double t = scale * std::pow(w, -p);
        return {t, p * t / w};
      }
    }
    return {w, 1.0};
  }

  double to_w(double t) const {
    switch (map) {
      case Map::Identity: return t;
      case Map::Power: return std::pow(t, 1.0 / p);
      case Map::Inverse: return std::pow(t / scale, -1.0 / p);
    }
    return t;
  }
};

struct Panel {
  int segment = 0;
  double lo = 0.0;
  double hi = 0.0;
  Vec value;
  double err = 0.0;
  double mass = 0.0;
  double mass_err = 0.0;
  bool alive = true;
};

class Integrator {
 public:
  Integrator(const VecFn& phi, const HalfLineMeasure& a,
             const QuadratureSpec& spec, const IntegrandHint& hint)
      : phi_(phi), a_(a), spec_(spec), hint_(hint) {}

  IntegralReport run(double lo, double hi);

 private:
  void add_fixed(const Vec& v, double mass) {
    if (fixed_.size() == 0) {
      fixed_ = v;
    } else {
      fixed_ += v;
    }
    fixed_mass_ += mass;
  }

  Panel evaluate(int segment, double wlo, double whi);
  int push_panel(Panel p);
  // Bisect until the mass estimate is reliable; returns window mass.
  double add_window(int segment, double tlo, double thi);
  void add_range(int segment, double tlo, double thi);
  IntegralReport finalize(Diagnosis diagnosis);
  bool refine();

  std::vector<double> breakpoints_in(double tlo, double thi) const;

  const VecFn& phi_;
  const HalfLineMeasure& a_;
  const QuadratureSpec& spec_;
  const IntegrandHint& hint_;

  std::vector<Segment> segments_;
  std::vector<Panel> panels_;
  Vec phi0_;
  Vec fixed_;
  double fixed_mass_ = 0.0;
  double tail_err_ = 0.0;
  double truncation_ = 0.0;
  bool tail_certified_ = false;
  int evaluated_ = 0;
};

Panel Integrator::evaluate(int segment, double wlo, double whi) {
  const Segment& seg = segments_[segment];
  const Density& d = *a_.density();
  const auto rule = kronrod::panel_rule(wlo, whi);
  Panel out;
  out.segment = segment;
  out.lo = wlo;
  out.hi = whi;
  ++evaluated_;

  std::array<Vec, 15> f;
  std::array<double, 15> fnorm{};
  Eigen::Index dim = -1;
  for (int j = 0; j < 15; ++j) {
    const auto [t, jac] = seg.to_t(rule.t[j]);
    const cplx weight = (std::isfinite(t) && t > 0.0) ? d.value(t) * jac
                                                      : cplx(0.0);
    if (weight == cplx(0.0) || !std::isfinite(std::abs(weight))) {
      continue;
    }
    Vec v;
    if (seg.subtract) {
      v = hint_.increment ? hint_.increment(t) : Vec(phi_(t) - phi0_);
    } else {
      v = phi_(t);
    }
    fnorm[j] = v.norm() * std::abs(weight);
    f[j] = v * weight;
    dim = f[j].size();
  }
  if (dim < 0) {
    out.value = Vec();
    return out;
  }
  for (auto& v : f) {
    if (v.size() == 0) v = Vec::Zero(dim);
  }

  Vec k = Vec::Zero(dim);
  Vec g = Vec::Zero(dim);
  double mk = 0.0;
  double mg = 0.0;
  for (int j = 0; j < 15; ++j) {
    k += rule.kronrod[j] * f[j];
    g += rule.gauss[j] * f[j];
    mk += rule.kronrod[j] * fnorm[j];
    mg += rule.gauss[j] * fnorm[j];
  }
  double err = 0.0;
  for (Eigen::Index c = 0; c < dim; ++c) {
    const cplx mean = 0.5 * k(c) / (0.5 * (whi - wlo));
    double resabs = 0.0;
    double resasc = 0.0;
    for (int j = 0; j < 15; ++j) {
      resabs += rule.kronrod[j] * std::abs(f[j](c));
      resasc += rule.kronrod[j] * std::abs(f[j](c) - mean * 0.5);
    }
    err = std::max(err, component_error(std::abs(k(c) - g(c)), resabs, resasc));
  }
  out.value = std::move(k);
  out.err = err;
  out.mass = mk;
  out.mass_err = std::abs(mk - mg);
  return out;
}

int Integrator::push_panel(Panel p) {
  panels_.push_back(std::move(p));
  return static_cast<int>(panels_.size()) - 1;
}

std::vector<double> Integrator::breakpoints_in(double tlo, double thi) const {
  std::vector<double> pts;
  auto take = [&](double b) {
    if (b > tlo && b < thi) pts.push_back(b);
  };
  if (a_.density()) {
    for (double b : a_.density()->breakpoints) take(b);
  }
  for (double b : hint_.breakpoints) take(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

void Integrator::add_range(int segment, double tlo, double thi) {
  const Segment& seg = segments_[segment];
  std::vector<double> cuts{tlo};
  for (double b : breakpoints_in(tlo, thi)) cuts.push_back(b);
  cuts.push_back(thi);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double wlo = seg.to_w(cuts[i]);
    double whi = seg.to_w(cuts[i + 1]);
    if (wlo > whi) std::swap(wlo, whi);
    if (whi > wlo) push_panel(evaluate(segment, wlo, whi));
  }
}

double Integrator::add_window(int segment, double tlo, double thi) {
  const Segment& seg = segments_[segment];
  std::vector<std::pair<double, double>> work;
  std::vector<double> cuts{tlo};
  for (double b : breakpoints_in(tlo, thi)) cuts.push_back(b);
  cuts.push_back(thi);
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    work.emplace_back(seg.to_w(cuts[i]), seg.to_w(cuts[i + 1]));
  }
  double mass = 0.0;
  int budget = 64;
  while (!work.empty()) {
    auto [wlo, whi] = work.back();
    work.pop_back();
    Panel p = evaluate(segment, wlo, whi);
    if (p.mass_err > 0.05 * p.mass + kTinyMass && budget > 0) {
      --budget;
      const double mid = 0.5 * (wlo + whi);
      work.emplace_back(wlo, mid);
      work.emplace_back(mid, whi);
      continue;
    }
    mass += p.mass;
    push_panel(std::move(p));
  }
  return mass;
}

bool Integrator::refine() {
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry> queue;
  double total_err = tail_err_;
  Vec total = fixed_;
  for (std::size_t i = 0; i < panels_.size(); ++i) {
    const Panel& p = panels_[i];
    total_err += p.err;
    if (p.value.size() > 0) {
      total = total.size() == 0 ? p.value : Vec(total + p.value);
    }
    queue.emplace(p.err, static_cast<int>(i));
  }

  int since_resum = 0;
  while (true) {
    const double target =
        std::max(spec_.abs_tol, spec_.rel_tol * max_abs(total));
    if (total_err <= target) return true;
    if (static_cast<int>(panels_.size()) >= spec_.max_panels || queue.empty()) {
      return false;
    }
    const auto [err, idx] = queue.top();
    queue.pop();
    Panel& worst = panels_[idx];
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi) ||
        (worst.hi - worst.lo) <= 64.0 * kEps * std::abs(mid)) {
      continue;  // cannot split further; keep its error
    }
    Panel left = evaluate(worst.segment, worst.lo, mid);
    Panel right = evaluate(worst.segment, mid, worst.hi);
    total_err += left.err + right.err - worst.err;
    if (worst.value.size() > 0) total -= worst.value;
    for (const Panel* child : {&left, &right}) {
      if (child->value.size() == 0) continue;
      total = total.size() == 0 ? child->value : Vec(total + child->value);
    }
    panels_[idx].alive = false;
    const int li = push_panel(std::move(left));
    const int ri = push_panel(std::move(right));
    queue.emplace(panels_[li].err, li);
    queue.emplace(panels_[ri].err, ri);

    if (++since_resum == 256) {
      since_resum = 0;
      total_err = tail_err_;
      for (const Panel& p : panels_) {
        if (p.alive) total_err += p.err;
      }
    }
  }
}

IntegralReport Integrator::finalize(Diagnosis diagnosis) {
  std::vector<const Panel*> live;
  for (const Panel& p : panels_) {
    if (p.alive) live.push_back(&p);
  }
  // Fixed accumulation order: segment, then left endpoint.
  std::sort(live.begin(), live.end(), [](const Panel* x, const Panel* y) {
    if (x->segment != y->segment) return x->segment < y->segment;
    return x->lo < y->lo;
  });
  IntegralReport r;
  r.value = fixed_;
  r.absolute_mass = fixed_mass_;
  r.error_estimate = tail_err_;
  for (const Panel* p : live) {
    if (p->value.size() > 0) {
      r.value = r.value.size() == 0 ? p->value : Vec(r.value + p->value);
    }
    r.error_estimate += p->err;
    r.absolute_mass += p->mass;
  }
  if (r.value.size() == 0) {
    // Nothing was evaluated; probe the integrand for its dimension.
    const double probe = std::max(truncation_, 1.0);
    r.value = Vec::Zero(phi_(probe).size());
  }
  r.diagnosis = diagnosis;
  r.converged = diagnosis == Diagnosis::Converged;
  r.truncation_T = truncation_;
  r.tail_certified = tail_certified_;
  r.panels = static_cast<int>(live.size());
  return r;
}

IntegralReport Integrator::run(double lo, double hi) {
  spec_.validate();
  require(lo >= 0.0 && !(hi < lo), ErrorKind::InvalidArgument,
          "integration range must satisfy 0 <= lo <= hi");

  for (const Atom& atom : a_.atoms()) {
    if (atom.location < lo || !(atom.location < hi)) continue;
    const Vec v = phi_(atom.location);
    add_fixed(v * atom.weight, std::abs(atom.weight) * v.norm());
  }
  truncation_ = std::isfinite(hi) ? hi : lo;
  if (!a_.density() || !(lo < hi)) {
    tail_certified_ = true;
    return finalize(Diagnosis::Converged);
  }
  const Density& d = *a_.density();

  // Head: [lo, head_end], with the endpoint singularity at zero removed.
  const double head_end = std::min(hi, std::max(lo, spec_.t_split));
  if (lo < head_end) {
    Segment seg;
    if (lo == 0.0) {
      double exponent = d.sing_exponent + hint_.zero_exponent;
      if (d.sing_exponent <= -1.0) {
        if (!d.cumulative || hint_.zero_exponent < 0.0) {
          return finalize(Diagnosis::SingularAtZero);
        }
        phi0_ = phi_(0.0);
        const cplx head_mass = d.cumulative(head_end);
        add_fixed(phi0_ * head_mass, phi0_.norm() * std::abs(head_mass));
        seg.subtract = true;
        exponent = -0.5;
      } else if (exponent <= -1.0) {
        return finalize(Diagnosis::SingularAtZero);
      }
      if (exponent < 0.0) {
        seg.map = Segment::Map::Power;
        seg.p = 1.0 / (1.0 + exponent);
      }
    }
    segments_.push_back(seg);
    add_range(static_cast<int>(segments_.size()) - 1, lo, head_end);
  }

  double start = std::max(head_end, lo);
  if (!(start < hi)) {
    tail_certified_ = true;
    return finalize(refine() ? Diagnosis::Converged
                             : Diagnosis::PanelBudgetExceeded);
  }
  segments_.push_back(Segment{});
  const int linear = static_cast<int>(segments_.size()) - 1;
  const double growth = spec_.window_growth_factor;

  auto windows_to = [&](double end) {
    double t = start;
    while (t < end) {
      const double next = std::min(end, std::max(t * growth, t + 1.0));
      add_window(linear, t, next);
      t = next;
    }
    start = std::max(start, end);
  };

  const double tail_tol = spec_.abs_tol / 10.0;
  const TailClass& tc = d.tail;

  if (std::isfinite(hi)) {
    windows_to(hi);
    truncation_ = hi;
    tail_certified_ = true;
  } else if (tc.kind == TailClass::Kind::Compact) {
    windows_to(std::max(start, tc.support));
    truncation_ = std::max(start, tc.support);
    tail_certified_ = true;
  } else if (hint_.growth) {
    const GrowthBound& g = *hint_.growth;
    const double coef = tc.coef * g.coef;
    const double power = tc.effective_power() - g.decay_power;
    const double kappa = tc.effective_rate() - g.omega;
    const double from = std::max({tc.from, 1.0, start});
    if (kappa > 1e-14) {
      double T = from;
      while (T < kMaxHorizon &&
             !(envelope_tail_bound(coef, power, kappa, T) <= tail_tol)) {
        T *= growth;
      }
      if (T <= g.valid_up_to && T < kMaxHorizon) {
        windows_to(T);
        tail_err_ += envelope_tail_bound(coef, power, kappa, T);
        truncation_ = T;
        tail_certified_ = true;
      }
    } else if (std::abs(kappa) <= 1e-14 && power < -1.0 &&
               !std::isfinite(g.valid_up_to)) {
      windows_to(from);
      Segment inv;
      inv.map = Segment::Map::Inverse;
      inv.scale = from;
      inv.p = 1.0 / (-power - 1.0);
      segments_.push_back(inv);
      push_panel(evaluate(static_cast<int>(segments_.size()) - 1, 0.0, 1.0));
      truncation_ = kInf;
      tail_certified_ = true;
    }
  }

  if (!tail_certified_) {
    // Empirical doubling windows.
    double prev = -1.0;
    int nondecay = 0;
    int decaying = 0;
    double t = start;
    while (true) {
      const double next = std::max(t * growth, t + 1.0);
      const double mass = add_window(linear, t, next);
      t = next;
      truncation_ = t;
      if (prev >= 0.0) {
        const double q = prev > kTinyMass ? mass / prev
                                          : (mass > kTinyMass ? kInf : 0.0);
        if (q >= spec_.divergence_ratio && mass > kTinyMass) {
          ++nondecay;
        } else {
          nondecay = 0;
        }
        decaying = q < spec_.divergence_ratio ? decaying + 1 : 0;
        if (nondecay >= kDivergentWindows) {
          return finalize(Diagnosis::DivergentTail);
        }
        double value_scale = 0.0;
        for (const Panel& p : panels_) {
          if (p.value.size() > 0) value_scale = std::max(value_scale, max_abs(p.value));
        }
        const double tol = std::max(tail_tol, spec_.rel_tol * value_scale / 10.0);
        const double tail_est = q < 1.0 ? mass * q / (1.0 - q) : kInf;
        if ((decaying >= 2 && tail_est <= tol) || (mass == 0.0 && prev == 0.0)) {
          tail_err_ += std::isfinite(tail_est) ? tail_est : 0.0;
          break;
        }
      }
      prev = mass;
      if (t > kMaxHorizon ||
          static_cast<int>(panels_.size()) >= spec_.max_panels) {
        return finalize(Diagnosis::PanelBudgetExceeded);
      }
    }
  }

  return finalize(refine() ? Diagnosis::Converged
                           : Diagnosis::PanelBudgetExceeded);
}

}  // namespace

IntegralReport integrate_interval(const VecFn& integrand,
                                  const HalfLineMeasure& a, double lo,
                                  double hi, const QuadratureSpec& spec,
                                  const IntegrandHint& hint) {
  Integrator integrator(integrand, a, spec, hint);
  return integrator.run(lo, hi);
}

IntegralReport integrate_halfline(const VecFn& integrand,
                                  const HalfLineMeasure& a,
                                  const QuadratureSpec& spec,
                                  const IntegrandHint& hint) {
  return integrate_interval(integrand, a, 0.0, kInf, spec, hint);
}

HalfLineMeasure StieltjesFunction::derivative_measure() const {
  require(static_cast<bool>(derivative), ErrorKind::InvalidArgument,
          "Stieltjes integrator needs a derivative handle");
  auto df = derivative;
  return measure::from_density(
      density::custom([df](double t) { return cplx(df(t)); },
                      derivative_sing_exponent, derivative_tail, "stieltjes"),
      "df");
}

IntegralReport integrate_stieltjes(const VecFn& integrand,
                                   const StieltjesFunction& f,
                                   const QuadratureSpec& spec,
                                   const IntegrandHint& hint) {
  return integrate_halfline(integrand, f.derivative_measure(), spec, hint);
}

ScalarIntegral integrate_scalar(const std::function<double(double)>& f,
                                double lo, double hi, double abs_tol,
                                double rel_tol, int max_panels) {
  struct Piece {
    double lo, hi, value, err;
  };
  auto eval = [&](double a, double b) {
    const auto rule = kronrod::panel_rule(a, b);
    std::array<double, 15> y{};
    double k = 0.0;
    double g = 0.0;
    double resabs = 0.0;
    for (int j = 0; j < 15; ++j) {
      y[j] = f(rule.t[j]);
      k += rule.kronrod[j] * y[j];
      g += rule.gauss[j] * y[j];
      resabs += rule.kronrod[j] * std::abs(y[j]);
    }
    const double mean = k / (b - a);
    double resasc = 0.0;
    for (int j = 0; j < 15; ++j) resasc += rule.kronrod[j] * std::abs(y[j] - mean);
    return Piece{a, b, k, component_error(std::abs(k - g), resabs, resasc)};
  };
  ScalarIntegral out;
  if (!(hi > lo)) {
    out.converged = true;
    return out;
  }
  auto cmp = [](const Piece& x, const Piece& y) { return x.err < y.err; };
  std::priority_queue<Piece, std::vector<Piece>, decltype(cmp)> queue(cmp);
  Piece first = eval(lo, hi);
  double total = first.value;
  double err = first.err;
  queue.push(first);
  int count = 1;
  std::vector<Piece> frozen;
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && count < max_panels &&
         !queue.empty()) {
    Piece worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi)) {
      frozen.push_back(worst);
      continue;
    }
    Piece left = eval(worst.lo, mid);
    Piece right = eval(mid, worst.hi);
    total += left.value + right.value - worst.value;
    err += left.err + right.err - worst.err;
    queue.push(left);
    queue.push(right);
    ++count;
  }
  std::vector<Piece> all = std::move(frozen);
  while (!queue.empty()) {
    all.push_back(queue.top());
    queue.pop();
  }
  std::sort(all.begin(), all.end(),
            [](const Piece& x, const Piece& y) { return x.lo < y.lo; });
  out.value = 0.0;
  out.error = 0.0;
  for (const Piece& p : all) {
    out.value += p.value;
    out.error += p.err;
  }
  out.converged = out.error <= std::max(abs_tol, rel_tol * std::abs(out.value));
  return out;
}

}  // namespace hpcalc

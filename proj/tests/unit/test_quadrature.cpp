#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "hpcalc/quadrature.hpp"

using namespace hpcalc;
using doctest::Approx;

namespace {

Vec scalar(double v) { return Vec::Constant(1, v); }

StieltjesFunction one_minus_exp() {
  StieltjesFunction f;
  f.value = [](double t) { return 1.0 - std::exp(-t); };
  f.derivative = [](double t) { return std::exp(-t); };
  f.derivative_tail = TailClass::exp_decay(1.0, 1.0);
  f.value_at_zero = 0.0;
  return f;
}

}  // namespace

TEST_CASE("half-line integrals") {
  const auto zero = integrate_halfline([](double) { return Vec::Zero(2); }, measure::lebesgue());
  CHECK(zero.converged);
  CHECK(zero.value.norm() == 0.0);

  IntegrandHint decay;
  decay.growth = GrowthBound{1.0, -1.0, 0.0, kInf};
  const auto unit = integrate_halfline([](double t) { return scalar(std::exp(-t)); },
                                       measure::lebesgue(), {}, decay);
  CHECK(unit.converged);
  CHECK(unit.value(0).real() == Approx(1.0).epsilon(1e-10));
  CHECK(unit.tail_certified);

  const auto div = integrate_halfline([](double) { return scalar(1.0); }, measure::lebesgue());
  CHECK_FALSE(div.converged);
  CHECK(div.diagnosis == Diagnosis::DivergentTail);

  const auto gam = integrate_halfline([](double t) { return scalar(std::exp(-t)); },
                                      measure::fractional(0.5));
  CHECK(gam.converged);
  CHECK(std::abs(gam.value(0).real() - 1.0) <= 1e-8);
}

TEST_CASE("atom at zero is evaluated directly") {
  int calls_at_zero = 0;
  const auto rep = integrate_halfline(
      [&](double t) {
        if (t == 0.0) ++calls_at_zero;
        return scalar(3.0);
      },
      measure::unit_atom(0.0, 2.0));
  CHECK(rep.value(0).real() == 6.0);
  CHECK(calls_at_zero == 1);
}

TEST_CASE("Stieltjes integrals") {
  StieltjesFunction flat;
  flat.value = [](double) { return 4.0; };
  flat.derivative = [](double) { return 0.0; };
  flat.value_at_zero = 4.0;
  CHECK(integrate_stieltjes([](double) { return scalar(1.0); }, flat).value(0) == cplx(0.0));

  const auto total = integrate_stieltjes([](double) { return scalar(1.0); }, one_minus_exp());
  CHECK(total.value(0).real() == Approx(1.0).epsilon(1e-10));

  StieltjesFunction root;
  root.value = [](double t) { return std::sqrt(t) / std::tgamma(1.5); };
  root.derivative = [](double t) { return 0.5 / (std::sqrt(t) * std::tgamma(1.5)); };
  root.derivative_sing_exponent = -0.5;
  root.derivative_tail = TailClass::poly_decay(0.5, 0.5 / std::tgamma(1.5));
  root.value_at_zero = 0.0;
  const auto g = integrate_stieltjes([](double t) { return scalar(std::exp(-t)); }, root);
  CHECK(std::abs(g.value(0).real() - 1.0) <= 1e-8);
}

TEST_CASE("finite intervals and scalar integration") {
  const auto rep = integrate_interval([](double t) { return scalar(t * t); },
                                      measure::lebesgue(), 1.0, 2.0);
  CHECK(rep.value(0).real() == Approx(7.0 / 3.0).epsilon(1e-13));
  const auto si = integrate_scalar([](double t) { return std::sin(t); }, 0.0, M_PI, 1e-14, 1e-13);
  CHECK(si.converged);
  CHECK(si.value == Approx(2.0).epsilon(1e-13));
}

TEST_CASE("panel budget is reported") {
  QuadratureSpec tight;
  tight.max_panels = 16;
  tight.abs_tol = 1e-15;
  tight.rel_tol = 1e-15;
  const auto rep = integrate_halfline([](double t) { return scalar(std::sin(40.0 * t) * std::exp(-t)); },
                                      measure::lebesgue(), tight);
  CHECK_FALSE(rep.converged);
  CHECK(rep.diagnosis == Diagnosis::PanelBudgetExceeded);
}

TEST_CASE("spec validation") {
  QuadratureSpec s;
  s.abs_tol = 0.0;
  CHECK_THROWS_AS(s.validate(), Error);
  s = {};
  s.divergence_ratio = 1.0;
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("property: Gamma integrals within the reported error") {
  testgen::Rng rng(3);
  for (int trial = 0; trial < 12; ++trial) {
    const double alpha = rng.uniform(0.1, 4.0);
    const double r = rng.uniform(0.2, 5.0);
    // int t^(alpha-1)/Gamma(alpha) e^{-r t} dt = r^-alpha
    const auto rep = integrate_halfline([r](double t) { return scalar(std::exp(-r * t)); },
                                        measure::fractional(alpha));
    REQUIRE(rep.converged);
    const double want = std::pow(r, -alpha);
    CHECK(std::abs(rep.value(0).real() - want) <= std::max(rep.error_estimate, 1e-14 * want));
    CHECK(std::abs(rep.value(0).real() - want) <= 1e-8 * want);
  }
}

TEST_CASE("property: linearity in the integrand") {
  testgen::Rng rng(29);
  const auto a = measure::fractional(0.7) + measure::unit_atom(0.3, 2.0);
  for (int trial = 0; trial < 6; ++trial) {
    const double p = rng.uniform(0.3, 3.0), q = rng.uniform(0.3, 3.0);
    const cplx c1(rng.normal(), rng.normal()), c2(rng.normal(), rng.normal());
    auto f = [p](double t) { return scalar(std::exp(-p * t)); };
    auto g = [q](double t) { return scalar(std::cos(t) * std::exp(-q * t)); };
    const auto sum = integrate_halfline([&](double t) { return Vec(c1 * f(t) + c2 * g(t)); }, a);
    const auto rf = integrate_halfline(f, a), rg = integrate_halfline(g, a);
    const double tol = std::abs(c1) * rf.error_estimate + std::abs(c2) * rg.error_estimate +
                       sum.error_estimate + 1e-14;
    CHECK(std::abs(sum.value(0) - c1 * rf.value(0) - c2 * rg.value(0)) <= tol);
  }
}

TEST_CASE("property: refinement never flips a converged verdict") {
  struct Case {
    VecFn fn;
    HalfLineMeasure a;
  };
  const std::vector<Case> corpus = {
      {[](double t) { return scalar(std::exp(-t)); }, measure::lebesgue()},
      {[](double t) { return scalar(1.0 / (1.0 + t * t)); }, measure::lebesgue()},
      {[](double t) { return scalar(std::exp(-0.1 * t)); }, measure::fractional(0.3)},
      {[](double t) { return scalar(std::exp(-2.0 * t) * std::cos(3.0 * t)); },
       measure::fractional(1.7)},
      {[](double t) { return scalar(std::exp(-t)); }, measure::from_density(density::volterra_f())},
  };
  for (const Case& c : corpus) {
    QuadratureSpec spec;
    for (int k = 0; k < 4; ++k) {
      const auto rep = integrate_halfline(c.fn, c.a, spec);
      CHECK(rep.converged);
      spec = spec.scaled(0.5);
    }
  }
}

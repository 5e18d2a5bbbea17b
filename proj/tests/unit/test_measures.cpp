#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "hpcalc/measures.hpp"

using namespace hpcalc;
using doctest::Approx;

TEST_CASE("laplace transform of simple measures") {
  CHECK(eval_laplace(measure::unit_atom(0.0), -1.0).real() == Approx(1.0).epsilon(1e-14));
  CHECK(eval_laplace(measure::lebesgue(-1.0), -2.0).real() == Approx(-0.5).epsilon(1e-10));
  CHECK(eval_laplace(measure::fractional(1.0), -1.0).real() == Approx(1.0).epsilon(1e-10));
  CHECK(eval_laplace(measure::fractional(0.5), -4.0).real() == Approx(0.5).epsilon(1e-9));
}

TEST_CASE("closed forms agree with quadrature") {
  const auto a = measure::from_density(density::power_exp(cplx(2.0, -1.0), 0.7, 0.3)) +
                 measure::unit_atom(1.5, cplx(0.0, 2.0));
  for (double s : {-0.1, -1.0, -7.5}) {
    const auto cf = laplace_closed_form(a, s);
    REQUIRE(cf.has_value());
    CHECK(std::abs(eval_laplace(a, s) - *cf) <= 1e-9 * std::abs(*cf));
  }
}

TEST_CASE("distribution function") {
  CHECK(distribution(measure::lebesgue(-1.0), 3.0).real() == Approx(-3.0));
  CHECK(distribution(measure::fractional(0.5), -1.0) == cplx(0.0));
  const auto atom = measure::unit_atom(2.0);
  CHECK(distribution(atom, 1.0) == cplx(0.0));
  CHECK(distribution(atom, 3.0) == cplx(1.0));
  // right-closed: the atom at t is included
  CHECK(distribution(atom, 2.0) == cplx(1.0));
  // the atom at zero is excluded by convention
  CHECK(distribution(measure::unit_atom(0.0), 5.0) == cplx(0.0));
}

TEST_CASE("distribution of the Volterra density matches its closed cumulative") {
  const auto f = measure::from_density(density::volterra_f(1.0, 1.0));
  const double want = 1.48120380451529;  // mpmath
  CHECK(distribution(f, 1.0).real() == Approx(want).epsilon(1e-10));
}

TEST_CASE("tail variation") {
  CHECK(tail_variation(measure::unit_atom(1.0), 2.0) == 0.0);
  const auto e = measure::from_density(density::power_exp(1.0, 0.0, 1.0));
  // an upper bound, tight to round-off margins
  for (double T : {0.0, 5.0}) {
    const double v = tail_variation(e, T), exact = std::exp(-T);
    CHECK(v >= exact);
    CHECK(v <= exact * (1.0 + 1e-8));
  }
  double prev = kInf;
  for (double T : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double v = tail_variation(measure::fractional(0.6).scaled(cplx(0, 1)) + e, T);
    CHECK(v <= prev);
    prev = v;
  }
}

TEST_CASE("invalid measures are rejected") {
  CHECK_THROWS_AS(HalfLineMeasure({{-1.0, 1.0}}, std::nullopt), Error);
  CHECK_THROWS_AS(HalfLineMeasure({{1.0, 1.0}, {1.0, 2.0}}, std::nullopt), Error);
  CHECK_THROWS_AS(measure::fractional(0.0), Error);
  CHECK_THROWS_AS(density::power_exp(1.0, -1.5, 1.0), Error);
  CHECK_THROWS_AS(density::table({0.0, 1.0}, {1.0}), Error);
}

TEST_CASE("property: laplace transform is linear") {
  testgen::Rng rng(11);
  for (int trial = 0; trial < 8; ++trial) {
    const cplx alpha(rng.normal(), rng.normal()), beta(rng.normal(), rng.normal());
    const auto a = measure::from_density(
        density::power_exp(cplx(rng.normal(), 0.0), rng.uniform(-0.8, 2.0), rng.uniform(0.0, 2.0)));
    const auto b = measure::unit_atom(rng.uniform(0.0, 3.0), cplx(rng.normal(), rng.normal()));
    const double s = -rng.uniform(0.1, 10.0);
    const cplx lhs = eval_laplace(a.scaled(alpha) + b.scaled(beta), s);
    const cplx rhs = alpha * eval_laplace(a, s) + beta * eval_laplace(b, s);
    CHECK(std::abs(lhs - rhs) <= 1e-8 * (1.0 + std::abs(rhs)));
  }
}

TEST_CASE("property: distribution is a step function for atomic measures") {
  testgen::Rng rng(5);
  std::vector<Atom> atoms;
  for (int k = 0; k < 5; ++k) atoms.push_back({0.5 + k + rng.uniform(0.0, 0.4), rng.normal()});
  const HalfLineMeasure a(atoms, std::nullopt);
  for (std::size_t k = 0; k + 1 < atoms.size(); ++k) {
    const double lo = atoms[k].location, hi = atoms[k + 1].location;
    const cplx v = distribution(a, lo);
    for (int j = 1; j < 5; ++j) CHECK(distribution(a, lo + (hi - lo) * j / 5.0) == v);
  }
}

#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "hpcalc/bernstein.hpp"
#include "hpcalc/oracle.hpp"

using namespace hpcalc;
using testgen::diag;
using testgen::vec;
using doctest::Approx;

namespace {
const double kE = std::exp(1.0);
const Mat kUpper = (Mat(2, 2) << -1.0, 1.0, 0.0, -2.0).finished();
}  // namespace

TEST_CASE("scalar Bernstein functions") {
  CHECK(eval_bernstein(neg_power_bernstein(0.5), 0.0) == 0.0);
  CHECK(eval_bernstein(neg_power_bernstein(0.5), -4.0) == Approx(-2.0).epsilon(1e-10));
  CHECK(eval_bernstein(log_shift(), -(kE - 1.0)) == Approx(-1.0).epsilon(1e-10));
  CHECK(eval_bernstein(single_atom(2.0), -1.5) == Approx(std::expm1(-3.0)).epsilon(1e-13));
  const BernsteinFunction shifted(-0.5, measure::unit_atom(1.0, 1.0), "shifted");
  CHECK(eval_bernstein(shifted, 0.0) == -0.5);
}

TEST_CASE("invalid Bernstein data is rejected") {
  CHECK_THROWS_AS(neg_power_bernstein(1.0), Error);
  CHECK_THROWS_AS(single_atom(0.0), Error);
  CHECK_THROWS_AS(BernsteinFunction(0.1, measure::zero(), "positive"), Error);
  CHECK_THROWS_AS(BernsteinFunction(0.0, measure::unit_atom(1.0, -1.0), "negative rho"), Error);
  // int_1^inf u^-1 du diverges
  CHECK_THROWS_AS(BernsteinFunction(0.0, measure::lebesgue(1.0), "lebesgue rho"), Error);
}

TEST_CASE("Bochner-Phillips operator") {
  const Generator jb(testgen::jordan(-1.0, 3.0));
  const Vec x = vec({0.5, -1.0});
  const Vec atom = bp_apply(single_atom(0.7), jb, x).value;
  CHECK((atom - (jb.apply(0.7, x) - x)).norm() <= 1e-12);

  const Generator d14(diag({-1.0, -4.0}));
  const Vec np = bp_apply(neg_power_bernstein(0.5), d14, vec({1.0, 1.0})).value;
  CHECK((np - vec({-1.0, -2.0})).norm() <= 1e-7);

  const Vec ls = bp_apply(log_shift(), Generator(diag({-(kE - 1.0)})), vec({1.0})).value;
  CHECK(std::abs(ls(0) + 1.0) <= 1e-7);

  const BernsteinFunction shifted(-0.5, measure::unit_atom(1.0, 1.0), "shifted");
  const Vec sv = bp_apply(shifted, d14, vec({1.0, 1.0})).value;
  CHECK(sv(0).real() == Approx(-0.5 + std::expm1(-1.0)).epsilon(1e-12));
}

TEST_CASE("psi tilde density") {
  const auto atom = single_atom(2.0);
  CHECK(psi_tilde_density(atom, 3.0) == 0.0);
  CHECK(psi_tilde_density(atom, 1.0) == Approx(1.0));
  for (double beta : {0.2, 0.5, 0.8})
    CHECK(psi_tilde_density(neg_power_bernstein(beta), 1.0) ==
          Approx(1.0 / std::tgamma(1.0 - beta)).epsilon(1e-10));
  const BernsteinFunction shifted(-0.5, measure::unit_atom(1.0, 1.0), "shifted");
  CHECK_THROWS_AS(psi_tilde_density(shifted, 1.0), Error);
}

TEST_CASE("Bernstein integral representation residuals") {
  CHECK(representation_residual(single_atom(1.3), Generator(testgen::jordan(-0.5, 2.0)), vec({1.0, 1.0})) <= 1e-9);
  CHECK(representation_residual(neg_power_bernstein(0.5), Generator(diag({-1.0, -4.0})), vec({1.0, 1.0})) <= 1e-6);
  CHECK(representation_residual(log_shift(), Generator(kUpper), vec({1.0, 1.0})) <= 1e-6);
}

TEST_CASE("property: psi(s)/s is the Laplace transform of psi tilde") {
  for (const auto& psi : {single_atom(1.0), neg_power_bernstein(0.5), neg_power_bernstein(0.25), log_shift()}) {
    const auto f = psi_tilde_measure(psi);
    for (int k = 0; k < 20; ++k) {
      const double s = -0.1 * std::pow(100.0, k / 19.0);
      const double want = eval_bernstein(psi, s) / s;
      CHECK(std::abs(eval_laplace(f, s).real() - want) <= 1e-7 * std::abs(want));
    }
  }
}

TEST_CASE("property: Bernstein functions are nonpositive and nondecreasing") {
  testgen::Rng rng(13);
  for (const auto& psi : {neg_power_bernstein(rng.uniform(0.05, 0.95)), log_shift(), single_atom(rng.uniform(0.1, 3.0))}) {
    double prev = -kInf;
    for (int k = 0; k < 15; ++k) {
      const double s = -30.0 + 30.0 * k / 14.0;
      const double v = eval_bernstein(psi, s);
      CHECK(v <= 0.0);
      CHECK(v >= prev - 1e-12);
      prev = v;
    }
  }
}

TEST_CASE("property: bp_apply agrees with the spectral oracle") {
  testgen::Rng rng(55);
  for (int trial = 0; trial < 5; ++trial) {
    const Generator A(testgen::random_stable(rng));
    const Vec x = testgen::random_vector(rng, A.dim());
    const double beta = rng.uniform(0.1, 0.9);
    CHECK(testgen::rel_gap(bp_apply(neg_power_bernstein(beta), A, x).value,
                           spectral_apply(ScalarFunction::bernstein_neg_power(beta), A, x)) <= 1e-6);
    CHECK(testgen::rel_gap(bp_apply(log_shift(), A, x).value,
                           spectral_apply(ScalarFunction::log_shift(), A, x)) <= 1e-6);
  }
}

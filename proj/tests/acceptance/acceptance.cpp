// One PASS/FAIL line per acceptance criterion, with the measured worst case,
// its limit, and the wall-clock time against the budget.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "generators.hpp"
#include "hpcalc/algebra.hpp"
#include "hpcalc/oracle.hpp"
#include "hpcalc/special_functions.hpp"

using namespace hpcalc;
using testgen::Rng;

namespace {

const double kE = std::exp(1.0);

struct Outcome {
  bool ok = true;
  double worst = 0.0;
  double limit = 0.0;
  std::string note;
};

// Folds a measured value into the outcome; values above limit fail.
void record(Outcome& o, double value, double limit) {
  o.limit = limit;
  if (!(value <= limit)) o.ok = false;
  if (!(value <= o.worst)) o.worst = value;
}

void expect(Outcome& o, bool cond, const std::string& what) {
  if (!cond) {
    o.ok = false;
    o.note += (o.note.empty() ? "" : "; ") + what;
  }
}

int failures = 0;

void run(int id, const char* title, double budget, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o.ok = false;
    o.note = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= budget;
  const bool pass = o.ok && in_time;
  if (!pass) ++failures;
  std::printf("%s [%2d] %-36s worst %.3e (limit %.1e)  %.2f s (budget %.0f s)%s%s\n",
              pass ? "PASS" : "FAIL", id, title, o.worst, o.limit, secs, budget,
              in_time ? "" : "  over budget", o.note.empty() ? "" : ("  " + o.note).c_str());
  std::fflush(stdout);
}

testgen::StableSpec corpus_spec() {
  testgen::StableSpec s;
  s.max_dim = 6;
  s.re_lo = -5.0;
  s.re_hi = -0.2;
  s.max_condition = 100.0;
  return s;
}

std::vector<double> s_samples(int n) {
  std::vector<double> s;
  for (int k = 0; k < n; ++k) s.push_back(-0.1 * std::pow(100.0, k / double(n - 1)));
  return s;
}

Outcome oracle_equivalence() {
  Outcome o;
  Rng rng(1001);
  const auto volterra = measure::from_density(density::volterra_f(1.0, 1.0));
  using Eval = std::function<Vec(const Generator&, const Vec&)>;
  const std::vector<std::pair<Eval, ScalarFunction>> cases = {
      {[](const Generator& A, const Vec& x) { return hp_apply(measure::lebesgue(-1.0), A, x).value; },
       ScalarFunction::reciprocal()},
      {[](const Generator& A, const Vec& x) { return hp_apply(measure::fractional(0.5), A, x).value; },
       ScalarFunction::neg_power(0.5)},
      {[](const Generator& A, const Vec& x) { return hp_apply(measure::fractional(1.5), A, x).value; },
       ScalarFunction::neg_power(1.5)},
      {[](const Generator& A, const Vec& x) { return bp_apply(neg_power_bernstein(0.5), A, x).value; },
       ScalarFunction::bernstein_neg_power(0.5)},
      {[](const Generator& A, const Vec& x) { return bp_apply(log_shift(), A, x).value; },
       ScalarFunction::log_shift()},
      {[&](const Generator& A, const Vec& x) { return hp_apply(volterra, A, x).value; },
       ScalarFunction::log_inverse()},
  };
  for (int trial = 0; trial < 20; ++trial) {
    const Generator A(testgen::random_stable(rng, corpus_spec()));
    const Vec x = testgen::random_vector(rng, A.dim());
    for (const auto& [eval, g] : cases) record(o, testgen::rel_gap(eval(A, x), spectral_apply(g, A, x)), 1e-6);
  }
  return o;
}

Outcome inverse_by_negative_lebesgue() {
  Outcome o;
  Rng rng(1002);
  QuadratureSpec tight;
  tight.abs_tol = 1e-13;
  tight.rel_tol = 1e-11;
  for (int trial = 0; trial < 10; ++trial) {
    const Generator A(testgen::random_stable(rng, corpus_spec()));
    expect(o, A.injective(), "generator not injective");
    const Vec x = testgen::random_vector(rng, A.dim());
    const Vec want = A.matrix().partialPivLu().solve(x);
    const Vec got = hp_apply(measure::lebesgue(-1.0), A, x, tight).value;
    record(o, (got - want).norm() / want.norm(), 1e-8);
  }
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = -1.0;
  Vec e2 = Vec::Zero(2);
  e2(1) = 1.0;
  expect(o, !in_domain(measure::lebesgue(-1.0), Generator(D), e2).member, "diag(-1, 0) member");
  return o;
}

Outcome commutation() {
  Outcome o;
  Rng rng(1003);
  std::vector<Mat> gens = {testgen::jordan(-1.0, 10.0), testgen::jordan(-0.5, 2.0)};
  for (int k = 0; k < 4; ++k) gens.push_back(testgen::random_stable(rng, corpus_spec()));
  const std::vector<HalfLineMeasure> measures = {
      measure::lebesgue(-1.0),
      measure::fractional(0.5),
      measure::fractional(1.5),
      measure::unit_atom(0.7, cplx(1.0, -2.0)),
      measure::from_density(density::power_exp(1.0, 0.0, 1.0)),
      measure::from_density(density::volterra_f(1.0, 1.0)),
  };
  for (const Mat& M : gens) {
    const Generator A(M);
    const Vec x = testgen::random_vector(rng, A.dim());
    for (const auto& a : measures) record(o, commutation_residual(a, A, x), 1e-6);
  }
  return o;
}

Outcome representation() {
  Outcome o;
  Rng rng(1004);
  const std::vector<BernsteinFunction> psis = {single_atom(1.0), neg_power_bernstein(0.5), log_shift()};
  for (int trial = 0; trial < 5; ++trial) {
    const Generator A(testgen::random_stable(rng, corpus_spec()));
    const Vec x = testgen::random_vector(rng, A.dim());
    for (const auto& psi : psis) record(o, representation_residual(psi, A, x), 1e-6);
  }
  double scalar_worst = 0.0;
  for (const auto& psi : psis) {
    const auto f = psi_tilde_measure(psi);
    for (double s : s_samples(20)) {
      const double want = eval_bernstein(psi, s) / s;
      scalar_worst = std::max(scalar_worst, std::abs(eval_laplace(f, s).real() - want) / std::abs(want));
    }
  }
  expect(o, scalar_worst <= 1e-7, "scalar identity gap " + std::to_string(scalar_worst));
  return o;
}

Outcome product() {
  Outcome o;
  Rng rng(1005);
  struct Pair {
    HalfLineMeasure a;
    BernsteinFunction psi;
  };
  const std::vector<Pair> pairs = {
      {measure::lebesgue(-1.0), single_atom(1.0)},
      {measure::lebesgue(-1.0), neg_power_bernstein(0.5)},
      {measure::fractional(0.5), neg_power_bernstein(0.3)},
      {measure::from_density(density::power_exp(1.0, 0.0, 1.0)), log_shift()},
  };
  const auto s = s_samples(20);
  double transform_worst = 0.0, lmt_cases = 0.0;
  for (const Pair& p : pairs) {
    transform_worst = std::max(transform_worst, verify_product_transform(p.a, p.psi, s));
    const Generator A(testgen::random_stable(rng, corpus_spec()));
    const Vec x = testgen::random_vector(rng, A.dim());
    const ProductReport rep = product_residuals(p.a, p.psi, A, x);
    record(o, std::max(rep.r1, rep.r2), 1e-5);
    if (in_LMT(p.a, A, {x}) && A.spectral_abscissa() < 0.0) {
      lmt_cases += 1.0;
      expect(o, rep.lmt_b, "LM_T closure fails for " + p.psi.label());
    }
  }
  expect(o, transform_worst <= 1e-6, "transform error " + std::to_string(transform_worst));
  expect(o, lmt_cases > 0.0, "no LM_T case exercised");
  return o;
}

Outcome composition() {
  Outcome o;
  Rng rng(1006);
  const std::vector<std::pair<double, double>> ab = {{0.8, 0.3}, {0.6, 0.5}, {0.9, 0.1}};
  for (int trial = 0; trial < 5; ++trial) {
    const Generator A(testgen::random_stable(rng, corpus_spec()));
    const Vec x = testgen::random_vector(rng, A.dim());
    for (const auto& [alpha, beta] : ab) record(o, frac_power_compose_check(A, alpha, beta, x), 1e-5);
  }
  return o;
}

Outcome branch_agreement() {
  Outcome o;
  Rng rng(1007);
  for (int trial = 0; trial < 3; ++trial) {
    const Generator A(testgen::random_stable(rng, corpus_spec()));
    const Vec x = testgen::random_vector(rng, A.dim());
    for (double alpha : {0.25, 0.5, 0.75}) {
      const Vec d = neg_frac_power(A, {alpha, FracBranch::NegPowerDirect}, x);
      const Vec f = neg_frac_power(A, {alpha, FracBranch::NegPowerFactored}, x);
      record(o, testgen::rel_gap(f, d), 1e-6);
    }
  }
  return o;
}

Outcome log_resolvent() {
  Outcome o;
  Rng rng(1008);
  double bound_worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const Mat M = trial == 0 ? testgen::jordan(-0.8, 3.0) : testgen::random_stable(rng, corpus_spec());
    const Generator A(M);
    const Vec x = testgen::random_vector(rng, A.dim());
    const Vec y = log_resolvent_inverse(A, x);
    const Mat L = (Mat::Identity(A.dim(), A.dim()) - M).log();
    record(o, (L * y - x).norm() / x.norm(), 1e-5);

    const double bound = log_inverse_norm_bound(A);
    Mat X(A.dim(), 100);
    for (int k = 0; k < 100; ++k) X.col(k) = testgen::random_vector(rng, A.dim());
    const Mat Y = log_resolvent_inverse(A, X);
    for (int k = 0; k < 100; ++k)
      bound_worst = std::max(bound_worst, Y.col(k).norm() / (bound * X.col(k).norm()));
  }
  expect(o, bound_worst <= 1.0 + 1e-6, "norm bound ratio " + std::to_string(bound_worst));
  const auto nu = measure::from_density(density::volterra_f(1.0, 0.0));
  const double lap = eval_laplace(nu, -kE).real() * std::log(kE);
  expect(o, std::abs(lap - 1.0) <= 1e-4, "Volterra Laplace identity " + std::to_string(lap));
  return o;
}

Outcome norm_certificate() {
  Outcome o;
  Rng rng(1009);
  struct Case {
    HalfLineMeasure a;
    Mat M;
  };
  std::vector<Case> cases = {
      {measure::lebesgue(-1.0), testgen::jordan(-1.0, 10.0)},
      {measure::unit_atom(1.0), testgen::diag({-0.3, cplx(-1.0, 2.0)})},
      {measure::fractional(0.5), testgen::random_stable(rng, corpus_spec())},
      {measure::fractional(1.5), testgen::random_stable(rng, corpus_spec())},
      {measure::from_density(density::volterra_f(1.0, 1.0)), testgen::random_stable(rng, corpus_spec())},
  };
  int certified = 0;
  for (const Case& c : cases) {
    const Generator A(c.M);
    const NormCertificate cert = bounded_norm_certificate(c.a, A);
    if (!cert.certified) continue;
    ++certified;
    Mat X(A.dim(), 100);
    for (int k = 0; k < 100; ++k) X.col(k) = testgen::random_vector(rng, A.dim());
    const Mat G = hp_apply_block(c.a, A, X).value;
    for (int k = 0; k < 100; ++k)
      record(o, G.col(k).norm() / (cert.bound * X.col(k).norm()), 1.0 + 1e-8);
  }
  expect(o, certified >= 4, "only " + std::to_string(certified) + " cases certified");
  return o;
}

Outcome quadrature_self_tests() {
  Outcome o;
  auto scalar = [](double v) { return Vec::Constant(1, v); };
  for (double alpha : {0.1, 0.5, 1.0, 1.5, 3.7}) {
    for (double r : {0.25, 1.0, 4.0}) {
      const auto rep = integrate_halfline([&](double t) { return scalar(std::exp(-r * t)); },
                                          measure::fractional(alpha));
      const double want = std::pow(r, -alpha);
      record(o, std::abs(rep.value(0).real() - want) / want, 1e-8);
    }
  }
  const auto div = integrate_halfline([&](double) { return scalar(1.0); }, measure::lebesgue());
  expect(o, div.diagnosis == Diagnosis::DivergentTail, "constant over Lebesgue");
  Mat D = Mat::Zero(2, 2);
  D(0, 0) = -1.0;
  const Generator A(D);
  Vec e2 = Vec::Zero(2);
  e2(1) = 1.0;
  try {
    hp_apply(measure::lebesgue(-1.0), A, e2);
    expect(o, false, "hp_apply on diag(-1, 0) converged");
  } catch (const Error& e) {
    expect(o, e.diagnosis() == Diagnosis::DivergentTail, "hp_apply verdict");
  }
  expect(o, !in_domain(measure::lebesgue(-1.0), A, e2).member, "in_domain verdict");

  struct Case {
    VecFn fn;
    HalfLineMeasure a;
  };
  const std::vector<Case> corpus = {
      {[&](double t) { return scalar(std::exp(-t)); }, measure::lebesgue()},
      {[&](double t) { return scalar(1.0 / (1.0 + t * t)); }, measure::lebesgue()},
      {[&](double t) { return scalar(std::exp(-0.1 * t)); }, measure::fractional(0.3)},
      {[&](double t) { return scalar(std::exp(-2.0 * t) * std::cos(3.0 * t)); }, measure::fractional(1.7)},
      {[&](double t) { return scalar(std::exp(-t)); }, measure::from_density(density::volterra_f())},
      {[&](double t) { return scalar(std::exp(-0.5 * t)); }, measure::unit_atom(2.0) + measure::lebesgue(-1.0)},
  };
  for (const Case& c : corpus) {
    QuadratureSpec spec;
    bool was_converged = false;
    for (int k = 0; k < 5; ++k) {
      const auto rep = integrate_halfline(c.fn, c.a, spec);
      if (was_converged) expect(o, rep.diagnosis != Diagnosis::DivergentTail, "refinement flipped a verdict");
      was_converged = was_converged || rep.converged;
      spec = spec.scaled(0.5);
    }
  }
  return o;
}

}  // namespace

int main() {
  run(1, "oracle equivalence", 10.0, oracle_equivalence);
  run(2, "inverse via negative Lebesgue", 2.0, inverse_by_negative_lebesgue);
  run(3, "commutation with A", 5.0, commutation);
  run(4, "Bernstein integral representation", 5.0, representation);
  run(5, "product transform and factorization", 20.0, product);
  run(6, "fractional power composition", 5.0, composition);
  run(7, "fractional branch agreement", 3.0, branch_agreement);
  run(8, "logarithmic resolvent inverse", 30.0, log_resolvent);
  run(9, "norm certificate", 3.0, norm_certificate);
  run(10, "quadrature self-tests", 5.0, quadrature_self_tests);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}

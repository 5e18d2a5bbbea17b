#pragma once

#include <optional>

#include <Eigen/Dense>

#include "hpcalc/errors.hpp"
#include "hpcalc/quadrature.hpp"

namespace hpcalc {

using Mat = Eigen::MatrixXcd;

/// ||T(t)|| <= M exp(omega t), verified on a log grid up to grid_tmax.
struct GrowthProfile {
  double M = 1.0;
  double omega = 0.0;
  double grid_tmax = 0.0;
  /// min over the grid of M exp(omega t) - ||T(t)||.
  double slack = 0.0;
  /// The bound holds for all t (normal generator).
  bool global = false;
};

class Generator {
 public:
  explicit Generator(Mat A);

  Eigen::Index dim() const { return A_.rows(); }
  const Mat& matrix() const { return A_; }
  /// Operator 2-norm of A.
  double norm() const { return norm_; }
  double spectral_abscissa() const { return omega0_; }
  const Eigen::VectorXcd& eigenvalues() const { return lambda_; }
  bool injective() const { return injective_; }
  /// omega0 <= 0 up to round-off; required by every calculus operation.
  bool bounded_mode() const { return growth_.has_value(); }
  void require_bounded(const char* op) const;

  bool diagonalizable() const { return diag_; }
  /// kappa(V) of the cached eigenvector matrix (+inf without a cache).
  double condition() const { return kappa_; }
  const Mat& eigenvectors() const;
  const Mat& eigenvectors_inverse() const;

  Vec apply(double t, const Vec& x) const;
  Mat apply(double t, const Mat& X) const;
  /// T(t) X - X without cancellation for small t on the cached path.
  Mat apply_increment(double t, const Mat& X) const;
  Mat exp(double t) const;
  double semigroup_norm(double t) const;

  const GrowthProfile& growth() const;
  /// Envelope of ||T(t) x|| for ||x|| = xnorm, for quadrature truncation.
  GrowthBound growth_bound(double xnorm) const;

 private:
  Mat A_;
  double norm_ = 0.0;
  Eigen::VectorXcd lambda_;
  double omega0_ = 0.0;
  bool injective_ = true;
  bool diag_ = false;
  Mat V_;
  Mat Vinv_;
  double kappa_ = kInf;
  std::optional<GrowthProfile> growth_;
};

/// Largest admissible spectral abscissa for the boundedness mode.
double boundedness_slack(const Generator& A);

Vec apply_semigroup(const Generator& A, double t, const Vec& x);

GrowthProfile growth_profile(const Generator& A);

/// T(n) x -> 0 along n = 1, 2, 4, ..., 2^20, checked against the spectrum.
bool check_strong_stability(const Generator& A, const Vec& x, double tol);

struct PolyDecayFit {
  double C = 0.0;
  bool holds = false;
};

/// sup_t t^delta ||T(t)|| on the growth grid.
PolyDecayFit check_polynomial_decay(const Generator& A, double delta);

}  // namespace hpcalc

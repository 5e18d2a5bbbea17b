#include "hpcalc/semigroup.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace hpcalc {

namespace {

constexpr double kMaxCondition = 1e6;
constexpr int kGridPoints = 64;

double op_norm(const Mat& M) {
  if (M.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(M);
  return svd.singularValues()(0);
}

std::vector<double> growth_grid(double omega0) {
  double tmax = omega0 < 0.0 ? 50.0 / std::abs(omega0) : 1e4;
  tmax = std::min(tmax, 1e4);
  tmax = std::max(tmax, 1e-2);
  std::vector<double> grid{0.0};
  const double l0 = std::log(1e-3);
  const double l1 = std::log(tmax);
  for (int i = 0; i < kGridPoints; ++i) {
    grid.push_back(std::exp(l0 + (l1 - l0) * i / (kGridPoints - 1)));
  }
  return grid;
}

}  // namespace

Generator::Generator(Mat A) : A_(std::move(A)) {
  require(A_.rows() >= 1 && A_.rows() == A_.cols(), ErrorKind::InvalidArgument,
          "generator must be a non-empty square matrix");
  require(A_.allFinite(), ErrorKind::InvalidArgument,
          "generator entries must be finite");
  norm_ = op_norm(A_);

  Eigen::ComplexEigenSolver<Mat> es(A_);
  require(es.info() == Eigen::Success, ErrorKind::InvalidArgument,
          "eigenvalue computation failed");
  lambda_ = es.eigenvalues();
  omega0_ = lambda_.real().maxCoeff();
  const double zero_tol = 1e-12 * std::max(norm_, 1e-300);
  injective_ = (lambda_.cwiseAbs().array() > zero_tol).all();

  Mat V = es.eigenvectors();
  Eigen::JacobiSVD<Mat> svd(V);
  const auto& sv = svd.singularValues();
  const double kappa = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : kInf;
  if (kappa <= kMaxCondition) {
    Mat Vinv = V.partialPivLu().inverse();
    const Mat recon = V * lambda_.asDiagonal() * Vinv;
    if ((recon - A_).norm() <= 1e-10 * std::max(A_.norm(), 1e-300) ||
        A_.norm() == 0.0) {
      diag_ = true;
      V_ = std::move(V);
      Vinv_ = std::move(Vinv);
      kappa_ = kappa;
    }
  }

  if (omega0_ <= boundedness_slack(*this)) {
    growth_ = growth_profile(*this);
  }
}

double boundedness_slack(const Generator& A) {
  return 1e-12 * std::max(A.norm(), 1.0);
}

void Generator::require_bounded(const char* op) const {
  require(bounded_mode(), ErrorKind::PreconditionFailed,
          std::string(op) + " needs a bounded semigroup (spectral abscissa " +
              std::to_string(omega0_) + " > 0)");
}

const Mat& Generator::eigenvectors() const {
  require(diag_, ErrorKind::NotDiagonalizable,
          "no well-conditioned eigendecomposition");
  return V_;
}

const Mat& Generator::eigenvectors_inverse() const {
  require(diag_, ErrorKind::NotDiagonalizable,
          "no well-conditioned eigendecomposition");
  return Vinv_;
}

Mat Generator::exp(double t) const {
  require(t >= 0.0, ErrorKind::InvalidArgument, "semigroup time must be >= 0");
  if (t == 0.0) return Mat::Identity(dim(), dim());
  if (diag_) {
    const Eigen::VectorXcd e = (t * lambda_).array().exp();
    return V_ * e.asDiagonal() * Vinv_;
  }
  return (t * A_).exp();
}

Mat Generator::apply(double t, const Mat& X) const {
  require(t >= 0.0, ErrorKind::InvalidArgument, "semigroup time must be >= 0");
  require(X.rows() == dim(), ErrorKind::InvalidArgument,
          "vector dimension does not match the generator");
  if (t == 0.0) return X;
  if (diag_) {
    const Eigen::VectorXcd e = (t * lambda_).array().exp();
    return V_ * (e.asDiagonal() * (Vinv_ * X));
  }
  return (t * A_).exp() * X;
}

Vec Generator::apply(double t, const Vec& x) const {
  return apply(t, Mat(x)).col(0);
}

Mat Generator::apply_increment(double t, const Mat& X) const {
  require(t >= 0.0, ErrorKind::InvalidArgument, "semigroup time must be >= 0");
  require(X.rows() == dim(), ErrorKind::InvalidArgument,
          "vector dimension does not match the generator");
  if (t == 0.0) return Mat::Zero(X.rows(), X.cols());
  if (diag_) {
    Eigen::VectorXcd e(dim());
    for (Eigen::Index i = 0; i < dim(); ++i) {
      const cplx z = t * lambda_(i);
      // expm1 for complex z: exp(x)(cos y + i sin y) - 1, split to keep digits.
      const double em1 = std::expm1(z.real());
      const double s2 = std::sin(0.5 * z.imag());
      e(i) = cplx(em1 * std::cos(z.imag()) - 2.0 * s2 * s2,
                  std::exp(z.real()) * std::sin(z.imag()));
    }
    return V_ * (e.asDiagonal() * (Vinv_ * X));
  }
  return (t * A_).exp() * X - X;
}

double Generator::semigroup_norm(double t) const { return op_norm(exp(t)); }

const GrowthProfile& Generator::growth() const {
  require_bounded("growth_profile");
  return *growth_;
}

GrowthBound Generator::growth_bound(double xnorm) const {
  const GrowthProfile& g = growth();
  GrowthBound b;
  b.omega = g.omega;
  if (g.global) {
    b.coef = g.M * xnorm;
  } else if (diag_) {
    // ||V e^{t Lambda} V^-1|| <= kappa e^{omega0 t} for every t.
    b.coef = kappa_ * xnorm;
  } else {
    b.coef = g.M * xnorm;
    b.valid_up_to = g.grid_tmax;
  }
  return b;
}

Vec apply_semigroup(const Generator& A, double t, const Vec& x) {
  return A.apply(t, x);
}

GrowthProfile growth_profile(const Generator& A) {
  const double omega = std::min(A.spectral_abscissa(), 0.0);
  const auto grid = growth_grid(omega);
  std::vector<double> norms;
  norms.reserve(grid.size());
  double M = 1.0;
  for (double t : grid) {
    const double n = A.semigroup_norm(t);
    norms.push_back(n);
    M = std::max(M, n * std::exp(-omega * t));
  }
  GrowthProfile g;
  g.M = M;
  g.omega = omega;
  g.grid_tmax = grid.back();
  g.slack = kInf;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    g.slack = std::min(g.slack, M * std::exp(omega * grid[i]) - norms[i]);
  }
  const Mat& a = A.matrix();
  const Mat comm = a * a.adjoint() - a.adjoint() * a;
  g.global = comm.norm() <= 1e-12 * std::max(a.squaredNorm(), 1e-300);
  if (g.global) g.M = 1.0 + 1e-12;
  return g;
}

bool check_strong_stability(const Generator& A, const Vec& x, double tol) {
  A.require_bounded("check_strong_stability");
  const double xn = x.norm();
  if (xn == 0.0) return true;

  bool numeric = false;
  double prev = xn;
  int stalled = 0;
  for (int k = 0; k <= 20; ++k) {
    const double n = A.apply(std::ldexp(1.0, k), x).norm();
    if (n < tol * xn) {
      numeric = true;
      break;
    }
    stalled = n >= prev * (1.0 - 1e-12) ? stalled + 1 : 0;
    if (stalled >= 4) break;
    prev = n;
  }

  // Spectral certificate: no mass on eigenvalues of zero real part.
  std::optional<bool> certificate;
  const double edge = -boundedness_slack(A);
  if (A.spectral_abscissa() < edge) {
    certificate = true;
  } else if (A.diagonalizable()) {
    const Vec c = A.eigenvectors_inverse() * x;
    bool decays = true;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      if (A.eigenvalues()(i).real() >= edge &&
          std::abs(c(i)) > 1e-10 * c.norm()) {
        decays = false;
      }
    }
    certificate = decays;
  }
  if (certificate && *certificate != numeric) {
    fail(ErrorKind::Inconclusive,
         "numeric trend and spectral certificate disagree on strong stability");
  }
  return numeric;
}

PolyDecayFit check_polynomial_decay(const Generator& A, double delta) {
  A.require_bounded("check_polynomial_decay");
  require(delta > 0.0, ErrorKind::InvalidArgument, "delta must be positive");
  PolyDecayFit fit;
  for (double t : growth_grid(A.spectral_abscissa())) {
    if (t == 0.0) continue;
    fit.C = std::max(fit.C, std::pow(t, delta) * A.semigroup_norm(t));
  }
  fit.holds = std::isfinite(fit.C) && A.spectral_abscissa() < -boundedness_slack(A);
  return fit;
}

}  // namespace hpcalc

#include "ffp/linalg.hpp"

#include "ffp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ffp {

namespace {

// Below this size JacobiSVD is both faster and more accurate than the
// divide-and-conquer driver.
constexpr Eigen::Index kJacobiCutoff = 32;

void require_tau(double tau, const char *op) {
  if (!(tau >= 0.0) || !std::isfinite(tau))
    throw InvalidArgument(std::string(op) + ": threshold must be finite and nonnegative");
}

void normalize_signs(ThinSvd &svd) {
  for (Eigen::Index j = 0; j < svd.left.cols(); ++j) {
    // Magnitudes within a relative 1e-12 of the maximum count as tied, so
    // rounding noise cannot move the pivot away from the first such entry.
    const double peak = svd.left.col(j).cwiseAbs().maxCoeff();
    Eigen::Index best = 0;
    while (std::abs(svd.left(best, j)) < peak * (1.0 - 1e-12)) ++best;
    if (svd.left(best, j) < 0.0) {
      svd.left.col(j) *= -1.0;
      svd.right.col(j) *= -1.0;
    }
  }
}

template <class Solver> ThinSvd run_svd(const Eigen::Ref<const Matrix> &a) {
  Solver solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  ThinSvd out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
  return out;
}

Matrix reconstruct(const ThinSvd &svd, const Vector &sigma) {
  return svd.left * sigma.asDiagonal() * svd.right.transpose();
}

} // namespace

bool all_finite(const Eigen::Ref<const Matrix> &m) { return m.allFinite(); }

void require_finite(const Eigen::Ref<const Matrix> &m, const char *what) {
  if (!m.allFinite())
    throw InvalidInput(std::string(what) + ": matrix contains non-finite entries");
}

ThinSvd thin_svd(const Eigen::Ref<const Matrix> &a) {
  if (a.size() == 0) throw InvalidInput("thin_svd: empty matrix");
  require_finite(a, "thin_svd");
  ThinSvd out = std::min(a.rows(), a.cols()) <= kJacobiCutoff
                    ? run_svd<Eigen::JacobiSVD<Matrix>>(a)
                    : run_svd<Eigen::BDCSVD<Matrix>>(a);
  normalize_signs(out);
  return out;
}

Matrix polar_orthogonal(const Eigen::Ref<const Matrix> &a) {
  if (a.rows() < a.cols())
    throw InvalidArgument("polar_orthogonal: expected rows >= cols, got " +
                          std::to_string(a.rows()) + "x" + std::to_string(a.cols()));
  const ThinSvd svd = thin_svd(a);
  return svd.left * svd.right.transpose();
}

Matrix soft_threshold(const Eigen::Ref<const Matrix> &m, double tau) {
  require_tau(tau, "soft_threshold");
  require_finite(m, "soft_threshold");
  return m.unaryExpr([tau](double v) {
    const double mag = std::abs(v) - tau;
    return mag > 0.0 ? std::copysign(mag, v) : 0.0;
  });
}

Matrix svt(const Eigen::Ref<const Matrix> &m, double tau) {
  require_tau(tau, "svt");
  const ThinSvd svd = thin_svd(m);
  const Vector shrunk = (svd.sigma.array() - tau).max(0.0).matrix();
  return reconstruct(svd, shrunk);
}

double ld_shrink_value(double sigma, double tau) {
  const double gate = (1.0 + sigma) * (1.0 + sigma);
  if (!(gate > 4.0 * tau)) return 0.0;
  double xi = 0.5 * (sigma - 1.0) + std::sqrt(0.25 * gate - tau);
  xi = std::max(xi, 0.0);
  const auto f = [sigma, tau](double x) {
    return 0.5 * (x - sigma) * (x - sigma) + tau * std::log1p(x);
  };
  return f(xi) <= f(0.0) ? xi : 0.0;
}

Matrix ld_shrink(const Eigen::Ref<const Matrix> &d, double tau) {
  require_tau(tau, "ld_shrink");
  require_finite(d, "ld_shrink");
  if (tau == 0.0) return d;
  const ThinSvd svd = thin_svd(d);
  Vector shrunk(svd.sigma.size());
  for (Eigen::Index i = 0; i < shrunk.size(); ++i)
    shrunk(i) = ld_shrink_value(svd.sigma(i), tau);
  return reconstruct(svd, shrunk);
}

double log_det_surrogate(const Eigen::Ref<const Matrix> &c) {
  const ThinSvd svd = thin_svd(c);
  double total = 0.0;
  for (Eigen::Index i = 0; i < svd.sigma.size(); ++i) total += std::log1p(svd.sigma(i));
  return total;
}

double orthonormality_error(const Eigen::Ref<const Matrix> &w) {
  return (w.transpose() * w - Matrix::Identity(w.cols(), w.cols())).norm();
}

} // namespace ffp

#pragma once

#include <Eigen/Dense>

namespace ffp {

/// Dense real matrix carrying X, S, the multiplier and every factor.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Economy SVD A = left * diag(sigma) * right^T with p = min(m, n) triplets.
///
/// `sigma` is non-increasing and nonnegative. Each left singular vector is
/// sign-normalized so that its largest-magnitude entry (first one on ties,
/// with magnitudes within a relative 1e-12 treated as equal) is positive; the
/// matching right vector is flipped with it.
struct ThinSvd {
  Matrix left;
  Vector sigma;
  Matrix right;
};

/// Throws InvalidInput if any entry of `m` is NaN or infinite.
void require_finite(const Eigen::Ref<const Matrix> &m, const char *what);
bool all_finite(const Eigen::Ref<const Matrix> &m);

ThinSvd thin_svd(const Eigen::Ref<const Matrix> &a);

/// Orthogonal Procrustes solution P(A) Q(A)^T for a tall m x p matrix
/// (m >= p). The result has orthonormal columns and maximizes trace(W^T A).
Matrix polar_orthogonal(const Eigen::Ref<const Matrix> &a);

/// Entrywise l1 prox: sign(m) * max(|m| - tau, 0).
Matrix soft_threshold(const Eigen::Ref<const Matrix> &m, double tau);

/// Prox of the nuclear norm: shrinks every singular value by tau.
Matrix svt(const Eigen::Ref<const Matrix> &m, double tau);

/// Singular-value shrinkage induced by the log-determinant rank surrogate.
///
/// Each singular value s is replaced by the minimizer over x >= 0 of
///   f(x) = 0.5 (x - s)^2 + tau log(1 + x),
/// chosen between the stationary point
///   xi = (s - 1)/2 + sqrt((1 + s)^2 / 4 - tau)
/// (admissible only when (1 + s)^2 > 4 tau, clamped at 0) and the endpoint 0.
/// The stationary point wins ties. tau == 0 returns `d` unchanged.
Matrix ld_shrink(const Eigen::Ref<const Matrix> &d, double tau);

/// Scalar form of ld_shrink applied to one singular value.
double ld_shrink_value(double sigma, double tau);

/// sum_i log(1 + sigma_i(c)), i.e. log det(I + (C^T C)^{1/2}).
double log_det_surrogate(const Eigen::Ref<const Matrix> &c);

/// ||W^T W - I||_F.
double orthonormality_error(const Eigen::Ref<const Matrix> &w);

} // namespace ffp

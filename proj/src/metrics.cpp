#include "ffp/analysis.hpp"

#include "ffp/errors.hpp"

#include <cmath>

namespace ffp {

int rank_from_spectrum(const Vector &sigma, double rel_tol) {
  if (sigma.size() == 0 || !(sigma(0) > 0.0)) return 0;
  const double cutoff = rel_tol * sigma(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > cutoff) ++rank;
  return rank;
}

int numerical_rank(const Eigen::Ref<const Matrix> &m, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0))
    throw InvalidArgument("numerical_rank: rel_tol must lie in (0, 1)");
  if (m.size() == 0) return 0;
  return rank_from_spectrum(thin_svd(m).sigma, rel_tol);
}

double sparsity_ratio(const Eigen::Ref<const Matrix> &s, double abs_tol) {
  if (!(abs_tol >= 0.0)) throw InvalidArgument("sparsity_ratio: abs_tol must be >= 0");
  if (s.size() == 0) return 0.0;
  const auto nonzero = (s.array().abs() > abs_tol).count();
  return static_cast<double>(nonzero) / static_cast<double>(s.size());
}

double recovery_error(const Matrix &l, const Matrix &l_star) {
  if (l.rows() != l_star.rows() || l.cols() != l_star.cols())
    throw InvalidArgument("recovery_error: dimension mismatch");
  const double ref = l_star.norm();
  if (ref == 0.0) return l.norm();
  return (l - l_star).norm() / ref;
}

Metrics compute_metrics(const Matrix &x, const Matrix &l, const Matrix &s,
                        const Matrix *l_star, double rank_tol, double sparsity_tol) {
  Metrics m;
  m.rank_L = numerical_rank(l, rank_tol);
  m.sparsity_ratio = sparsity_ratio(s, sparsity_tol);
  m.residual = relative_residual(x, l, s);
  if (l_star) m.recovery_error = recovery_error(l, *l_star);
  return m;
}

} // namespace ffp

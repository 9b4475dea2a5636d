#pragma once

// Element formulas shared by the serial and OpenMP kernels. Keeping them in
// one place is what makes the two paths agree bit for bit.

#include "ffp/linalg.hpp"

#include <cmath>

namespace ffp::kernels::detail {

inline double soft(double v, double tau) {
  const double mag = std::abs(v) - tau;
  return mag > 0.0 ? std::copysign(mag, v) : 0.0;
}

inline void shrink_residual_col(const Matrix &x, const Matrix &low_rank,
                                const Matrix &theta, double rho, double tau, Matrix &out,
                                Eigen::Index j) {
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out(i, j) = soft(x(i, j) - low_rank(i, j) + theta(i, j) / rho, tau);
}

inline void shifted_target_col(const Matrix &x, const Matrix &sparse, const Matrix &theta,
                               double rho, Matrix &out, Eigen::Index j) {
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    out(i, j) = x(i, j) - sparse(i, j) + theta(i, j) / rho;
}

inline double update_multiplier_col(const Matrix &x, const Matrix &low_rank,
                                    const Matrix &sparse, double rho, Matrix &theta,
                                    Eigen::Index j) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    const double r = x(i, j) - low_rank(i, j) - sparse(i, j);
    theta(i, j) += rho * r;
    acc += r * r;
  }
  return acc;
}

inline double squared_norm_col(const Matrix &m, Eigen::Index j) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) acc += m(i, j) * m(i, j);
  return acc;
}

inline double l1_norm_col(const Matrix &m, Eigen::Index j) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) acc += std::abs(m(i, j));
  return acc;
}

inline double sum_in_order(const Vector &partial) {
  double total = 0.0;
  for (Eigen::Index j = 0; j < partial.size(); ++j) total += partial(j);
  return total;
}

} // namespace ffp::kernels::detail

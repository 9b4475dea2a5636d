#include "ffp/kernels.hpp"

#include "kernel_ops.hpp"

namespace ffp::kernels::serial {

using namespace detail;

void shrink_residual(const Matrix &x, const Matrix &low_rank, const Matrix &theta,
                     double rho, double tau, Matrix &out) {
  out.resize(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    shrink_residual_col(x, low_rank, theta, rho, tau, out, j);
}

void shifted_target(const Matrix &x, const Matrix &sparse, const Matrix &theta,
                    double rho, Matrix &out) {
  out.resize(x.rows(), x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    shifted_target_col(x, sparse, theta, rho, out, j);
}

double update_multiplier(const Matrix &x, const Matrix &low_rank, const Matrix &sparse,
                         double rho, Matrix &theta) {
  Vector partial(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j)
    partial(j) = update_multiplier_col(x, low_rank, sparse, rho, theta, j);
  return sum_in_order(partial);
}

double squared_norm(const Matrix &m) {
  Vector partial(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) partial(j) = squared_norm_col(m, j);
  return sum_in_order(partial);
}

double l1_norm(const Matrix &m) {
  Vector partial(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) partial(j) = l1_norm_col(m, j);
  return sum_in_order(partial);
}

Vector column_norms(const Matrix &m) {
  Vector out(m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) out(j) = std::sqrt(squared_norm_col(m, j));
  return out;
}

} // namespace ffp::kernels::serial

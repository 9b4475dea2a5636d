#pragma once

// Per-iteration passes over the full d x n matrices. These are the only
// O(dn) loops in a solve; everything else touches k-wide factors.
//
// Two implementations share one contract: `serial` is the reference, `omp`
// splits columns across OpenMP threads. Reductions are accumulated per column
// and then summed in column order, so both produce bit-identical results for
// any thread count.

#include "ffp/linalg.hpp"

namespace ffp::kernels {

namespace serial {

/// out = soft_threshold(x - low_rank + theta / rho, tau)
void shrink_residual(const Matrix &x, const Matrix &low_rank, const Matrix &theta,
                     double rho, double tau, Matrix &out);

/// out = x - sparse + theta / rho
void shifted_target(const Matrix &x, const Matrix &sparse, const Matrix &theta,
                    double rho, Matrix &out);

/// theta += rho * (x - low_rank - sparse); returns ||x - low_rank - sparse||_F^2.
double update_multiplier(const Matrix &x, const Matrix &low_rank, const Matrix &sparse,
                         double rho, Matrix &theta);

double squared_norm(const Matrix &m);
double l1_norm(const Matrix &m);
Vector column_norms(const Matrix &m);

} // namespace serial

namespace omp {

void shrink_residual(const Matrix &x, const Matrix &low_rank, const Matrix &theta,
                     double rho, double tau, Matrix &out, int threads);
void shifted_target(const Matrix &x, const Matrix &sparse, const Matrix &theta,
                    double rho, Matrix &out, int threads);
double update_multiplier(const Matrix &x, const Matrix &low_rank, const Matrix &sparse,
                         double rho, Matrix &theta, int threads);
double squared_norm(const Matrix &m, int threads);
double l1_norm(const Matrix &m, int threads);
Vector column_norms(const Matrix &m, int threads);

} // namespace omp

// Dispatch: threads <= 1 runs the serial reference.

inline void shrink_residual(const Matrix &x, const Matrix &low_rank, const Matrix &theta,
                            double rho, double tau, Matrix &out, int threads) {
  if (threads > 1)
    omp::shrink_residual(x, low_rank, theta, rho, tau, out, threads);
  else
    serial::shrink_residual(x, low_rank, theta, rho, tau, out);
}

inline void shifted_target(const Matrix &x, const Matrix &sparse, const Matrix &theta,
                           double rho, Matrix &out, int threads) {
  if (threads > 1)
    omp::shifted_target(x, sparse, theta, rho, out, threads);
  else
    serial::shifted_target(x, sparse, theta, rho, out);
}

inline double update_multiplier(const Matrix &x, const Matrix &low_rank,
                                const Matrix &sparse, double rho, Matrix &theta,
                                int threads) {
  return threads > 1 ? omp::update_multiplier(x, low_rank, sparse, rho, theta, threads)
                     : serial::update_multiplier(x, low_rank, sparse, rho, theta);
}

inline double squared_norm(const Matrix &m, int threads) {
  return threads > 1 ? omp::squared_norm(m, threads) : serial::squared_norm(m);
}

inline double l1_norm(const Matrix &m, int threads) {
  return threads > 1 ? omp::l1_norm(m, threads) : serial::l1_norm(m);
}

inline Vector column_norms(const Matrix &m, int threads) {
  return threads > 1 ? omp::column_norms(m, threads) : serial::column_norms(m);
}

} // namespace ffp::kernels

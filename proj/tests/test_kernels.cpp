#include <gtest/gtest.h>

#include "ffp/kernels.hpp"
#include "test_util.hpp"

#include <random>

using namespace ffp;
using ffp::testing::random_matrix;

namespace {

struct KernelInputs {
  Matrix x, low_rank, theta, sparse;
};

KernelInputs make_inputs(Eigen::Index d, Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return {random_matrix(d, n, rng, 5.0), random_matrix(d, n, rng), random_matrix(d, n, rng, 1e-3),
          random_matrix(d, n, rng, 2.0)};
}

} // namespace

TEST(Kernels, SerialMatchesClosedForms)
{
  const auto in = make_inputs(37, 23, 1);
  const double rho = 0.37, tau = 1.3;

  Matrix out;
  kernels::serial::shrink_residual(in.x, in.low_rank, in.theta, rho, tau, out);
  EXPECT_LE((out - soft_threshold(in.x - in.low_rank + in.theta / rho, tau)).norm(), 1e-12);

  kernels::serial::shifted_target(in.x, in.sparse, in.theta, rho, out);
  EXPECT_LE((out - (in.x - in.sparse + in.theta / rho)).norm(), 1e-12);

  Matrix theta = in.theta;
  const double r2 = kernels::serial::update_multiplier(in.x, in.low_rank, in.sparse, rho, theta);
  const Matrix r = in.x - in.low_rank - in.sparse;
  EXPECT_NEAR(r2, r.squaredNorm(), 1e-9 * r.squaredNorm());
  EXPECT_LE((theta - (in.theta + rho * r)).norm(), 1e-12);

  EXPECT_NEAR(kernels::serial::squared_norm(in.x), in.x.squaredNorm(), 1e-9 * in.x.squaredNorm());
  EXPECT_NEAR(kernels::serial::l1_norm(in.x), in.x.cwiseAbs().sum(), 1e-9 * in.x.cwiseAbs().sum());
  EXPECT_LE((kernels::serial::column_norms(in.x) - in.x.colwise().norm().transpose()).norm(), 1e-12);
}

TEST(Kernels, OpenMpIsBitIdenticalToSerial)
{
  const auto in = make_inputs(101, 67, 2);
  const double rho = 3.1e-3;

  Matrix ref_shrink, ref_target;
  kernels::serial::shrink_residual(in.x, in.low_rank, in.theta, rho, 2.5, ref_shrink);
  kernels::serial::shifted_target(in.x, in.sparse, in.theta, rho, ref_target);
  Matrix ref_theta = in.theta;
  const double ref_r2 =
      kernels::serial::update_multiplier(in.x, in.low_rank, in.sparse, rho, ref_theta);
  const double ref_sq = kernels::serial::squared_norm(in.x);
  const double ref_l1 = kernels::serial::l1_norm(in.x);
  const Vector ref_cols = kernels::serial::column_norms(in.x);

  for (int threads : {1, 2, 3, 4, 8}) {
    Matrix shrink, target;
    kernels::omp::shrink_residual(in.x, in.low_rank, in.theta, rho, 2.5, shrink, threads);
    kernels::omp::shifted_target(in.x, in.sparse, in.theta, rho, target, threads);
    Matrix theta = in.theta;
    const double r2 =
        kernels::omp::update_multiplier(in.x, in.low_rank, in.sparse, rho, theta, threads);
    EXPECT_TRUE(shrink == ref_shrink) << threads;
    EXPECT_TRUE(target == ref_target) << threads;
    EXPECT_TRUE(theta == ref_theta) << threads;
    EXPECT_EQ(r2, ref_r2) << threads;
    EXPECT_EQ(kernels::omp::squared_norm(in.x, threads), ref_sq) << threads;
    EXPECT_EQ(kernels::omp::l1_norm(in.x, threads), ref_l1) << threads;
    EXPECT_TRUE(kernels::omp::column_norms(in.x, threads) == ref_cols) << threads;
  }
}

TEST(Kernels, DispatchSelectsEquivalentPaths)
{
  const auto in = make_inputs(16, 9, 3);
  Matrix a, b;
  kernels::shrink_residual(in.x, in.low_rank, in.theta, 0.5, 0.1, a, 1);
  kernels::shrink_residual(in.x, in.low_rank, in.theta, 0.5, 0.1, b, 4);
  EXPECT_TRUE(a == b);
  EXPECT_EQ(kernels::squared_norm(in.x, 1), kernels::squared_norm(in.x, 4));
}

TEST(Kernels, ShrinkResidualProducesExactZeros)
{
  const Matrix x = Matrix::Constant(4, 4, 0.5);
  Matrix out;
  kernels::serial::shrink_residual(x, Matrix::Zero(4, 4), Matrix::Zero(4, 4), 1.0, 1.0, out);
  EXPECT_EQ(out.cwiseAbs().maxCoeff(), 0.0);
}

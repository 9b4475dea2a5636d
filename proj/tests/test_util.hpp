#pragma once

#include "ffp/linalg.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace ffp::testing {

inline Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64 &rng,
                            double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

// Haar-distributed m x p matrix with orthonormal columns.
inline Matrix random_orthonormal(Eigen::Index m, Eigen::Index p, std::mt19937_64 &rng) {
  const Matrix g = random_matrix(m, p, rng);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(m, p);
  const Matrix r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < p; ++j)
    if (r(j, j) < 0) q.col(j) *= -1.0;
  return q;
}

// Brute-force minimizer of f on [lo, hi] on a grid whose final spacing is
// `step`. The whole interval is scanned at `coarse` spacing; every coarse local
// minimum (endpoints included) is rescanned at 10x finer spacing within two
// coarse cells, repeatedly, until the spacing reaches `step`.
inline double grid_minimize(const std::function<double(double)> &f, double lo, double hi,
                            double step, double coarse = 1e-3) {
  struct Candidate {
    double x;
    double fx;
  };
  auto scan = [&](double a, double b, double h) {
    a = std::max(a, lo);
    b = std::min(b, hi);
    const auto count = static_cast<long>(std::floor((b - a) / h + 1e-9)) + 1;
    std::vector<double> values(static_cast<std::size_t>(count));
    for (long i = 0; i < count; ++i) values[static_cast<std::size_t>(i)] = f(a + h * i);
    if (b > a + h * (count - 1)) values.push_back(f(b));
    std::vector<Candidate> minima;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const bool left_ok = i == 0 || values[i] <= values[i - 1];
      const bool right_ok = i + 1 == values.size() || values[i] <= values[i + 1];
      const double x = i < static_cast<std::size_t>(count) ? a + h * static_cast<double>(i) : b;
      if (left_ok && right_ok) minima.push_back({x, values[i]});
    }
    return minima;
  };

  double h = std::max(coarse, step);
  std::vector<Candidate> minima = scan(lo, hi, h);
  while (h > step * (1 + 1e-9)) {
    const double next = std::max(h / 10.0, step);
    std::vector<Candidate> refined;
    for (const auto &c : minima) {
      auto local = scan(c.x - 2 * h, c.x + 2 * h, next);
      refined.insert(refined.end(), local.begin(), local.end());
    }
    minima = std::move(refined);
    h = next;
  }
  Candidate best{lo, std::numeric_limits<double>::infinity()};
  for (const auto &c : minima)
    if (c.fx < best.fx) best = c;
  return best.x;
}

inline double log_det_objective(double x, double sigma, double tau) {
  return 0.5 * (x - sigma) * (x - sigma) + tau * std::log1p(x);
}

inline double l1_objective(double x, double m, double tau) {
  return 0.5 * (x - m) * (x - m) + tau * std::abs(x);
}

} // namespace ffp::testing

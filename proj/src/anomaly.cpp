#include "ffp/analysis.hpp"

#include "ffp/errors.hpp"
#include "ffp/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ffp {

AnomalyResult anomaly_detect(const Matrix &s, double threshold) {
  if (!(threshold >= 0.0)) throw InvalidArgument("anomaly_detect: threshold must be >= 0");
  AnomalyResult r;
  r.scores = kernels::serial::column_norms(s);
  for (Eigen::Index j = 0; j < r.scores.size(); ++j)
    if (r.scores(j) >= threshold) r.flagged.push_back(static_cast<int>(j));
  return r;
}

AnomalyResult anomaly_top_m(const Matrix &s, int m) {
  if (m < 0) throw InvalidArgument("anomaly_top_m: m must be >= 0");
  AnomalyResult r;
  r.scores = kernels::serial::column_norms(s);
  std::vector<int> order(static_cast<std::size_t>(r.scores.size()));
  std::iota(order.begin(), order.end(), 0);
  std::erase_if(order, [&](int j) { return !(r.scores(j) > 0.0); });
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return r.scores(a) > r.scores(b); });
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(m)));
  std::sort(order.begin(), order.end());
  r.flagged = std::move(order);
  return r;
}

} // namespace ffp

#include "tscf/reference.hpp"

#include <algorithm>
#include <cmath>

namespace tscf {

double js_distance(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("js_distance: vector lengths differ (" + std::to_string(p.size()) +
                                " vs " + std::to_string(q.size()) + ")");
  }
  double kl_p = 0.0, kl_q = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double mid = 0.5 * (p[i] + q[i]);
    // 0 * log(0/x) is 0 by convention; mid is 0 only when both entries are.
    if (p[i] > 0.0) kl_p += p[i] * std::log2(p[i] / mid);
    if (q[i] > 0.0) kl_q += q[i] * std::log2(q[i] / mid);
  }
  // Bounded to [0,1] analytically; rounding may stray a few ulps outside.
  const double js2 = std::min(std::max(0.5 * (kl_p + kl_q), 0.0), 1.0);
  return std::sqrt(js2);
}

ReferenceSet select_references(const ProbVector& target_probs,
                               const std::vector<ProbVector>& pool_probs,
                               const std::vector<TimeSeries>& pool_series, std::size_t k) {
  if (k < 1) throw std::invalid_argument("select_references: k must be >= 1");
  if (pool_probs.size() != pool_series.size()) {
    throw std::invalid_argument("select_references: probs/series count mismatch");
  }

  const int target_label = argmax_label(target_probs);
  std::vector<ReferenceMember> qualifying;
  for (std::size_t i = 0; i < pool_probs.size(); ++i) {
    // Same predicted class would take the 1.01 sentinel, which always loses
    // to a qualifying member (js_distance <= 1), so skip it outright.
    if (argmax_label(pool_probs[i]) == target_label) continue;
    qualifying.push_back(
        {i, pool_series[i], pool_probs[i], js_distance(target_probs, pool_probs[i])});
  }

  // Ascending distance; stable keeps pool order on exact ties.
  std::stable_sort(qualifying.begin(), qualifying.end(),
                   [](const ReferenceMember& a, const ReferenceMember& b) {
                     return a.distance < b.distance;
                   });
  if (qualifying.size() > k) {
    qualifying.erase(qualifying.begin() + static_cast<std::ptrdiff_t>(k), qualifying.end());
  }

  ReferenceSet set;
  set.members = std::move(qualifying);
  set.requested = k;
  return set;
}

ReferenceSet select_references(const TimeSeries& target, const Dataset& pool, const Classifier& f,
                               std::size_t k) {
  // One batched call covers the pool and the target.
  std::vector<TimeSeries> batch = pool.all_series();
  batch.push_back(target);
  auto probs = f.predict_proba(batch);

  const ProbVector target_probs = std::move(probs.back());
  probs.pop_back();
  return select_references(target_probs, probs, pool.all_series(), k);
}

}  // namespace tscf

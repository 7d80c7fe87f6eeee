#include "tscf/objectives.hpp"

#include <algorithm>
#include <cmath>

namespace tscf {

double flip_distance(const ProbVector& candidate_probs, int target_label,
                     const ReferenceSet& refs) {
  if (refs.empty()) throw std::invalid_argument("flip_distance: empty reference set");
  if (argmax_label(candidate_probs) == target_label) return kNoFlipPenalty;
  double best = kNoFlipPenalty;
  for (const auto& ref : refs.members) {
    best = std::min(best, js_distance(candidate_probs, ref.probs));
  }
  return best;
}

double flip_distance(const TimeSeries& candidate, const TimeSeries& target,
                     const ReferenceSet& refs, const Classifier& f) {
  const auto probs = f.predict_proba({candidate, target});
  return flip_distance(probs[0], argmax_label(probs[1]), refs);
}

double change_fraction(const TimeSeries& a, const TimeSeries& b) {
  if (a.size() != b.size()) throw std::invalid_argument("change_fraction: lengths differ");
  std::size_t changed = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) ++changed;
  }
  return static_cast<double>(changed) / static_cast<double>(a.size());
}

double scale_change(const TimeSeries& a, const TimeSeries& b) {
  if (a.size() != b.size()) throw std::invalid_argument("scale_change: lengths differ");
  double diff_sq = 0.0, a_sq = 0.0, b_sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    diff_sq += d * d;
    a_sq += a[i] * a[i];
    b_sq += b[i] * b[i];
  }
  const double denom = std::sqrt(a_sq) + std::sqrt(b_sq);
  if (denom == 0.0) return 0.0;  // both all-zero: identical, distance 0
  return std::sqrt(diff_sq) / denom;
}

double dissimilarity(const TimeSeries& candidate, const TimeSeries& target) {
  return 0.5 * (change_fraction(candidate, target) + scale_change(candidate, target));
}

}  // namespace tscf

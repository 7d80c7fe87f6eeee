#pragma once

#include "tscf/classifier.hpp"
#include "tscf/reference.hpp"
#include "tscf/timeseries.hpp"

namespace tscf {

// Both objectives are minimized.
struct ObjectivePair {
  double f1 = 0.0;
  double f2 = 0.0;

  friend bool operator==(const ObjectivePair&, const ObjectivePair&) = default;
};

// Assigned to F1 when the candidate fails to change the predicted class;
// strictly above the JS distance range so any flipped candidate scores
// better on F1 than any unflipped one.
inline constexpr double kNoFlipPenalty = 1.01;

// F1: kNoFlipPenalty if the candidate is still predicted as target_label,
// otherwise the smallest JS distance between the candidate's probabilities
// and any reference's probabilities.
double flip_distance(const ProbVector& candidate_probs, int target_label,
                     const ReferenceSet& refs);
double flip_distance(const TimeSeries& candidate, const TimeSeries& target,
                     const ReferenceSet& refs, const Classifier& f);

// Fraction of positions whose values differ (exact float inequality).
double change_fraction(const TimeSeries& a, const TimeSeries& b);

// ||a - b||_2 / (||a||_2 + ||b||_2); two all-zero series give 0.
double scale_change(const TimeSeries& a, const TimeSeries& b);

// F2: mean of change_fraction and scale_change. 0 iff the series are
// value-identical; bounded to [0, 1]; symmetric.
double dissimilarity(const TimeSeries& candidate, const TimeSeries& target);

// Strict Pareto dominance on minimized objectives: no worse in both, better
// in at least one.
inline bool dominates(const ObjectivePair& a, const ObjectivePair& b) {
  return a.f1 <= b.f1 && a.f2 <= b.f2 && (a.f1 < b.f1 || a.f2 < b.f2);
}

}  // namespace tscf

#pragma once

#include <cstddef>
#include <vector>

#include "tscf/classifier.hpp"
#include "tscf/timeseries.hpp"

namespace tscf {

// Jensen-Shannon distance between two probability vectors of equal length:
// sqrt of the JS divergence with base-2 logarithms. Symmetric, zero iff the
// inputs are equal, bounded to [0, 1]. Zero entries contribute nothing.
double js_distance(const ProbVector& p, const ProbVector& q);

// A pool member chosen as a counterfactual anchor, with its predicted
// probabilities and its classifier-space distance from the target.
struct ReferenceMember {
  std::size_t pool_index = 0;
  TimeSeries series;
  ProbVector probs;
  double distance = 0.0;
};

// References sorted by ascending distance (ties by pool index). The set is
// degenerate when fewer members qualified than were requested; empty sets
// mean no pool member is predicted to a different class than the target.
struct ReferenceSet {
  std::vector<ReferenceMember> members;
  std::size_t requested = 0;

  std::size_t size() const { return members.size(); }
  bool empty() const { return members.empty(); }
  bool degenerate() const { return members.size() < requested; }
};

// Scores every pool member whose predicted label differs from the target's
// by JS distance between the two probability rows, and returns the k
// closest (same-label members never qualify). Pool members predicted to the
// target's own class are conceptually held at a 1.01 sentinel distance,
// which always loses to any qualifying member since js_distance <= 1.
ReferenceSet select_references(const TimeSeries& target, const Dataset& pool,
                               const Classifier& f, std::size_t k);

// Same selection on precomputed probability rows (used by tests and callers
// that already batched their predictions). pool_probs[i] corresponds to
// pool series i.
ReferenceSet select_references(const ProbVector& target_probs,
                               const std::vector<ProbVector>& pool_probs,
                               const std::vector<TimeSeries>& pool_series, std::size_t k);

}  // namespace tscf

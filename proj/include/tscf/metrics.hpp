#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "tscf/classifier.hpp"
#include "tscf/timeseries.hpp"

namespace tscf {

// ||t - c||_1 / (||c||_1 + ||t||_1); 0/0 -> 0.
double l1_proximity(const TimeSeries& target, const TimeSeries& candidate);

// ||t - c||_2 / (||c||_2 + ||t||_2); 0/0 -> 0.
double l2_proximity(const TimeSeries& target, const TimeSeries& candidate);

// 1 when the classifier predicts different classes for candidate and target.
int validity(const TimeSeries& target, const TimeSeries& candidate, const Classifier& f);

// Fraction of positions changed (exact float inequality).
double sparsity(const TimeSeries& target, const TimeSeries& candidate);

// Number of distinct valid candidates: valid per `validity`, deduplicated by
// exact bit pattern.
std::size_t diversity(const TimeSeries& target, const std::vector<TimeSeries>& candidates,
                      const Classifier& f);

struct MetricRow {
  std::size_t target_id = 0;
  std::size_t candidate_id = 0;
  double l1 = 0.0;
  double l2 = 0.0;
  int valid = 0;
  double sparsity = 0.0;
};

// Mean and population standard deviation (a single observation has std 0).
struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
};

struct MetricReport {
  std::vector<MetricRow> rows;  // one per (target, candidate) pair
  std::vector<std::pair<std::size_t, std::size_t>> diversity_per_target;  // (target_id, count)
  Aggregate l1, l2, valid, sparse, diverse;
  double validity_rate = 0.0;   // == valid.mean
  double mean_diversity = 0.0;  // == diverse.mean
};

// Scores every (target, candidate) pair plus per-target diversity, and
// aggregates each metric. candidates[i] belongs to targets[i]; target_ids
// (optional) names the targets in the report, defaulting to 0..n-1.
// Classifier calls are batched.
MetricReport evaluate_run(const std::vector<TimeSeries>& targets,
                          const std::vector<std::vector<TimeSeries>>& candidates,
                          const Classifier& f, const std::vector<std::size_t>& target_ids = {});

// CSV with header target_id,candidate_id,l1_proximity,l2_proximity,validity,sparsity.
void write_metrics_csv(const MetricReport& report, std::ostream& out);

// Aggregates plus per-target diversity as a JSON document.
std::string metrics_summary_json(const MetricReport& report);

}  // namespace tscf

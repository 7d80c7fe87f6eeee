#include "tscf/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <set>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "tscf/objectives.hpp"

namespace tscf {

using nlohmann::json;

double l1_proximity(const TimeSeries& target, const TimeSeries& candidate) {
  if (target.size() != candidate.size()) {
    throw std::invalid_argument("l1_proximity: length mismatch");
  }
  double diff = 0.0;
  double mass = 0.0;
  for (std::size_t t = 0; t < target.size(); ++t) {
    diff += std::abs(target[t] - candidate[t]);
    mass += std::abs(target[t]) + std::abs(candidate[t]);
  }
  return mass == 0.0 ? 0.0 : diff / mass;
}

double l2_proximity(const TimeSeries& target, const TimeSeries& candidate) {
  return scale_change(target, candidate);
}

double sparsity(const TimeSeries& target, const TimeSeries& candidate) {
  return change_fraction(target, candidate);
}

namespace {

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Population standard deviation; a single observation has spread zero.
double stddev_of(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double s = 0.0;
  for (double x : xs) s += (x - mean) * (x - mean);
  return std::sqrt(s / static_cast<double>(xs.size()));
}

Aggregate aggregate_of(const std::vector<double>& xs) {
  Aggregate a;
  a.mean = mean_of(xs);
  a.stddev = stddev_of(xs, a.mean);
  return a;
}

// Bit-pattern key so that e.g. 0.0 and -0.0 count as distinct series; the
// engine copies unchanged regions bit-exactly, so bitwise identity is the
// right notion of "same candidate".
std::vector<std::uint64_t> bit_key(const TimeSeries& s) {
  std::vector<std::uint64_t> key(s.size());
  static_assert(sizeof(double) == sizeof(std::uint64_t));
  std::memcpy(key.data(), s.values().data(), s.size() * sizeof(double));
  return key;
}

int label_validity(int target_label, int candidate_label) {
  return candidate_label != target_label ? 1 : 0;
}

std::size_t label_diversity(const std::vector<TimeSeries>& candidates,
                            const std::vector<int>& candidate_labels, int target_label) {
  if (candidates.size() != candidate_labels.size()) {
    throw std::invalid_argument("diversity: labels/candidates size mismatch");
  }
  std::set<std::vector<std::uint64_t>> distinct;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidate_labels[i] != target_label) distinct.insert(bit_key(candidates[i]));
  }
  return distinct.size();
}

}  // namespace

int validity(const TimeSeries& target, const TimeSeries& candidate, const Classifier& f) {
  const auto probs = f.predict_proba({target, candidate});
  return label_validity(argmax_label(probs[0]), argmax_label(probs[1]));
}

std::size_t diversity(const TimeSeries& target, const std::vector<TimeSeries>& candidates,
                      const Classifier& f) {
  if (candidates.empty()) return 0;
  std::vector<TimeSeries> batch;
  batch.reserve(candidates.size() + 1);
  batch.push_back(target);
  for (const auto& c : candidates) batch.push_back(c);
  const auto probs = f.predict_proba(batch);
  std::vector<int> labels;
  labels.reserve(candidates.size());
  for (std::size_t i = 1; i < probs.size(); ++i) labels.push_back(argmax_label(probs[i]));
  return label_diversity(candidates, labels, argmax_label(probs[0]));
}

MetricReport evaluate_run(const std::vector<TimeSeries>& targets,
                          const std::vector<std::vector<TimeSeries>>& candidates,
                          const Classifier& f, const std::vector<std::size_t>& target_ids) {
  if (targets.size() != candidates.size()) {
    throw std::invalid_argument("evaluate_run: targets/candidates size mismatch");
  }
  if (!target_ids.empty() && target_ids.size() != targets.size()) {
    throw std::invalid_argument("evaluate_run: target_ids size mismatch");
  }

  // One batched classifier call: all targets, then every candidate in order.
  std::vector<TimeSeries> batch;
  batch.reserve(targets.size());
  for (const auto& t : targets) batch.push_back(t);
  for (const auto& group : candidates) {
    for (const auto& c : group) batch.push_back(c);
  }
  std::vector<int> labels;
  if (!batch.empty()) {
    const auto probs = f.predict_proba(batch);
    labels.reserve(probs.size());
    for (const auto& p : probs) labels.push_back(argmax_label(p));
  }

  MetricReport report;
  std::vector<double> l1s, l2s, valids, sparsities, diversities;
  std::size_t cursor = targets.size();
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const std::size_t tid = target_ids.empty() ? i : target_ids[i];
    const int target_label = labels[i];
    std::vector<int> group_labels;
    group_labels.reserve(candidates[i].size());
    for (std::size_t j = 0; j < candidates[i].size(); ++j) {
      const TimeSeries& cand = candidates[i][j];
      const int cand_label = labels[cursor++];
      group_labels.push_back(cand_label);
      MetricRow row;
      row.target_id = tid;
      row.candidate_id = j;
      row.l1 = l1_proximity(targets[i], cand);
      row.l2 = l2_proximity(targets[i], cand);
      row.valid = label_validity(target_label, cand_label);
      row.sparsity = sparsity(targets[i], cand);
      report.rows.push_back(row);
      l1s.push_back(row.l1);
      l2s.push_back(row.l2);
      valids.push_back(static_cast<double>(row.valid));
      sparsities.push_back(row.sparsity);
    }
    const std::size_t d = label_diversity(candidates[i], group_labels, target_label);
    report.diversity_per_target.emplace_back(tid, d);
    diversities.push_back(static_cast<double>(d));
  }

  report.l1 = aggregate_of(l1s);
  report.l2 = aggregate_of(l2s);
  report.valid = aggregate_of(valids);
  report.sparse = aggregate_of(sparsities);
  report.diverse = aggregate_of(diversities);
  report.validity_rate = report.valid.mean;
  report.mean_diversity = report.diverse.mean;
  return report;
}

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void write_metrics_csv(const MetricReport& report, std::ostream& out) {
  out << "target_id,candidate_id,l1_proximity,l2_proximity,validity,sparsity\n";
  for (const auto& row : report.rows) {
    out << row.target_id << ',' << row.candidate_id << ',' << fmt17(row.l1) << ','
        << fmt17(row.l2) << ',' << row.valid << ',' << fmt17(row.sparsity) << '\n';
  }
}

std::string metrics_summary_json(const MetricReport& report) {
  json j;
  auto agg = [](const Aggregate& a) {
    json o;
    o["mean"] = a.mean;
    o["stddev"] = a.stddev;
    return o;
  };
  j["l1_proximity"] = agg(report.l1);
  j["l2_proximity"] = agg(report.l2);
  j["validity"] = agg(report.valid);
  j["sparsity"] = agg(report.sparse);
  j["diversity"] = agg(report.diverse);
  j["validity_rate"] = report.validity_rate;
  j["mean_diversity"] = report.mean_diversity;
  j["rows"] = report.rows.size();
  j["targets"] = report.diversity_per_target.size();
  return j.dump(2) + "\n";
}

}  // namespace tscf

#include "tscf/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace tscf {

int argmax_label(const ProbVector& probs) {
  if (probs.empty()) throw std::invalid_argument("argmax_label: empty probability vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs.size(); ++i) {
    if (probs[i] > probs[best]) best = i;  // strict: ties keep the lowest id
  }
  return static_cast<int>(best);
}

bool is_normalized(const ProbVector& probs, double tol) {
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tol;
}

int Classifier::predict_label(const TimeSeries& series) const {
  return argmax_label(predict_proba({series}).front());
}

KnnSoftmaxClassifier fit_knn_softmax(const Dataset& train, std::size_t k_neighbors,
                                     double temperature) {
  if (train.size() == 0) throw std::invalid_argument("fit_knn_softmax: empty training set");
  if (k_neighbors < 1 || k_neighbors > train.size()) {
    throw std::invalid_argument("fit_knn_softmax: k_neighbors must be in [1, " +
                                std::to_string(train.size()) + "], got " +
                                std::to_string(k_neighbors));
  }
  if (!(temperature > 0.0)) {
    throw std::invalid_argument("fit_knn_softmax: temperature must be positive");
  }

  KnnSoftmaxClassifier model;
  model.train_ = train.all_series();
  model.labels_ = train.labels();
  model.class_count_ = static_cast<std::size_t>(train.class_count());
  model.length_ = train.length();
  model.k_neighbors_ = k_neighbors;
  model.temperature_ = temperature;
  return model;
}

std::vector<ProbVector> KnnSoftmaxClassifier::predict_proba(
    const std::vector<TimeSeries>& batch) const {
  std::vector<ProbVector> out;
  out.reserve(batch.size());

  std::vector<std::vector<double>> per_class(class_count_);
  for (const auto& query : batch) {
    if (query.size() != length_) {
      throw std::invalid_argument("predict_proba: series length " + std::to_string(query.size()) +
                                  " does not match trained length " + std::to_string(length_));
    }

    for (auto& d : per_class) d.clear();
    for (std::size_t i = 0; i < train_.size(); ++i) {
      double sq = 0.0;
      const auto& tv = train_[i].values();
      const auto& qv = query.values();
      for (std::size_t t = 0; t < length_; ++t) {
        const double diff = tv[t] - qv[t];
        sq += diff * diff;
      }
      per_class[static_cast<std::size_t>(labels_[i])].push_back(std::sqrt(sq));
    }

    // Per class: mean of the k nearest distances (all of them if the class
    // has fewer than k exemplars), then a temperature softmax over the
    // negated distances. Classes absent from the training set sit at
    // distance +infinity and so get probability 0.
    ProbVector scores(class_count_);
    for (std::size_t c = 0; c < class_count_; ++c) {
      auto& d = per_class[c];
      if (d.empty()) {
        scores[c] = -std::numeric_limits<double>::infinity();
        continue;
      }
      const std::size_t k = std::min(k_neighbors_, d.size());
      std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k - 1), d.end());
      const double mean =
          std::accumulate(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), 0.0) /
          static_cast<double>(k);
      scores[c] = -mean / temperature_;
    }

    const double top = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    ProbVector probs(class_count_);
    for (std::size_t c = 0; c < class_count_; ++c) {
      probs[c] = std::exp(scores[c] - top);
      sum += probs[c];
    }
    for (double& p : probs) p /= sum;
    out.push_back(std::move(probs));
  }
  return out;
}

}  // namespace tscf

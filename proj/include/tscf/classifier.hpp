#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

#include "tscf/timeseries.hpp"

namespace tscf {

// Per-class probabilities; entries in [0,1], summing to 1 within 1e-9.
using ProbVector = std::vector<double>;

// Largest entry wins; exact ties resolve to the lowest class id.
int argmax_label(const ProbVector& probs);

bool is_normalized(const ProbVector& probs, double tol = 1e-9);

// Anything that maps batches of series to per-class probability rows.
// Implementations must be deterministic and safe to share across threads.
class Classifier {
 public:
  virtual ~Classifier() = default;

  virtual std::size_t class_count() const = 0;
  virtual std::size_t series_length() const = 0;

  // One ProbVector per input, in input order. Throws std::invalid_argument
  // if any series length differs from series_length().
  virtual std::vector<ProbVector> predict_proba(const std::vector<TimeSeries>& batch) const = 0;

  int predict_label(const TimeSeries& series) const;
};

// Nearest-neighbour classifier with a softmax head: per class, the distance
// is the mean of that class's k nearest Euclidean distances to the query;
// probabilities are softmax(-distance / temperature).
class KnnSoftmaxClassifier final : public Classifier {
 public:
  std::size_t class_count() const override { return class_count_; }
  std::size_t series_length() const override { return length_; }
  std::vector<ProbVector> predict_proba(const std::vector<TimeSeries>& batch) const override;

 private:
  friend KnnSoftmaxClassifier fit_knn_softmax(const Dataset&, std::size_t, double);
  KnnSoftmaxClassifier() = default;

  std::vector<TimeSeries> train_;
  std::vector<int> labels_;
  std::size_t class_count_ = 0;
  std::size_t length_ = 0;
  std::size_t k_neighbors_ = 1;
  double temperature_ = 1.0;
};

// Validates and stores the training set. Throws std::invalid_argument on an
// empty training set, k_neighbors outside [1, train size], or a
// non-positive temperature.
KnnSoftmaxClassifier fit_knn_softmax(const Dataset& train, std::size_t k_neighbors = 1,
                                     double temperature = 1.0);

// Subprocess pipe breakage: spawn failure, unexpected exit, closed stream.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Well-transported but invalid reply: bad JSON, id mismatch, wrong shape,
// probabilities off by more than the wire tolerance.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bridges prediction to an external process speaking line-delimited JSON on
// stdin/stdout. One request per line:
//   {"id": <int>, "series": [[...], ...]}
// and one response per request, in order:
//   {"id": <same int>, "probs": [[...], ...]}
// Responses are validated (row count, class count, sum within 1e-6) and then
// renormalized to exact ProbVectors. Access to the subprocess is serialized,
// so a single instance may be shared across threads. The wire protocol has
// no handshake, so the expected class count and series length are supplied
// up front.
class ExternalClassifier final : public Classifier {
 public:
  ExternalClassifier(std::string command, std::size_t class_count, std::size_t series_length);
  ~ExternalClassifier() override;

  ExternalClassifier(const ExternalClassifier&) = delete;
  ExternalClassifier& operator=(const ExternalClassifier&) = delete;

  std::size_t class_count() const override { return class_count_; }
  std::size_t series_length() const override { return length_; }
  std::vector<ProbVector> predict_proba(const std::vector<TimeSeries>& batch) const override;

 private:
  struct Process;  // keeps the POSIX plumbing out of the header

  std::unique_ptr<Process> proc_;
  std::string command_;
  std::size_t class_count_ = 0;
  std::size_t length_ = 0;
  mutable std::mutex mu_;
  mutable std::uint64_t next_id_ = 0;
};

}  // namespace tscf

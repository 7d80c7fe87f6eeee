#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace tscf {

// Malformed dataset text (bad number, ragged row, unusable shape).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fixed-length univariate series. Values are validated finite on
// construction and immutable afterwards.
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values);

  const std::vector<double>& values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

 private:
  std::vector<double> values_;
};

// Labeled collection of equal-length series. Labels are contiguous class ids
// in [0, class_count); the label values found in the source file are kept
// per class id for reporting and round-trip serialization.
class Dataset {
 public:
  Dataset(std::vector<TimeSeries> series, std::vector<int> labels,
          std::vector<double> original_label_values);

  std::size_t size() const { return series_.size(); }
  std::size_t length() const { return series_.empty() ? 0 : series_.front().size(); }
  int class_count() const { return static_cast<int>(original_label_values_.size()); }

  const TimeSeries& series(std::size_t i) const { return series_.at(i); }
  const std::vector<TimeSeries>& all_series() const { return series_; }
  int label(std::size_t i) const { return labels_.at(i); }
  const std::vector<int>& labels() const { return labels_; }
  double original_label_value(int class_id) const { return original_label_values_.at(class_id); }

  friend bool operator==(const Dataset&, const Dataset&) = default;

 private:
  std::vector<TimeSeries> series_;
  std::vector<int> labels_;
  std::vector<double> original_label_values_;  // ascending, one per class id
};

// Reads records of the form "label sep v1 sep v2 ...", one per line, where
// sep is a tab or a comma. Labels may be arbitrary numbers; they are remapped
// to contiguous ids 0..k-1 by ascending original value. Throws ParseError
// with the offending line (and column for bad tokens).
Dataset parse_ucr(std::istream& in);
Dataset parse_ucr_file(const std::string& path);

// Inverse of parse_ucr: tab-separated, original label first, values at 17
// significant digits (binary64 round-trips exactly).
void serialize_ucr(const Dataset& data, std::ostream& out);

// Synthetic three-class benchmark: flat plateau / rising ramp / falling ramp
// of height 6+eta on a random interval, plus unit Gaussian noise. Classes are
// generated in that order with per_class series each, labels 0/1/2. Pure
// function of its arguments. Requires length >= 64 so every sampled interval
// fits; at length >= 128 the interval distribution is the canonical one
// (start in [16,32], interval length in [32,96]).
Dataset generate_cbf(std::size_t per_class, std::size_t length, std::uint64_t seed);

}  // namespace tscf

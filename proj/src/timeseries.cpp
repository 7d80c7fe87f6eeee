#include "tscf/timeseries.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <utility>

#include "tscf/rng.hpp"

namespace tscf {

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
  if (values_.size() < 2) {
    throw std::invalid_argument("TimeSeries: need at least 2 values, got " +
                                std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw std::invalid_argument("TimeSeries: non-finite value at position " + std::to_string(i));
    }
  }
}

Dataset::Dataset(std::vector<TimeSeries> series, std::vector<int> labels,
                 std::vector<double> original_label_values)
    : series_(std::move(series)),
      labels_(std::move(labels)),
      original_label_values_(std::move(original_label_values)) {
  if (series_.size() != labels_.size()) {
    throw std::invalid_argument("Dataset: series/label count mismatch");
  }
  if (original_label_values_.size() < 2) {
    throw std::invalid_argument("Dataset: need at least 2 classes");
  }
  for (std::size_t i = 1; i < original_label_values_.size(); ++i) {
    if (!(original_label_values_[i - 1] < original_label_values_[i])) {
      throw std::invalid_argument("Dataset: original label values must be strictly ascending");
    }
  }
  const int k = class_count();
  for (int label : labels_) {
    if (label < 0 || label >= k) throw std::invalid_argument("Dataset: label id out of range");
  }
  for (const auto& s : series_) {
    if (s.size() != series_.front().size()) {
      throw std::invalid_argument("Dataset: series lengths differ");
    }
  }
}

namespace {

// Splits a record line on tabs/commas into trimmed tokens, recording each
// token's 1-based starting column for error messages.
std::vector<std::pair<std::string, std::size_t>> tokenize_record(const std::string& line) {
  std::vector<std::pair<std::string, std::size_t>> tokens;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == '\t' || line[i] == ',') {
      std::size_t begin = start, end = i;
      while (begin < end && (line[begin] == ' ' || line[begin] == '\r')) ++begin;
      while (end > begin && (line[end - 1] == ' ' || line[end - 1] == '\r')) --end;
      tokens.emplace_back(line.substr(begin, end - begin), begin + 1);
      start = i + 1;
    }
  }
  return tokens;
}

double parse_number(const std::string& token, std::size_t line_no, std::size_t column) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || token.empty()) {
    throw ParseError("ucr parse: line " + std::to_string(line_no) + ", column " +
                     std::to_string(column) + ": expected a number, got \"" + token + "\"");
  }
  if (!std::isfinite(value)) {
    throw ParseError("ucr parse: line " + std::to_string(line_no) + ", column " +
                     std::to_string(column) + ": non-finite value");
  }
  return value;
}

}  // namespace

Dataset parse_ucr(std::istream& in) {
  std::vector<TimeSeries> series;
  std::vector<double> raw_labels;
  std::string line;
  std::size_t line_no = 0;
  std::size_t expected_fields = 0;

  while (std::getline(in, line)) {
    ++line_no;
    // Tolerate blank lines (including a trailing newline at EOF).
    bool blank = true;
    for (char c : line) {
      if (c != ' ' && c != '\t' && c != '\r') {
        blank = false;
        break;
      }
    }
    if (blank) continue;

    const auto tokens = tokenize_record(line);
    if (expected_fields == 0) {
      expected_fields = tokens.size();
      if (expected_fields < 3) {
        throw ParseError("ucr parse: line " + std::to_string(line_no) +
                         ": a record needs a label and at least 2 values");
      }
    } else if (tokens.size() != expected_fields) {
      throw ParseError("ucr parse: line " + std::to_string(line_no) + ": expected " +
                       std::to_string(expected_fields) + " fields, got " +
                       std::to_string(tokens.size()));
    }

    raw_labels.push_back(parse_number(tokens[0].first, line_no, tokens[0].second));
    std::vector<double> values;
    values.reserve(tokens.size() - 1);
    for (std::size_t i = 1; i < tokens.size(); ++i) {
      values.push_back(parse_number(tokens[i].first, line_no, tokens[i].second));
    }
    series.emplace_back(std::move(values));
  }

  if (series.empty()) throw ParseError("ucr parse: no records");

  // Remap labels to contiguous ids by ascending original value.
  std::map<double, int> id_of;
  for (double v : raw_labels) id_of.emplace(v, 0);
  if (id_of.size() < 2) throw ParseError("ucr parse: need at least 2 distinct labels");
  std::vector<double> originals;
  originals.reserve(id_of.size());
  for (auto& [value, id] : id_of) {
    id = static_cast<int>(originals.size());
    originals.push_back(value);
  }
  std::vector<int> labels;
  labels.reserve(raw_labels.size());
  for (double v : raw_labels) labels.push_back(id_of[v]);

  return Dataset(std::move(series), std::move(labels), std::move(originals));
}

Dataset parse_ucr_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("ucr parse: cannot open " + path);
  return parse_ucr(in);
}

namespace {

void append_number(std::string& out, double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  out += buf;
}

}  // namespace

void serialize_ucr(const Dataset& data, std::ostream& out) {
  std::string text;
  for (std::size_t i = 0; i < data.size(); ++i) {
    append_number(text, data.original_label_value(data.label(i)));
    for (double v : data.series(i).values()) {
      text += '\t';
      append_number(text, v);
    }
    text += '\n';
  }
  out << text;
}

Dataset generate_cbf(std::size_t per_class, std::size_t length, std::uint64_t seed) {
  if (per_class < 1) throw std::invalid_argument("generate_cbf: per_class must be >= 1");
  // Interval start reaches 32 and interval length is at least 32, so shorter
  // series cannot hold every sampled interval.
  if (length < 64) {
    throw std::invalid_argument("generate_cbf: length " + std::to_string(length) +
                                " too small to contain the shape interval; need >= 64");
  }

  Rng rng(seed);
  std::vector<TimeSeries> series;
  std::vector<int> labels;
  series.reserve(per_class * 3);
  labels.reserve(per_class * 3);

  for (int cls = 0; cls < 3; ++cls) {
    for (std::size_t i = 0; i < per_class; ++i) {
      const double height = 6.0 + rng.normal();
      const auto a = static_cast<std::size_t>(rng.uniform_int(16, 32));
      const auto max_len = static_cast<std::int64_t>(std::min<std::size_t>(96, length - a));
      const auto span = static_cast<std::size_t>(rng.uniform_int(32, max_len));
      const std::size_t b = a + span;

      std::vector<double> values(length);
      for (std::size_t t = 0; t < length; ++t) {
        double shape = 0.0;
        if (t >= a && t < b) {
          const double ramp = static_cast<double>(t - a) / static_cast<double>(span);
          if (cls == 0) shape = height;                  // cylinder: flat plateau
          else if (cls == 1) shape = height * ramp;      // bell: rising ramp
          else shape = height * (1.0 - ramp);            // funnel: falling ramp
        }
        values[t] = shape + rng.normal();
      }
      series.emplace_back(std::move(values));
      labels.push_back(cls);
    }
  }

  return Dataset(std::move(series), std::move(labels), {0.0, 1.0, 2.0});
}

}  // namespace tscf

#pragma once

// Shared fixtures for the test binaries: deterministic stand-in classifiers,
// scratch directories, and output capture.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tscf/classifier.hpp"
#include "tscf/timeseries.hpp"

namespace tscf::testing {

// Classifier backed by a plain function, with call accounting so tests can
// assert batching behaviour. The function must be pure.
class FnClassifier final : public Classifier {
 public:
  using Fn = std::function<ProbVector(const TimeSeries&)>;

  FnClassifier(Fn fn, std::size_t class_count, std::size_t series_length)
      : fn_(std::move(fn)), class_count_(class_count), length_(series_length) {}

  std::size_t class_count() const override { return class_count_; }
  std::size_t series_length() const override { return length_; }

  std::vector<ProbVector> predict_proba(const std::vector<TimeSeries>& batch) const override {
    ++calls_;
    rows_ += batch.size();
    std::vector<ProbVector> out;
    out.reserve(batch.size());
    for (const auto& s : batch) {
      if (s.size() != length_) {
        throw std::invalid_argument("FnClassifier: series length " + std::to_string(s.size()) +
                                    " does not match expected " + std::to_string(length_));
      }
      out.push_back(fn_(s));
    }
    return out;
  }

  std::size_t calls() const { return calls_.load(); }
  std::size_t rows() const { return rows_.load(); }

 private:
  Fn fn_;
  std::size_t class_count_;
  std::size_t length_;
  mutable std::atomic<std::size_t> calls_{0};
  mutable std::atomic<std::size_t> rows_{0};
};

// Two-class classifier keyed on the sign of the first point: negative-first
// series land in class 1. Handy for constructing guaranteed label flips.
inline FnClassifier sign_classifier(std::size_t length) {
  return FnClassifier(
      [](const TimeSeries& s) {
        return s[0] < 0.0 ? ProbVector{0.1, 0.9} : ProbVector{0.9, 0.1};
      },
      2, length);
}

// Self-deleting scratch directory under the system temp root.
class TempDir {
 public:
  TempDir() {
    std::string tmpl =
        (std::filesystem::temp_directory_path() / "tscf_test_XXXXXX").string();
    if (mkdtemp(tmpl.data()) == nullptr) {
      throw std::runtime_error("TempDir: mkdtemp failed");
    }
    path_ = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Redirects std::cout for the lifetime of the object (the CLI prints its
// summaries there).
class CoutCapture {
 public:
  CoutCapture() : old_(std::cout.rdbuf(buffer_.rdbuf())) {}
  ~CoutCapture() { std::cout.rdbuf(old_); }
  std::string text() const { return buffer_.str(); }

 private:
  std::ostringstream buffer_;
  std::streambuf* old_;
};

inline Dataset make_dataset(std::vector<std::vector<double>> rows, std::vector<int> labels,
                            int class_count) {
  std::vector<TimeSeries> series;
  series.reserve(rows.size());
  for (auto& r : rows) series.emplace_back(std::move(r));
  std::vector<double> originals;
  for (int c = 0; c < class_count; ++c) originals.push_back(static_cast<double>(c));
  return Dataset(std::move(series), std::move(labels), std::move(originals));
}

// Command line for a bundled python stub, e.g. stub_command("uniform 3").
inline std::string stub_command(const std::string& args) {
  return std::string("python3 ") + TSCF_TEST_STUB_DIR + "/prob_stub.py " + args;
}

}  // namespace tscf::testing

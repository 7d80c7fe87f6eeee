#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "tscf/evolution.hpp"

namespace tscf {

// Everything needed to reproduce a run bit-for-bit, written before any
// result file. Paths are stored absolute so evaluation can find the data
// later regardless of working directory.
struct RunManifest {
  std::string engine_version;
  std::string created_utc;
  std::string train_path;
  std::string test_path;
  std::string classifier_spec;
  std::string output_dir;
  std::vector<std::size_t> instances;  // resolved test indices, in run order
  RunConfig config;                    // config.seed is the master seed
};

std::string manifest_to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const std::string& text);

// One explained test instance. `error` is non-empty when the instance
// failed (no qualifying references); failed instances carry no candidates.
struct InstanceRecord {
  std::size_t target_id = 0;
  double true_label = 0.0;  // original label value from the dataset
  int predicted_label = 0;  // class id under the run's classifier
  bool degenerate_references = false;
  std::string error;
  std::vector<std::size_t> reference_pool_indices;
  std::vector<double> reference_distances;
  std::vector<Candidate> front;
};

std::string instance_to_json(const InstanceRecord& record);
InstanceRecord instance_from_json(const std::string& text);

// Front rows for every instance as CSV with header
// target_id,candidate_id,f1,f2,soi_start,soi_end,ref_idx.
std::string fronts_to_csv(const std::vector<InstanceRecord>& records);

// Writes via a temp file in the same directory plus rename, so readers never
// observe a partially written file.
void atomic_write_file(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

}  // namespace tscf

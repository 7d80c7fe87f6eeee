#include <cstring>
#include <filesystem>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "support.hpp"
#include "tscf/run_io.hpp"

using namespace tscf;
using namespace tscf::testing;

namespace {

RunManifest sample_manifest() {
  RunManifest m;
  m.engine_version = "0.1.0";
  m.created_utc = "2026-08-17T12:00:00Z";
  m.train_path = "/data/cbf_train.tsv";
  m.test_path = "/data/cbf_test.tsv";
  m.classifier_spec = "knn:k=2,temp=0.5";
  m.output_dir = "/tmp/run1";
  m.instances = {0, 3, 17};
  m.config.pop_size = 12;
  m.config.generations = 9;
  m.config.p_crossover = 0.25;
  m.config.references = 3;
  m.config.tau = 0.15;
  m.config.ar_order = 1;
  m.config.seed = 987654321;
  return m;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("manifest JSON round-trips every field") {
  const RunManifest m = sample_manifest();
  const RunManifest back = manifest_from_json(manifest_to_json(m));
  CHECK(back.engine_version == m.engine_version);
  CHECK(back.created_utc == m.created_utc);
  CHECK(back.train_path == m.train_path);
  CHECK(back.test_path == m.test_path);
  CHECK(back.classifier_spec == m.classifier_spec);
  CHECK(back.output_dir == m.output_dir);
  CHECK(back.instances == m.instances);
  CHECK(back.config == m.config);
}

TEST_CASE("manifest parsing rejects malformed input") {
  CHECK_THROWS_AS(manifest_from_json("{oops"), std::invalid_argument);
  CHECK_THROWS_AS(manifest_from_json("[1]"), std::invalid_argument);
  CHECK_THROWS_AS(manifest_from_json(R"({"engine_version": "x"})"), std::invalid_argument);
}

namespace {

InstanceRecord sample_record() {
  InstanceRecord r;
  r.target_id = 3;
  r.true_label = 2.0;
  r.predicted_label = 1;
  r.degenerate_references = true;
  r.reference_pool_indices = {4, 9};
  r.reference_distances = {0.1, 1.0 / 3.0};
  // Values chosen to stress serialization: non-terminating binary fractions,
  // a subnormal, and a negative zero.
  const std::vector<double> tricky{0.1, -1.0 / 3.0, 1e-300, 5e-324, -0.0, 42.0};
  r.front.push_back(Candidate{Chromosome{2, 9, 1}, TimeSeries(tricky), ObjectivePair{0.5, 0.25}});
  r.front.push_back(
      Candidate{Chromosome{0, 3, 0}, TimeSeries({1.0, 2.0, 3.0, 4.0, 5.0, 6.0}),
                ObjectivePair{0.125, 0.75}});
  return r;
}

}  // namespace

TEST_CASE("instance JSON round-trips bit-exactly") {
  const InstanceRecord r = sample_record();
  const InstanceRecord back = instance_from_json(instance_to_json(r));
  CHECK(back.target_id == r.target_id);
  CHECK(back.true_label == r.true_label);
  CHECK(back.predicted_label == r.predicted_label);
  CHECK(back.degenerate_references == r.degenerate_references);
  CHECK(back.error.empty());
  CHECK(back.reference_pool_indices == r.reference_pool_indices);
  CHECK(same_bits(back.reference_distances, r.reference_distances));
  REQUIRE(back.front.size() == r.front.size());
  for (std::size_t i = 0; i < r.front.size(); ++i) {
    CHECK(back.front[i].chrom == r.front[i].chrom);
    CHECK(back.front[i].objectives == r.front[i].objectives);
    CHECK(same_bits(back.front[i].series.values(), r.front[i].series.values()));
  }
}

TEST_CASE("a failed instance round-trips its error and stays empty") {
  InstanceRecord r;
  r.target_id = 7;
  r.true_label = 1.0;
  r.predicted_label = 0;
  r.error = "no usable reference";
  const InstanceRecord back = instance_from_json(instance_to_json(r));
  CHECK(back.target_id == 7);
  CHECK(back.error == "no usable reference");
  CHECK(back.front.empty());
  CHECK(back.reference_pool_indices.empty());
}

TEST_CASE("instance parsing rejects malformed input") {
  CHECK_THROWS_AS(instance_from_json("{oops"), std::invalid_argument);
  CHECK_THROWS_AS(instance_from_json("[]"), std::invalid_argument);
  CHECK_THROWS_AS(instance_from_json(R"({"target_id": 1})"), std::invalid_argument);
}

TEST_CASE("fronts_to_csv numbers candidates per instance and skips empty records") {
  const InstanceRecord full = sample_record();
  InstanceRecord failed;
  failed.target_id = 5;
  failed.error = "no usable reference";
  InstanceRecord empty_front;
  empty_front.target_id = 6;

  const std::string csv = fronts_to_csv({full, failed, empty_front});
  std::istringstream in(csv);
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "target_id,candidate_id,f1,f2,soi_start,soi_end,ref_idx");
  REQUIRE(std::getline(in, line));
  CHECK(line == "3,0,0.5,0.25,2,9,1");
  REQUIRE(std::getline(in, line));
  CHECK(line == "3,1,0.125,0.75,0,3,0");
  CHECK_FALSE(std::getline(in, line));  // the failed and empty records add nothing
}

TEST_CASE("atomic_write_file leaves only the final file behind") {
  const TempDir dir;
  const auto path = dir / "out.json";
  atomic_write_file(path, "first");
  CHECK(read_file(path) == "first");
  atomic_write_file(path, "second version");
  CHECK(read_file(path) == "second version");

  std::size_t entries = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir.path())) {
    ++entries;
    CHECK(e.path().filename() == "out.json");
  }
  CHECK(entries == 1);
}

TEST_CASE("atomic_write_file and read_file report unusable paths") {
  const TempDir dir;
  CHECK_THROWS_AS(atomic_write_file(dir / "missing_subdir" / "x.json", "content"),
                  std::runtime_error);
  CHECK_THROWS_AS(read_file(dir / "never_written.json"), std::runtime_error);
}

TEST_CASE("atomic_write_file round-trips binary-ish content exactly") {
  const TempDir dir;
  std::string blob;
  for (int i = 0; i < 256; ++i) blob.push_back(static_cast<char>(i));
  const auto path = dir / "blob.bin";
  atomic_write_file(path, blob);
  CHECK(read_file(path) == blob);
}

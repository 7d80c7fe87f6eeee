#include "tscf/run_io.hpp"

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace tscf {

using nlohmann::json;

namespace {

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

json candidate_to_json(const Candidate& c) {
  json j;
  j["soi_start"] = c.chrom.soi_start;
  j["soi_end"] = c.chrom.soi_end;
  j["ref_idx"] = c.chrom.ref_idx;
  j["f1"] = c.objectives.f1;
  j["f2"] = c.objectives.f2;
  j["series"] = c.series.values();
  return j;
}

Candidate candidate_from_json(const json& j) {
  Chromosome chrom;
  chrom.soi_start = j.at("soi_start").get<std::size_t>();
  chrom.soi_end = j.at("soi_end").get<std::size_t>();
  chrom.ref_idx = j.at("ref_idx").get<std::size_t>();
  ObjectivePair objectives{j.at("f1").get<double>(), j.at("f2").get<double>()};
  return Candidate{chrom, TimeSeries(j.at("series").get<std::vector<double>>()), objectives};
}

json parse_object(const std::string& text, const char* what) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string(what) + ": invalid JSON: " + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument(std::string(what) + ": expected a JSON object");
  return j;
}

}  // namespace

std::string manifest_to_json(const RunManifest& manifest) {
  json j;
  j["engine_version"] = manifest.engine_version;
  j["created_utc"] = manifest.created_utc;
  j["train_path"] = manifest.train_path;
  j["test_path"] = manifest.test_path;
  j["classifier_spec"] = manifest.classifier_spec;
  j["output_dir"] = manifest.output_dir;
  j["instances"] = manifest.instances;
  j["config"] = json::parse(manifest.config.to_json());
  return j.dump(2) + "\n";
}

RunManifest manifest_from_json(const std::string& text) {
  const json j = parse_object(text, "manifest");
  RunManifest m;
  try {
    m.engine_version = j.at("engine_version").get<std::string>();
    m.created_utc = j.at("created_utc").get<std::string>();
    m.train_path = j.at("train_path").get<std::string>();
    m.test_path = j.at("test_path").get<std::string>();
    m.classifier_spec = j.at("classifier_spec").get<std::string>();
    m.output_dir = j.at("output_dir").get<std::string>();
    m.instances = j.at("instances").get<std::vector<std::size_t>>();
    m.config = RunConfig::from_json(j.at("config").dump());
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("manifest: ") + e.what());
  }
  return m;
}

std::string instance_to_json(const InstanceRecord& record) {
  json j;
  j["target_id"] = record.target_id;
  j["true_label"] = record.true_label;
  j["predicted_label"] = record.predicted_label;
  j["degenerate_references"] = record.degenerate_references;
  j["error"] = record.error;
  j["reference_pool_indices"] = record.reference_pool_indices;
  j["reference_distances"] = record.reference_distances;
  json front = json::array();
  for (const auto& c : record.front) front.push_back(candidate_to_json(c));
  j["front"] = std::move(front);
  return j.dump(2) + "\n";
}

InstanceRecord instance_from_json(const std::string& text) {
  const json j = parse_object(text, "instance");
  InstanceRecord r;
  try {
    r.target_id = j.at("target_id").get<std::size_t>();
    r.true_label = j.at("true_label").get<double>();
    r.predicted_label = j.at("predicted_label").get<int>();
    r.degenerate_references = j.at("degenerate_references").get<bool>();
    r.error = j.at("error").get<std::string>();
    r.reference_pool_indices = j.at("reference_pool_indices").get<std::vector<std::size_t>>();
    r.reference_distances = j.at("reference_distances").get<std::vector<double>>();
    for (const auto& cj : j.at("front")) r.front.push_back(candidate_from_json(cj));
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("instance: ") + e.what());
  }
  return r;
}

std::string fronts_to_csv(const std::vector<InstanceRecord>& records) {
  std::ostringstream out;
  out << "target_id,candidate_id,f1,f2,soi_start,soi_end,ref_idx\n";
  for (const auto& rec : records) {
    for (std::size_t j = 0; j < rec.front.size(); ++j) {
      const Candidate& c = rec.front[j];
      out << rec.target_id << ',' << j << ',' << fmt17(c.objectives.f1) << ','
          << fmt17(c.objectives.f2) << ',' << c.chrom.soi_start << ',' << c.chrom.soi_end << ','
          << c.chrom.ref_idx << '\n';
    }
  }
  return out.str();
}

void atomic_write_file(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw std::runtime_error("rename failed: " + path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  if (!in && !in.eof()) throw std::runtime_error("read failed: " + path.string());
  return buf.str();
}

}  // namespace tscf

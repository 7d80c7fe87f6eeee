#include "tscf/cli.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "tscf/classifier.hpp"
#include "tscf/evolution.hpp"
#include "tscf/metrics.hpp"
#include "tscf/run_io.hpp"
#include "tscf/timeseries.hpp"
#include "tscf/version.hpp"

namespace tscf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Exit-code carriers: bad invocation vs. bad input files.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string iso_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::uint64_t parse_u64(std::string_view text, const char* what) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw UsageError(std::string(what) + ": expected a non-negative integer, got \"" +
                     std::string(text) + "\"");
  }
  return value;
}

double parse_f64(std::string_view text, const char* what) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    throw UsageError(std::string(what) + ": expected a number, got \"" + std::string(text) + "\"");
  }
  return value;
}

std::vector<std::size_t> parse_index_list(const std::string& text) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string token =
        text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (token.empty()) throw UsageError("--instances: empty entry in \"" + text + "\"");
    out.push_back(static_cast<std::size_t>(parse_u64(token, "--instances")));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

// `knn:k=1,temp=1.0` or `ext:<command line>`.
struct ClassifierSpec {
  bool external = false;
  std::size_t k_neighbors = 1;
  double temperature = 1.0;
  std::string command;
};

ClassifierSpec parse_classifier_spec(const std::string& text) {
  ClassifierSpec spec;
  if (text == "knn") return spec;
  if (text.rfind("ext:", 0) == 0) {
    spec.external = true;
    spec.command = text.substr(4);
    if (spec.command.empty()) throw UsageError("classifier spec: ext: needs a command");
    return spec;
  }
  if (text.rfind("knn:", 0) != 0) {
    throw UsageError("classifier spec must be knn[:k=..,temp=..] or ext:<command>, got \"" +
                     text + "\"");
  }
  std::string params = text.substr(4);
  std::size_t pos = 0;
  while (pos < params.size()) {
    const std::size_t comma = params.find(',', pos);
    const std::string item =
        params.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    const std::size_t eq = item.find('=');
    if (eq == std::string::npos) {
      throw UsageError("classifier spec: expected key=value, got \"" + item + "\"");
    }
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "k") {
      spec.k_neighbors = static_cast<std::size_t>(parse_u64(value, "classifier spec k"));
    } else if (key == "temp") {
      spec.temperature = parse_f64(value, "classifier spec temp");
    } else {
      throw UsageError("classifier spec: unknown key \"" + key + "\"");
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return spec;
}

Dataset load_dataset(const std::string& path) {
  try {
    return parse_ucr_file(path);
  } catch (const std::exception& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::unique_ptr<Classifier> make_classifier(const ClassifierSpec& spec, const Dataset* train,
                                            std::size_t class_count, std::size_t series_length) {
  if (spec.external) {
    try {
      return std::make_unique<ExternalClassifier>(spec.command, class_count, series_length);
    } catch (const std::exception& e) {
      throw DataError(std::string("external classifier: ") + e.what());
    }
  }
  if (train == nullptr) {
    throw UsageError("a knn classifier needs a training set (--train)");
  }
  try {
    auto fitted = fit_knn_softmax(*train, spec.k_neighbors, spec.temperature);
    return std::make_unique<KnnSoftmaxClassifier>(std::move(fitted));
  } catch (const std::exception& e) {
    throw UsageError(std::string("classifier spec: ") + e.what());
  }
}

void write_text(const fs::path& path, std::string_view content) {
  try {
    atomic_write_file(path, content);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }
}

// Tab/comma field splitter for the external-counterfactual format:
// one line per candidate, target index first, then the full series.
std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : line) {
    if (c == '\t' || c == ',') {
      fields.push_back(current);
      current.clear();
    } else if (c != '\r' && c != ' ') {
      current += c;
    }
  }
  fields.push_back(current);
  return fields;
}

// ---------------------------------------------------------------- gen-data

struct GenDataArgs {
  std::string generator;
  std::size_t train_per_class = 0;
  std::size_t test_per_class = 0;
  std::size_t length = 128;
  std::uint64_t seed = 0;
  std::string output;
};

int cmd_gen_data(const GenDataArgs& args) {
  if (args.generator != "cbf") {
    throw UsageError("unknown generator \"" + args.generator + "\" (available: cbf)");
  }
  Dataset train = [&] {
    try {
      return generate_cbf(args.train_per_class, args.length, args.seed);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }();
  // Independent stream for the test split so the two files never overlap.
  Dataset test = generate_cbf(args.test_per_class, args.length, args.seed + 1);

  const fs::path dir(args.output);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError(dir.string() + ": " + ec.message());

  const fs::path train_path = dir / "cbf_train.tsv";
  const fs::path test_path = dir / "cbf_test.tsv";
  for (const auto& [path, data] : {std::pair{train_path, &train}, std::pair{test_path, &test}}) {
    std::ostringstream buf;
    serialize_ucr(*data, buf);
    write_text(path, buf.str());
    std::cout << "wrote " << path.string() << " (" << data->size() << " rows, "
              << data->class_count() << " classes, length " << data->length() << ")\n";
  }
  return kExitOk;
}

// ----------------------------------------------------------------- explain

struct ExplainArgs {
  std::string train_path;
  std::string test_path;
  std::string classifier = "knn:k=1,temp=1.0";
  std::string output;
  std::string config_path;
  std::string instances_text;
  std::size_t jobs = 1;
  RunConfig config;
  // which flags were actually given, for config-file layering
  bool has_classifier = false, has_instances = false, has_jobs = false;
  bool has_seed = false, has_pop = false, has_gens = false, has_pcx = false, has_pmu = false,
       has_refs = false, has_tau = false, has_ar = false;
};

// Layer: defaults -> config file -> flags. The config file may carry the
// run parameters plus the same dataset/classifier knobs as the flags.
void apply_config_file(ExplainArgs& a) {
  if (a.config_path.empty()) return;
  std::string text;
  try {
    text = read_file(a.config_path);
  } catch (const std::exception& e) {
    throw UsageError(e.what());
  }
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw UsageError(a.config_path + ": " + e.what());
  }
  if (!j.is_object()) throw UsageError(a.config_path + ": expected a JSON object");

  try {
    if (j.contains("train")) {
      if (a.train_path.empty()) a.train_path = j["train"].get<std::string>();
      j.erase("train");
    }
    if (j.contains("test")) {
      if (a.test_path.empty()) a.test_path = j["test"].get<std::string>();
      j.erase("test");
    }
    if (j.contains("classifier")) {
      if (!a.has_classifier) a.classifier = j["classifier"].get<std::string>();
      j.erase("classifier");
    }
    if (j.contains("output")) {
      if (a.output.empty()) a.output = j["output"].get<std::string>();
      j.erase("output");
    }
    if (j.contains("jobs")) {
      if (!a.has_jobs) a.jobs = j["jobs"].get<std::size_t>();
      j.erase("jobs");
    }
    if (j.contains("instances")) {
      if (!a.has_instances) {
        std::string joined;
        for (const auto& v : j["instances"]) {
          if (!joined.empty()) joined += ',';
          joined += std::to_string(v.get<std::size_t>());
        }
        a.instances_text = joined;
        a.has_instances = !joined.empty();
      }
      j.erase("instances");
    }
  } catch (const json::exception& e) {
    throw UsageError(a.config_path + ": " + e.what());
  }

  RunConfig flag_values = a.config;  // remember flag overrides before re-layering
  try {
    a.config = RunConfig::from_json(j.dump(), RunConfig{});
  } catch (const std::invalid_argument& e) {
    throw UsageError(a.config_path + ": " + e.what());
  }
  if (a.has_seed) a.config.seed = flag_values.seed;
  if (a.has_pop) a.config.pop_size = flag_values.pop_size;
  if (a.has_gens) a.config.generations = flag_values.generations;
  if (a.has_pcx) a.config.p_crossover = flag_values.p_crossover;
  if (a.has_pmu) a.config.p_mutation = flag_values.p_mutation;
  if (a.has_refs) a.config.references = flag_values.references;
  if (a.has_tau) a.config.tau = flag_values.tau;
  if (a.has_ar) a.config.ar_order = flag_values.ar_order;
}

int cmd_explain(ExplainArgs args) {
  apply_config_file(args);
  if (args.train_path.empty()) throw UsageError("--train is required");
  if (args.test_path.empty()) throw UsageError("--test is required");
  if (args.output.empty()) throw UsageError("--output is required");
  if (args.jobs < 1) throw UsageError("--jobs must be >= 1");
  try {
    args.config.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const ClassifierSpec spec = parse_classifier_spec(args.classifier);

  const Dataset train = load_dataset(args.train_path);
  const Dataset test = load_dataset(args.test_path);
  if (train.length() != test.length()) {
    throw DataError("train series length " + std::to_string(train.length()) +
                    " != test series length " + std::to_string(test.length()));
  }
  const auto classifier = make_classifier(spec, &train, train.class_count(), train.length());

  std::vector<std::size_t> ids;
  if (args.has_instances) {
    ids = parse_index_list(args.instances_text);
    for (std::size_t id : ids) {
      if (id >= test.size()) {
        throw UsageError("--instances: index " + std::to_string(id) + " out of range (test has " +
                         std::to_string(test.size()) + " rows)");
      }
    }
  } else {
    ids.resize(test.size());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  }
  if (ids.empty()) throw UsageError("no instances selected");

  const fs::path out_dir(args.output);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError(out_dir.string() + ": " + ec.message());

  RunManifest manifest;
  manifest.engine_version = kEngineVersion;
  manifest.created_utc = iso_utc_now();
  manifest.train_path = fs::absolute(args.train_path).string();
  manifest.test_path = fs::absolute(args.test_path).string();
  manifest.classifier_spec = args.classifier;
  manifest.output_dir = fs::absolute(out_dir).string();
  manifest.instances = ids;
  manifest.config = args.config;
  write_text(out_dir / "manifest.json", manifest_to_json(manifest));

  // Each instance runs on its own derived seed, so any subset of instances
  // reproduces exactly what the full run produced for them.
  std::vector<InstanceRecord> records(ids.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t p = cursor.fetch_add(1);
      if (p >= ids.size()) return;
      const std::size_t id = ids[p];
      InstanceRecord& rec = records[p];
      rec.target_id = id;
      rec.true_label = test.original_label_value(test.label(id));
      try {
        RunConfig inst_cfg = args.config;
        inst_cfg.seed = derive_seed(args.config.seed, id);
        const ExplainResult res = run_explain(test.series(id), *classifier, train, inst_cfg);
        rec.predicted_label = res.target_label;
        rec.degenerate_references = res.degenerate_references;
        rec.reference_pool_indices = res.reference_pool_indices;
        rec.reference_distances = res.reference_distances;
        rec.front = res.front;
      } catch (const std::exception& e) {
        rec.error = e.what();
        rec.front.clear();
      }
      try {
        atomic_write_file(out_dir / ("instance_" + std::to_string(id) + ".json"),
                          instance_to_json(rec));
      } catch (const std::exception& e) {
        rec.error = std::string("output write failed: ") + e.what();
        rec.front.clear();
      }
    }
  };
  const std::size_t thread_count = std::min(args.jobs, ids.size());
  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    threads.reserve(thread_count);
    for (std::size_t i = 0; i < thread_count; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }

  write_text(out_dir / "fronts.csv", fronts_to_csv(records));

  std::size_t failed = 0;
  for (const auto& rec : records) {
    if (!rec.error.empty()) ++failed;
  }
  std::cout << "explained " << (records.size() - failed) << "/" << records.size()
            << " instances (" << failed << " failed)\n";
  for (const auto& rec : records) {
    if (!rec.error.empty()) {
      std::cerr << "instance " << rec.target_id << ": " << rec.error << "\n";
    }
  }
  std::cout << "wrote " << (out_dir / "manifest.json").string() << ", " << records.size()
            << " instance files, " << (out_dir / "fronts.csv").string() << "\n";
  return failed == records.size() ? kExitAllFailed : kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
  std::string run_dir;
  std::string data_path;
  std::string counterfactuals_path;
  std::string train_path;
  std::string classifier;
  std::string output;
  bool has_classifier = false;
};

struct Scored {
  std::vector<TimeSeries> targets;
  std::vector<std::vector<TimeSeries>> candidates;
  std::vector<std::size_t> target_ids;
};

int write_report(const MetricReport& report, const fs::path& out_dir) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw DataError(out_dir.string() + ": " + ec.message());
  std::ostringstream csv;
  write_metrics_csv(report, csv);
  write_text(out_dir / "metrics.csv", csv.str());
  const std::string summary = metrics_summary_json(report);
  write_text(out_dir / "summary.json", summary);
  std::cout << summary;
  return kExitOk;
}

int evaluate_run_dir(const EvaluateArgs& args) {
  const fs::path dir(args.run_dir);
  RunManifest manifest;
  try {
    manifest = manifest_from_json(read_file(dir / "manifest.json"));
  } catch (const std::exception& e) {
    throw DataError((dir / "manifest.json").string() + ": " + e.what());
  }

  std::vector<InstanceRecord> records;
  std::vector<std::string> offenders;
  for (std::size_t id : manifest.instances) {
    const fs::path path = dir / ("instance_" + std::to_string(id) + ".json");
    try {
      records.push_back(instance_from_json(read_file(path)));
    } catch (const std::exception& e) {
      offenders.push_back(path.string() + ": " + e.what());
    }
  }
  if (!offenders.empty()) {
    std::string msg = "unreadable result files:";
    for (const auto& o : offenders) msg += "\n  " + o;
    throw DataError(msg);
  }

  const Dataset test = load_dataset(manifest.test_path);
  const ClassifierSpec spec =
      parse_classifier_spec(args.has_classifier ? args.classifier : manifest.classifier_spec);
  std::unique_ptr<Dataset> train;
  if (!spec.external) {
    const std::string train_path =
        args.train_path.empty() ? manifest.train_path : args.train_path;
    train = std::make_unique<Dataset>(load_dataset(train_path));
  }
  const auto classifier =
      make_classifier(spec, train.get(), test.class_count(), test.length());

  Scored scored;
  for (const auto& rec : records) {
    if (!rec.error.empty() || rec.front.empty()) continue;
    if (rec.target_id >= test.size()) {
      throw DataError("instance " + std::to_string(rec.target_id) +
                      ": target index out of range for " + manifest.test_path);
    }
    scored.targets.push_back(test.series(rec.target_id));
    std::vector<TimeSeries> group;
    group.reserve(rec.front.size());
    for (const auto& cand : rec.front) {
      if (cand.series.size() != test.length()) {
        throw DataError("instance " + std::to_string(rec.target_id) +
                        ": candidate length mismatch");
      }
      group.push_back(cand.series);
    }
    scored.candidates.push_back(std::move(group));
    scored.target_ids.push_back(rec.target_id);
  }
  if (scored.targets.empty()) {
    throw DataError("no successful instances to evaluate in " + dir.string());
  }

  const MetricReport report =
      evaluate_run(scored.targets, scored.candidates, *classifier, scored.target_ids);
  const fs::path out_dir = args.output.empty() ? dir : fs::path(args.output);
  return write_report(report, out_dir);
}

int evaluate_external(const EvaluateArgs& args) {
  if (!args.has_classifier) {
    throw UsageError("--classifier is required when evaluating an external counterfactual file");
  }
  const Dataset data = load_dataset(args.data_path);
  const ClassifierSpec spec = parse_classifier_spec(args.classifier);
  std::unique_ptr<Dataset> train;
  if (!spec.external) {
    if (args.train_path.empty()) {
      throw UsageError("a knn classifier needs --train alongside --counterfactuals");
    }
    train = std::make_unique<Dataset>(load_dataset(args.train_path));
  }
  const auto classifier = make_classifier(spec, train.get(), data.class_count(), data.length());

  std::string text;
  try {
    text = read_file(args.counterfactuals_path);
  } catch (const std::exception& e) {
    throw DataError(e.what());
  }

  Scored scored;
  std::vector<std::size_t> slot_of_target(data.size(), SIZE_MAX);
  std::istringstream lines(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const std::string where = args.counterfactuals_path + ":" + std::to_string(line_no);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (fields.size() != data.length() + 1) {
      throw DataError(where + ": expected index + " + std::to_string(data.length()) +
                      " values, got " + std::to_string(fields.size()) + " fields");
    }
    std::size_t target_id = 0;
    try {
      target_id = static_cast<std::size_t>(parse_u64(fields[0], "target index"));
    } catch (const UsageError& e) {
      throw DataError(where + ": " + e.what());
    }
    if (target_id >= data.size()) {
      throw DataError(where + ": target index " + std::to_string(target_id) +
                      " out of range (dataset has " + std::to_string(data.size()) + " rows)");
    }
    std::vector<double> values(data.length());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const std::string& f = fields[i + 1];
      const auto* end = f.data() + f.size();
      const auto [ptr, ec] = std::from_chars(f.data(), end, values[i]);
      if (ec != std::errc{} || ptr != end) {
        throw DataError(where + ": bad value \"" + f + "\"");
      }
    }
    if (slot_of_target[target_id] == SIZE_MAX) {
      slot_of_target[target_id] = scored.targets.size();
      scored.targets.push_back(data.series(target_id));
      scored.candidates.emplace_back();
      scored.target_ids.push_back(target_id);
    }
    scored.candidates[slot_of_target[target_id]].push_back(TimeSeries(std::move(values)));
  }
  if (scored.targets.empty()) {
    throw DataError(args.counterfactuals_path + ": no counterfactual rows");
  }

  const MetricReport report =
      evaluate_run(scored.targets, scored.candidates, *classifier, scored.target_ids);
  const fs::path out_dir = args.output.empty() ? fs::path(".") : fs::path(args.output);
  return write_report(report, out_dir);
}

}  // namespace

int run(const std::vector<std::string>& args) {
  CLI::App app{"Pareto-front counterfactual explanations for time-series classifiers"};
  app.set_version_flag("--version", std::string(kEngineVersion));
  app.require_subcommand(1);

  GenDataArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-data", "Generate a synthetic labelled dataset");
  gen_cmd->add_option("generator", gen.generator, "Generator name (cbf)")->required();
  gen_cmd->add_option("--train", gen.train_per_class, "Training rows per class")->required();
  gen_cmd->add_option("--test", gen.test_per_class, "Test rows per class")->required();
  gen_cmd->add_option("--length", gen.length, "Series length")->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed, "Master seed")->capture_default_str();
  gen_cmd->add_option("-o,--output", gen.output, "Output directory")->required();

  ExplainArgs ex;
  auto* ex_cmd = app.add_subcommand("explain", "Explain test instances against a classifier");
  ex_cmd->add_option("--train", ex.train_path, "Training/reference-pool UCR file");
  ex_cmd->add_option("--test", ex.test_path, "Test UCR file with the instances to explain");
  auto* o_clf = ex_cmd->add_option("--classifier", ex.classifier,
                                   "knn[:k=..,temp=..] or ext:<command>")
                    ->capture_default_str();
  ex_cmd->add_option("-o,--output", ex.output, "Output directory for the run");
  ex_cmd->add_option("--config", ex.config_path, "JSON config file (flags override it)");
  auto* o_inst = ex_cmd->add_option("--instances", ex.instances_text,
                                    "Comma-separated test indices (default: all)");
  auto* o_jobs =
      ex_cmd->add_option("--jobs", ex.jobs, "Concurrent instances")->capture_default_str();
  auto* o_seed =
      ex_cmd->add_option("--seed", ex.config.seed, "Master seed")->capture_default_str();
  auto* o_pop = ex_cmd->add_option("--pop-size", ex.config.pop_size, "Population size")
                    ->capture_default_str();
  auto* o_gens = ex_cmd->add_option("--generations", ex.config.generations, "Generations")
                     ->capture_default_str();
  auto* o_pcx = ex_cmd->add_option("--p-crossover", ex.config.p_crossover,
                                    "Crossover probability")
                    ->capture_default_str();
  auto* o_pmu = ex_cmd->add_option("--p-mutation", ex.config.p_mutation,
                                    "Mutation probability")
                    ->capture_default_str();
  auto* o_refs = ex_cmd->add_option("--references", ex.config.references,
                                     "Reference set size")
                     ->capture_default_str();
  auto* o_tau = ex_cmd->add_option("--tau", ex.config.tau, "Tolerable window length ratio")
                    ->capture_default_str();
  auto* o_ar = ex_cmd->add_option("--ar-order", ex.config.ar_order, "Smoothing model order")
                   ->capture_default_str();

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Score counterfactuals against a classifier");
  ev_cmd->add_option("--run", ev.run_dir, "Output directory of a previous explain run");
  ev_cmd->add_option("--data", ev.data_path, "UCR file the target indices refer to");
  ev_cmd->add_option("--counterfactuals", ev.counterfactuals_path,
                     "External counterfactual file (index<TAB>values...)");
  ev_cmd->add_option("--train", ev.train_path, "Training UCR file for fitting a knn classifier");
  auto* o_ev_clf = ev_cmd->add_option("--classifier", ev.classifier,
                                      "Override the classifier spec from the manifest");
  ev_cmd->add_option("-o,--output", ev.output, "Directory for metrics.csv / summary.json");

  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("tscf");
  for (const auto& a : args) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen_data(gen);
    if (ex_cmd->parsed()) {
      ex.has_classifier = o_clf->count() > 0;
      ex.has_instances = o_inst->count() > 0;
      ex.has_jobs = o_jobs->count() > 0;
      ex.has_seed = o_seed->count() > 0;
      ex.has_pop = o_pop->count() > 0;
      ex.has_gens = o_gens->count() > 0;
      ex.has_pcx = o_pcx->count() > 0;
      ex.has_pmu = o_pmu->count() > 0;
      ex.has_refs = o_refs->count() > 0;
      ex.has_tau = o_tau->count() > 0;
      ex.has_ar = o_ar->count() > 0;
      return cmd_explain(std::move(ex));
    }
    if (ev_cmd->parsed()) {
      ev.has_classifier = o_ev_clf->count() > 0;
      const bool run_mode = !ev.run_dir.empty();
      const bool ext_mode = !ev.data_path.empty() || !ev.counterfactuals_path.empty();
      if (run_mode == ext_mode) {
        throw UsageError("evaluate needs either --run <dir> or --data + --counterfactuals");
      }
      if (ext_mode && (ev.data_path.empty() || ev.counterfactuals_path.empty())) {
        throw UsageError("evaluate needs both --data and --counterfactuals");
      }
      return run_mode ? evaluate_run_dir(ev) : evaluate_external(ev);
    }
    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace tscf::cli

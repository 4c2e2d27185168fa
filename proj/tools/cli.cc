/*
 * Copyright 2026 The epibias Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.h"

#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "epibias/archive.h"
#include "epibias/biased_data.h"
#include "epibias/config.h"
#include "epibias/dataset_io.h"
#include "epibias/errors.h"
#include "epibias/hashing.h"
#include "epibias/posterior_bank.h"
#include "epibias/trainer.h"
#include "json.hpp"

#ifndef EPIBIAS_VERSION
#define EPIBIAS_VERSION "unknown"
#endif

namespace epibias::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

constexpr std::string_view kPredictionHeader =
    "true_class,predicted_class,attribute,subgroup";

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  bool quiet = false;
};

struct GenOptions {
  std::string spec;
  std::string plan = "sensitive";
  std::string ratio = "5:1";
};

struct TrainOptions {
  std::string config;
  bool tables = false;
};

struct EvalOptions {
  std::string model;
  std::string test_colour;
  std::string test_gray;
  std::string predictions;
};

struct SweepOptions {
  std::string config;
  std::string grid = "0,0.5,1,2,4,8,16";
  int jobs = 1;
};

// Discards everything written to it.
class NullBuffer : public std::streambuf {
 protected:
  int overflow(int c) override { return traits_type::not_eof(c); }
};

class Console {
 public:
  Console(std::ostream& out, bool quiet)
      : null_stream_(&null_), out_(quiet ? null_stream_ : out) {}
  std::ostream& info() { return out_; }

 private:
  NullBuffer null_;
  std::ostream null_stream_;
  std::ostream& out_;
};

fs::path PrepareOutDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  return fs::path(dir);
}

std::string Lower(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'F') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

// Reads a dataset file, records its digest under `role` and checks any
// pinned digest before parsing.
std::string ReadPinned(const RunConfig& config, const std::string& role,
                       const std::string& path, Json& hashes) {
  if (path.empty()) {
    throw ConfigError("config does not name a '" + role + "' dataset");
  }
  std::string bytes = ReadFileBytes(path);
  const std::string digest = Sha256Hex(bytes);
  hashes[role] = Json{{"path", path}, {"sha256", digest}};
  const auto pin = config.pinned_sha256.find(role);
  if (pin != config.pinned_sha256.end() && Lower(pin->second) != digest) {
    throw SchemaError(role + " dataset " + path + " has sha256 " + digest +
                      " but the config pins " + pin->second);
  }
  return bytes;
}

Dataset LoadPinned(const RunConfig& config, const std::string& role,
                   const std::string& path, Json& hashes) {
  try {
    return ParseDatasetCsv(ReadPinned(config, role, path, hashes));
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

class HistoryWriter {
 public:
  explicit HistoryWriter(const fs::path& path)
      : path_(path), file_(path, std::ios::binary | std::ios::trunc) {
    if (!file_) throw IoError("cannot open " + path.string() + " for writing");
    file_ << "epoch,cycle,phase,mean_loss,mean_weight,lr\n";
    Flush();
  }

  void Append(const EpochRecord& r) {
    file_ << r.epoch << ',' << r.cycle << ',' << PhaseName(r.phase) << ','
          << FormatDouble(r.mean_loss) << ',' << FormatDouble(r.mean_weight)
          << ',' << FormatDouble(r.lr) << '\n';
    Flush();
  }

 private:
  void Flush() {
    file_.flush();
    if (!file_) throw IoError("write to " + path_.string() + " failed");
  }

  fs::path path_;
  std::ofstream file_;
};

std::string DecileCsv(const TrainedEnsemble& ensemble) {
  const UncertaintyTable& table = *ensemble.table;
  if (ensemble.train_attributes.size() != table.num_samples()) {
    throw SchemaError("archive attribute list does not match its table");
  }
  Dataset shape;
  shape.num_classes = table.num_classes;
  std::vector<bool> transformed;
  for (std::size_t i = 0; i < table.num_samples(); ++i) {
    Sample s;
    s.label = table.true_class[i];
    s.attribute = ensemble.train_attributes[i];
    transformed.push_back(s.attribute == 1);
    shape.samples.push_back(std::move(s));
  }
  const std::vector<bool> conflicting = BiasConflicting(shape);

  std::ostringstream csv;
  csv << "group,top_rate,bottom_rate,base_rate,bucket_size\n";
  auto row = [&](std::string_view name, const std::vector<bool>& flags) {
    const DecileComposition d =
        UncertaintyDecileComposition(table.sigma_true, flags, 0.1);
    csv << name << ',' << FormatDouble(d.top_rate) << ','
        << FormatDouble(d.bottom_rate) << ',' << FormatDouble(d.base_rate)
        << ',' << d.bucket_size << '\n';
  };
  row("transformed", transformed);
  row("bias_conflicting", conflicting);
  return csv.str();
}

void CheckTestSet(const Dataset& data, const ModelSpec& spec,
                  const std::string& path) {
  if (data.samples.empty()) throw SchemaError(path + ": test set is empty");
  if (data.num_features() != spec.input_dim()) {
    throw SchemaError(path + ": " + std::to_string(data.num_features()) +
                      " features but the model expects " +
                      std::to_string(spec.input_dim()));
  }
  if (data.num_classes != spec.num_classes()) {
    throw SchemaError(path + ": " + std::to_string(data.num_classes) +
                      " classes but the model predicts " +
                      std::to_string(spec.num_classes()));
  }
}

int CmdGen(const GlobalOptions& g, const GenOptions& o, Console& console,
           std::ostream& err) {
  SyntheticSpec spec = LoadSyntheticSpec(o.spec);
  if (g.seed) spec.seed = *g.seed;
  spec.Validate();
  const SkewPlan plan = ParseSkewScheme(o.plan) == SkewScheme::kSensitive
                            ? SkewPlan::Sensitive(spec.n_classes)
                            : SkewPlan::Minority();
  const GeneratedData data =
      GeneratePipeline(spec, plan, ParseSplitRatio(o.ratio));

  const fs::path dir = PrepareOutDir(g.out_dir);
  WriteDataset(dir / "train.csv", data.train);
  WriteDataset(dir / "val.csv", data.validation);
  WriteDataset(dir / "test_colour.csv", data.test_colour);
  WriteDataset(dir / "test_gray.csv", data.test_gray);
  for (const std::string& w : data.warnings) err << "warning: " << w << '\n';

  std::ostream& out = console.info();
  out << "class,samples,transformed\n";
  for (int c = 0; c < spec.n_classes; ++c) {
    out << c << ',' << spec.samples_per_class << ','
        << data.transformed_per_class[c] << '\n';
  }
  return kExitOk;
}

int CmdTrain(const GlobalOptions& g, const TrainOptions& o, Console& console,
             std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  RunConfig config = LoadRunConfig(o.config);
  if (g.seed) config.seed = *g.seed;
  config.Validate();
  const fs::path dir = PrepareOutDir(g.out_dir);

  Json manifest;
  manifest["tool"] = "epibias";
  manifest["version"] = EPIBIAS_VERSION;
  manifest["command"] = "train";
  manifest["config"] = Json::parse(RunConfigJson(config));
  manifest["datasets"] = Json::object();

  int status = kExitOk;
  try {
    Json& hashes = manifest["datasets"];
    const Dataset train = LoadPinned(config, "train", config.train_path, hashes);
    const std::pair<const char*, const std::string*> others[] = {
        {"val", &config.val_path},
        {"test_colour", &config.test_colour_path},
        {"test_gray", &config.test_gray_path}};
    for (const auto& [role, path] : others) {
      if (!path->empty()) ReadPinned(config, role, *path, hashes);
    }

    HistoryWriter history(dir / "history.csv");
    TrainHooks hooks;
    hooks.on_epoch = [&](const EpochRecord& r) { history.Append(r); };
    const TrainedEnsemble ensemble = Train(config, train, hooks);
    WriteArchive(dir / "model.epb", ensemble);
    if (o.tables && ensemble.table) {
      WriteFileAtomic(dir / "uncertainty.csv",
                      UncertaintyTableCsv(*ensemble.table));
    }
    console.info() << "mode " << TrainModeName(config.mode) << ": "
                   << ensemble.history.size() << " epochs, "
                   << ensemble.draws.size() << " draws -> "
                   << (dir / "model.epb").string() << '\n';
  } catch (const Error& e) {
    status = ExitCodeFor(e);
    manifest["error"] = e.what();
    err << "error: " << e.what() << '\n';
  }

  const std::chrono::duration<double> elapsed =
      std::chrono::steady_clock::now() - start;
  manifest["wall_clock_seconds"] = elapsed.count();
  manifest["exit_status"] = status;
  WriteFileAtomic(dir / "manifest.json", manifest.dump(2) + "\n");
  return status;
}

int CmdEval(const GlobalOptions& g, const EvalOptions& o, Console& console) {
  const fs::path dir = PrepareOutDir(g.out_dir);
  std::vector<EvalRecord> records;
  int num_classes = 0;
  std::string decile;
  if (!o.predictions.empty()) {
    records = ParsePredictionLog(ReadFileBytes(o.predictions));
  } else {
    if (o.model.empty() || o.test_colour.empty() || o.test_gray.empty()) {
      throw ConfigError(
          "eval needs --model, --test-colour and --test-gray, or --predictions");
    }
    const TrainedEnsemble ensemble = ReadArchive(o.model);
    const Dataset colour = ReadDataset(o.test_colour);
    const Dataset gray = ReadDataset(o.test_gray);
    CheckTestSet(colour, ensemble.spec, o.test_colour);
    CheckTestSet(gray, ensemble.spec, o.test_gray);
    TestSetEvaluation eval = EvaluateOnTestSets(ensemble, colour, gray);
    records = std::move(eval.records);
    num_classes = ensemble.spec.num_classes();
    WriteFileAtomic(dir / "predictions.csv", PredictionLogCsv(records));
    if (ensemble.table) {
      decile = DecileCsv(ensemble);
      WriteFileAtomic(dir / "decile.csv", decile);
    }
  }

  const FairnessReport report = BuildFairnessReport(records, num_classes);
  const std::string json = FairnessReportJson(report);
  WriteFileAtomic(dir / "report.json", json + "\n");
  std::ostream& out = console.info();
  out << json << '\n';
  if (!decile.empty()) out << decile;
  return kExitOk;
}

int CmdSweep(const GlobalOptions& g, const SweepOptions& o, Console& console,
             std::ostream& err) {
  RunConfig config = LoadRunConfig(o.config);
  if (g.seed) config.seed = *g.seed;
  config.mode = TrainMode::kBayesWeighted;
  config.Validate();
  const std::vector<double> grid = ParseRealList(o.grid);
  if (o.jobs < 1) throw ConfigError("--jobs must be >= 1");

  Json hashes;
  const Dataset train = LoadPinned(config, "train", config.train_path, hashes);
  const Dataset val = LoadPinned(config, "val", config.val_path, hashes);
  const Dataset colour =
      LoadPinned(config, "test_colour", config.test_colour_path, hashes);
  const Dataset gray =
      LoadPinned(config, "test_gray", config.test_gray_path, hashes);
  const fs::path dir = PrepareOutDir(g.out_dir);

  const SweepResult result =
      SweepKappa(config, grid, train, val, colour, gray, o.jobs);

  std::ostringstream csv;
  csv << "kappa,val_loss,mean_accuracy,bias_amplification,opportunity_gap,"
         "average_odds,tpr_gap,overall_tpr,status\n";
  bool any_ok = false;
  double best_loss = 0.0;
  for (const SweepEntry& e : result.entries) {
    csv << FormatDouble(e.kappa) << ',';
    if (e.error) {
      csv << ",,,,,,,failed\n";
      err << "error: kappa " << FormatDouble(e.kappa) << ": " << *e.error
          << '\n';
      continue;
    }
    const FairnessReport& r = e.report;
    csv << FormatDouble(e.val_loss) << ',' << FormatDouble(r.mean_accuracy)
        << ',' << FormatDouble(r.bias_amplification) << ','
        << FormatDouble(r.opportunity_gap) << ','
        << FormatDouble(r.average_odds) << ',' << FormatDouble(r.tpr_gap)
        << ',' << FormatDouble(e.overall_tpr) << ",ok\n";
    if (e.kappa == result.best_kappa) best_loss = e.val_loss;
    any_ok = true;
  }
  WriteFileAtomic(dir / "sweep.csv", csv.str());

  if (any_ok) {
    console.info() << "best kappa " << FormatDouble(result.best_kappa)
                   << " (validation loss " << FormatDouble(best_loss) << ")\n";
  } else {
    err << "error: no kappa in the grid completed\n";
  }
  return result.complete ? kExitOk : kExitTraining;
}

int ParseField(std::string_view field, std::size_t line, const char* name) {
  int value = 0;
  const auto [ptr, ec] =
      std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc() ||
      ptr != field.data() + field.size()) {
    throw SchemaError("prediction log line " + std::to_string(line) +
                      ": invalid " + name + " '" + std::string(field) + "'");
  }
  return value;
}

}  // namespace

int ExitCodeFor(const std::exception& e) {
  if (dynamic_cast<const IoError*>(&e) ||
      dynamic_cast<const fs::filesystem_error*>(&e)) {
    return kExitIo;
  }
  if (dynamic_cast<const ConfigError*>(&e) ||
      dynamic_cast<const UsageError*>(&e)) {
    return kExitConfig;
  }
  if (dynamic_cast<const TrainingError*>(&e)) return kExitTraining;
  if (dynamic_cast<const SchemaError*>(&e)) return kExitSchema;
  return kExitFailure;
}

std::string PredictionLogCsv(const std::vector<EvalRecord>& records) {
  std::ostringstream csv;
  csv << kPredictionHeader << '\n';
  for (const EvalRecord& r : records) {
    csv << r.true_class << ',' << r.predicted_class << ',' << r.attribute
        << ',';
    if (r.subgroup) csv << *r.subgroup;
    csv << '\n';
  }
  return csv.str();
}

std::vector<EvalRecord> ParsePredictionLog(std::string_view text) {
  std::vector<EvalRecord> records;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1) {
      if (line != kPredictionHeader) {
        throw SchemaError("prediction log line 1: expected header '" +
                          std::string(kPredictionHeader) + "'");
      }
      continue;
    }
    if (line.empty()) continue;

    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = line.find(',', start);
      fields.push_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 4) {
      throw SchemaError("prediction log line " + std::to_string(line_no) +
                        ": expected 4 fields, got " +
                        std::to_string(fields.size()));
    }
    EvalRecord r;
    r.true_class = ParseField(fields[0], line_no, "true_class");
    r.predicted_class = ParseField(fields[1], line_no, "predicted_class");
    r.attribute = ParseField(fields[2], line_no, "attribute");
    if (!fields[3].empty()) r.subgroup = ParseField(fields[3], line_no, "subgroup");
    if (r.true_class < 0 || r.predicted_class < 0 ||
        (r.attribute != 0 && r.attribute != 1) ||
        (r.subgroup && *r.subgroup < 0)) {
      throw SchemaError("prediction log line " + std::to_string(line_no) +
                        ": value out of range");
    }
    records.push_back(r);
  }
  if (line_no == 0) throw SchemaError("prediction log is empty");
  return records;
}

int RunCli(const std::vector<std::string>& args, std::ostream& out,
           std::ostream& err) {
  CLI::App app{
      "Uncertainty-weighted SG-MCMC training and fairness audits on "
      "synthetic skewed data",
      "epibias"};
  app.set_version_flag("--version", std::string(EPIBIAS_VERSION));
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt =
      app.add_option("--seed", seed, "Override the master seed");
  app.add_option("--out-dir", g.out_dir, "Directory for output files")
      ->capture_default_str();
  app.add_flag("--quiet", g.quiet, "Suppress informational output");

  GenOptions gen_opts;
  CLI::App* gen = app.add_subcommand("gen", "Generate skewed datasets");
  gen->add_option("--spec", gen_opts.spec, "Synthetic spec file")->required();
  gen->add_option("--plan", gen_opts.plan, "Skew scheme")
      ->check(CLI::IsMember({"sensitive", "minority"}))
      ->capture_default_str();
  gen->add_option("--ratio", gen_opts.ratio, "Train:validation ratio")
      ->capture_default_str();

  TrainOptions train_opts;
  CLI::App* train = app.add_subcommand("train", "Train one model");
  train->add_option("--config", train_opts.config, "Run config file")
      ->required();
  train->add_flag("--tables", train_opts.tables,
                  "Also write the final uncertainty table as CSV");

  EvalOptions eval_opts;
  CLI::App* eval = app.add_subcommand("eval", "Fairness report for a model");
  CLI::Option* model_opt =
      eval->add_option("--model", eval_opts.model, "Model archive");
  eval->add_option("--test-colour", eval_opts.test_colour,
                   "Untransformed test set");
  eval->add_option("--test-gray", eval_opts.test_gray, "Transformed test set");
  eval->add_option("--predictions", eval_opts.predictions,
                   "Prediction log to audit instead of a model")
      ->excludes(model_opt);

  SweepOptions sweep_opts;
  CLI::App* sweep = app.add_subcommand("sweep", "Grid search over kappa");
  sweep->add_option("--config", sweep_opts.config, "Run config file")
      ->required();
  sweep->add_option("--grid", sweep_opts.grid, "Comma-separated kappa values")
      ->capture_default_str();
  sweep->add_option("--jobs", sweep_opts.jobs, "Parallel runs")
      ->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\nrun with --help for usage\n";
    return kExitConfig;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  Console console(out, g.quiet);
  try {
    if (*gen) return CmdGen(g, gen_opts, console, err);
    if (*train) return CmdTrain(g, train_opts, console, err);
    if (*eval) return CmdEval(g, eval_opts, console);
    if (*sweep) return CmdSweep(g, sweep_opts, console, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return ExitCodeFor(e);
  }
  return kExitFailure;
}

}  // namespace epibias::cli

#include "hdpd/interface/cli.h"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hdpd/cohort/csv_io.h"
#include "hdpd/cohort/disease_rules.h"
#include "hdpd/cohort/synthetic.h"
#include "hdpd/common/error.h"
#include "hdpd/common/json_file.h"
#include "hdpd/common/logging.h"
#include "hdpd/diagram/diagram_io.h"
#include "hdpd/diagram/ward.h"
#include "hdpd/interface/pipeline.h"
#include "hdpd/interface/plot.h"
#include "hdpd/interface/service.h"
#include "hdpd/interface/workspace.h"

namespace hdpd::interface {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Bad flag combination detected after parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

const std::vector<std::string> kModes = {"pmice", "2d-ice"};
const std::vector<std::string> kWeights = {"exponential", "inverse", "uniform"};
const std::vector<std::string> kPools = {"perturbed", "original"};

struct GenSyntheticArgs {
  int participants = 2000;
  int years = 6;
  std::uint64_t seed = 1;
  std::string config;
};

struct IngestArgs {
  std::string cohort;
  std::string schema;
};

struct LabelArgs {
  std::string disease;
  std::string rule;
};

struct TrainArgs {
  std::string disease;
  TrainOptions options;
  std::string weights = "exponential";
  std::string pool = "perturbed";
};

struct TuneKArgs {
  std::string disease;
  std::vector<int> grid;
  std::size_t max_records = 0;
};

struct DiagramArgs {
  std::string record;
  std::string disease;
  std::string x;
  std::string y;
  std::string mode = "pmice";
  bool active = false;
  std::size_t budget = 50;
};

struct BatchArgs {
  std::string disease;
  std::string mode = "pmice";
  std::vector<std::string> records;
  std::size_t limit = 0;
};

struct EvaluateArgs {
  std::vector<std::string> diseases;
  std::string mode = "pmice";
  bool no_tune = false;
  std::size_t max_tuning = 0;
  std::vector<int> grid;
};

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::size_t budget = 50;
};

struct PlotArgs {
  std::vector<std::string> diagrams;
  std::string contribution;
  bool superimpose = false;
};

void WriteArtifact(Workspace& ws, const std::string& relative, std::string_view text,
                   const std::string& kind, std::uint64_t seed, const std::string& hash) {
  WriteTextFile(ws.Resolve(relative), text);
  ws.Register(relative, kind, seed, hash);
}

cohort::DiseaseRule RuleFor(Workspace& ws, const std::string& disease) {
  const std::string path = Workspace::RulePath(disease);
  if (fs::exists(ws.Resolve(path))) return ws.LoadRule(disease);
  auto rule = cohort::BuiltinRule(disease);
  const auto j = cohort::RuleToJson(rule);
  WriteArtifact(ws, path, j.dump(1), "rule", 0, ConfigHash(j));
  return rule;
}

struct Loaded {
  cohort::Cohort cohort;
  std::unique_ptr<DiseaseSession> session;
};

// The session keeps a reference to the cohort, so both live on the heap.
std::unique_ptr<Loaded> LoadSession(const Workspace& ws, const std::string& disease) {
  auto loaded = std::make_unique<Loaded>();
  loaded->cohort = ws.LoadCohort();
  auto model = ws.LoadModel(disease);
  auto rule = ws.LoadRule(disease);
  loaded->session = std::make_unique<DiseaseSession>(loaded->cohort, std::move(rule), std::move(model));
  return loaded;
}

void SaveModel(Workspace& ws, const DiseaseModel& model, const TrainOptions* options) {
  const auto j = model.ToJson();
  const std::string hash = ConfigHash(options ? options->ToJson() : j);
  WriteArtifact(ws, Workspace::ModelPath(model.disease), j.dump(1), "model", model.seed, hash);
}

std::vector<int> GridOrDefault(const std::vector<int>& grid) {
  if (grid.empty()) return eval::DefaultKGrid();
  for (const int k : grid) {
    if (k < 1) throw UsageError("k grid values must be positive");
  }
  return grid;
}

eval::ProgressFn LogProgress(const std::string& what) {
  return [what](std::size_t done, std::size_t total) {
    if (done == total || done % 10 == 0) Log().info("{}: {}/{}", what, done, total);
  };
}

int GenSynthetic(const fs::path& root, const GenSyntheticArgs& a, std::ostream& out,
                 const CLI::App& cmd) {
  auto config = cohort::DefaultSyntheticConfig();
  if (!a.config.empty()) config = cohort::SyntheticConfigFromJson(ReadJsonFile(a.config));
  // Flags override the config file only when given explicitly.
  if (a.config.empty() || cmd.count("--participants") > 0) config.n_participants = a.participants;
  if (a.config.empty() || cmd.count("--years") > 0) config.n_years = a.years;
  if (a.config.empty() || cmd.count("--seed") > 0) config.seed = a.seed;
  const auto syn = cohort::GenerateSynthetic(config);
  const auto config_json = cohort::SyntheticConfigToJson(config);
  const std::string hash = ConfigHash(config_json);

  auto ws = Workspace::Create(root);
  std::ostringstream csv;
  cohort::WriteCohortCsv(csv, syn.cohort);
  WriteArtifact(ws, "cohort.csv", csv.str(), "cohort", config.seed, hash);
  WriteArtifact(ws, "schema.json", cohort::SchemaToJson(syn.cohort.schema()).dump(1), "schema",
                config.seed, hash);
  for (const auto& rule : syn.rules) {
    WriteArtifact(ws, Workspace::RulePath(rule.disease), cohort::RuleToJson(rule).dump(1), "rule",
                  config.seed, hash);
  }
  const json truth = {{"config", config_json},
                      {"intervened", std::vector<std::string>(syn.intervened.begin(), syn.intervened.end())}};
  WriteArtifact(ws, "synthetic/truth.json", truth.dump(1), "synthetic-truth", config.seed, hash);
  out << "generated " << syn.cohort.size() << " records of " << config.n_participants
      << " participants (" << syn.intervened.size() << " with intervention) in " << root.string()
      << "\n";
  return kExitOk;
}

int Ingest(const fs::path& root, const IngestArgs& a, std::ostream& out) {
  const auto schema = cohort::LoadSchema(a.schema);
  const auto cohort = cohort::LoadCohortCsv(a.cohort, schema);
  auto ws = Workspace::Create(root);
  const auto schema_json = cohort::SchemaToJson(schema);
  const std::string hash = ConfigHash(schema_json);
  std::ostringstream csv;
  cohort::WriteCohortCsv(csv, cohort);
  WriteArtifact(ws, "cohort.csv", csv.str(), "cohort", 0, hash);
  WriteArtifact(ws, "schema.json", schema_json.dump(1), "schema", 0, hash);
  out << "ingested " << cohort.size() << " records, " << cohort.Participants().size()
      << " participants, " << schema.features.size() << " features\n";
  return kExitOk;
}

int Label(const fs::path& root, const LabelArgs& a, std::ostream& out) {
  auto ws = Workspace::Open(root);
  cohort::DiseaseRule rule;
  if (!a.rule.empty()) {
    rule = cohort::LoadRule(a.rule);
    if (rule.disease != a.disease) {
      throw UsageError("rule file is for '" + rule.disease + "', not '" + a.disease + "'");
    }
    const auto j = cohort::RuleToJson(rule);
    WriteArtifact(ws, Workspace::RulePath(a.disease), j.dump(1), "rule", 0, ConfigHash(j));
  } else {
    rule = RuleFor(ws, a.disease);
  }
  const auto cohort = ws.LoadCohort();
  const auto labels = cohort::LabelDisease(cohort, rule);
  std::ostringstream csv;
  csv << "participant_id,year,label\n";
  std::size_t pos = 0, neg = 0, missing = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& r = cohort.records()[i];
    csv << r.participant_id << ',' << r.year << ',';
    if (labels[i]) {
      csv << *labels[i];
      (*labels[i] ? pos : neg)++;
    } else {
      ++missing;
    }
    csv << '\n';
  }
  WriteArtifact(ws, "labels/" + Workspace::SafeName(a.disease) + ".csv", csv.str(), "labels", 0,
                ConfigHash(cohort::RuleToJson(rule)));
  out << a.disease << ": " << pos << " positive, " << neg << " negative, " << missing
      << " unlabelled records\n";
  return kExitOk;
}

int Train(const fs::path& root, TrainArgs a, std::ostream& out) {
  auto ws = Workspace::Open(root);
  a.options.projection.weights = pmice::ParseWeightScheme(a.weights);
  a.options.projection.pool_label = pmice::ParsePoolLabel(a.pool);
  const auto rule = RuleFor(ws, a.disease);
  const auto cohort = ws.LoadCohort();
  const auto model = TrainDiseaseModel(cohort, rule, a.options);
  SaveModel(ws, model, &a.options);
  out << model.disease << ": " << model.model.features().size() << " features, threshold "
      << model.model.threshold;
  if (model.test_auc) out << ", test AUC " << *model.test_auc;
  out << "\n";
  return kExitOk;
}

int TuneK(const fs::path& root, const TuneKArgs& a, std::ostream& out) {
  auto ws = Workspace::Open(root);
  auto loaded = LoadSession(ws, a.disease);
  const auto grid = GridOrDefault(a.grid);
  const auto result = loaded->session->TuneK(grid, a.max_records);
  auto& model = loaded->session->mutable_model();
  model.projection.k = result.k;
  model.k_table = result.table;
  SaveModel(ws, model, nullptr);
  std::ostringstream tsv;
  tsv << "k\tmean\tsd\tscore\trecords\n";
  for (const auto& row : result.table) {
    tsv << row.k << '\t' << cohort::FormatDouble(row.mean) << '\t' << cohort::FormatDouble(row.sd)
        << '\t' << cohort::FormatDouble(row.score) << '\t' << row.records << '\n';
  }
  WriteArtifact(ws, "reports/" + Workspace::SafeName(a.disease) + "_tune_k.tsv", tsv.str(),
                "report", model.seed, ConfigHash(json(grid)));
  out << tsv.str() << "selected k = " << result.k << "\n";
  return kExitOk;
}

int MakeDiagram(const fs::path& root, const DiagramArgs& a, std::ostream& out) {
  auto ws = Workspace::Open(root);
  auto loaded = LoadSession(ws, a.disease);
  const auto& session = *loaded->session;
  const auto idx = loaded->cohort.FindRecord(a.record);
  if (!idx) throw NotFound("unknown record '" + a.record + "'");
  const auto fx = session.FeatureIndex(a.x);
  if (!fx) throw NotFound("unknown feature '" + a.x + "'");
  const auto fy = session.FeatureIndex(a.y);
  if (!fy) throw NotFound("unknown feature '" + a.y + "'");
  const auto mode = diagram::ParseDiagramMode(a.mode);
  const auto view = session.View(*idx);
  diagram::Diagram d;
  json config = {{"mode", a.mode}, {"active", a.active}};
  if (a.active) {
    diagram::ActiveLearningConfig al;
    al.budget = a.budget;
    al.initial_points = std::min(al.initial_points, al.budget);
    config["budget"] = a.budget;
    d = diagram::BuildDiagramActive(session.Context(), view, *fx, *fy, mode, al);
  } else {
    d = diagram::BuildDiagramFull(session.Context(), view, *fx, *fy, mode);
  }
  const std::string rel = Workspace::DiagramDir(a.disease) + "/" +
                          Workspace::SafeName(a.record + "_" + a.x + "_" + a.y + "_" + a.mode) +
                          ".json";
  WriteArtifact(ws, rel, diagram::DiagramToJson(d).dump(1), "diagram", session.model().seed,
                ConfigHash(config));
  out << rel << ": " << d.nx() << "x" << d.ny() << ", " << diagram::ToString(d.pattern) << "\n";
  return kExitOk;
}

int Batch(const fs::path& root, const BatchArgs& a, std::ostream& out) {
  auto ws = Workspace::Open(root);
  auto loaded = LoadSession(ws, a.disease);
  const auto& session = *loaded->session;
  const auto mode = diagram::ParseDiagramMode(a.mode);
  std::vector<std::size_t> records;
  if (a.records.empty()) {
    records = session.PredictedOnsetTest();
  } else {
    for (const auto& id : a.records) {
      const auto idx = loaded->cohort.FindRecord(id);
      if (!idx) throw NotFound("unknown record '" + id + "'");
      records.push_back(*idx);
    }
  }
  if (a.limit > 0 && records.size() > a.limit) records.resize(a.limit);
  if (records.empty()) throw ComputationError("no records to process");

  std::vector<diagram::Diagram> diagrams;
  const auto matrix = ContributionAnalysis(session, records, mode, &diagrams);
  json all = json::array();
  for (const auto& d : diagrams) all.push_back(diagram::DiagramToJson(d));
  const std::string stem = Workspace::SafeName(a.disease);
  const json config = {{"mode", a.mode}, {"records", matrix.records}};
  const std::string hash = ConfigHash(config);
  const auto seed = session.model().seed;
  WriteArtifact(ws, Workspace::DiagramDir(a.disease) + "/batch_" + a.mode + ".json", all.dump(),
                "diagram-batch", seed, hash);
  WriteArtifact(ws, "reports/" + stem + "_contribution.tsv", diagram::ContributionToTsv(matrix),
                "report", seed, hash);
  std::optional<diagram::Dendrogram> tree;
  if (matrix.records.size() >= 2) {
    tree = diagram::WardCluster(matrix.values);
    WriteArtifact(ws, "reports/" + stem + "_cluster_order.tsv",
                  diagram::ClusterOrderToTsv(matrix, *tree), "report", seed, hash);
  }
  WriteArtifact(ws, "reports/" + stem + "_contribution.json",
                diagram::ContributionToJson(matrix, tree ? &*tree : nullptr).dump(1), "report", seed,
                hash);
  out << diagrams.size() << " diagrams for " << records.size() << " records\n";
  return kExitOk;
}

int EvaluateCmd(const fs::path& root, const EvaluateArgs& a, std::ostream& out) {
  auto ws = Workspace::Open(root);
  auto diseases = a.diseases.empty() ? ws.ModelDiseases() : a.diseases;
  if (diseases.empty()) throw NotFound("workspace has no fitted model");
  eval::EvaluationOptions options;
  options.mode = diagram::ParseDiagramMode(a.mode);
  options.tune_k = !a.no_tune;
  options.k_grid = GridOrDefault(a.grid);
  options.max_tuning_records = a.max_tuning;
  const json config = {{"mode", a.mode},
                       {"tune_k", options.tune_k},
                       {"k_grid", options.k_grid},
                       {"max_tuning_records", options.max_tuning_records}};
  const std::string hash = ConfigHash(config);

  std::vector<eval::DiseaseEvaluation> results;
  for (const auto& disease : diseases) {
    auto loaded = LoadSession(ws, disease);
    auto ev = loaded->session->Evaluate(options, LogProgress(disease + " records"));
    WriteArtifact(ws, "reports/" + Workspace::SafeName(disease) + "_evaluation.json",
                  eval::EvaluationToJson(ev).dump(1), "report", loaded->session->model().seed, hash);
    results.push_back(std::move(ev));
  }
  const auto approached = eval::ApproachedTable(results);
  const auto groups = eval::GroupTable(results);
  WriteArtifact(ws, "reports/approached_distance.tsv", approached, "report", 0, hash);
  WriteArtifact(ws, "reports/improved_groups.tsv", groups, "report", 0, hash);
  out << approached << "\n" << groups;
  return kExitOk;
}

int ServeCmd(const fs::path& root, ServeArgs a, const CLI::App& cmd) {
  if (cmd.count("--port") == 0) {
    if (const char* env = std::getenv("HDPD_PORT")) {
      try {
        a.port = std::stoi(env);
      } catch (const std::exception&) {
        throw UsageError(std::string("HDPD_PORT is not a port number: ") + env);
      }
    }
  }
  if (a.port < 1 || a.port > 65535) throw UsageError("port must lie in 1..65535");
  const auto ws = Workspace::Open(root);
  ServiceOptions options;
  options.default_budget = a.budget;
  const auto session = ApiSession::FromWorkspace(ws, options);
  Serve(*session, a.host, a.port);
  return kExitOk;
}

int PlotCmd(const fs::path& root, const PlotArgs& a, std::ostream& out) {
  auto ws = Workspace::Open(root);
  if (a.diagrams.empty() && a.contribution.empty()) {
    throw UsageError("plot needs --diagram or --contribution");
  }
  std::vector<diagram::Diagram> diagrams;
  for (const auto& path : a.diagrams) {
    const auto j = ReadJsonFile(path);
    if (j.is_array()) {
      for (const auto& d : j) diagrams.push_back(diagram::DiagramFromJson(d));
    } else {
      diagrams.push_back(diagram::DiagramFromJson(j));
    }
  }
  std::size_t written = 0;
  auto emit = [&](const std::string& name, const std::string& svg, const json& config) {
    const std::string rel = "plots/" + Workspace::SafeName(name) + ".svg";
    WriteArtifact(ws, rel, svg, "plot", 0, ConfigHash(config));
    out << rel << "\n";
    ++written;
  };
  if (a.superimpose) {
    if (diagrams.empty()) throw UsageError("--superimpose needs --diagram files");
    const auto grid = diagram::Superimpose(diagrams);
    emit("superimposed_" + grid.record_id + "_" + grid.var_x + "_" + grid.var_y,
         SuperimposedSvg(grid), diagram::SuperimposedToJson(grid));
  } else {
    for (const auto& d : diagrams) {
      emit(d.disease + "_" + d.record_id + "_" + d.var_x + "_" + d.var_y + "_" +
               std::string(diagram::ToString(d.mode)),
           DiagramSvg(d), diagram::DiagramToJson(d));
    }
  }
  if (!a.contribution.empty()) {
    const auto j = ReadJsonFile(a.contribution);
    diagram::ContributionMatrix m;
    diagram::Dendrogram tree;
    try {
      m.records = j.at("records").get<std::vector<std::string>>();
      m.features = j.at("features").get<std::vector<std::string>>();
      m.values = Matrix(0, m.features.size());
      for (const auto& row : j.at("values")) m.values.AppendRow(row.get<std::vector<double>>());
      if (j.contains("cluster_order")) {
        const auto order = j.at("cluster_order").get<std::vector<std::string>>();
        for (const auto& id : order) {
          const auto it = std::find(m.records.begin(), m.records.end(), id);
          if (it == m.records.end()) throw ParseError("cluster order names unknown record " + id);
          tree.order.push_back(static_cast<std::size_t>(it - m.records.begin()));
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("malformed contribution file: " + std::string(e.what()));
    }
    emit(fs::path(a.contribution).stem().string(),
         ContributionSvg(m, tree.order.empty() ? nullptr : &tree), j);
  }
  Log().info("{} plot(s) written", written);
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Health-disease phase diagrams for longitudinal checkup cohorts", "hdpd"};
  app.require_subcommand(1);
  std::string workspace = ".";
  std::string log_level = "info";
  app.add_option("-w,--workspace", workspace, "Workspace directory")->capture_default_str();
  app.add_option("--log-level", log_level, "Log level")
      ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}))
      ->capture_default_str();

  GenSyntheticArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Generate a seeded synthetic cohort");
  gen_cmd->add_option("--participants", gen.participants)->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--years", gen.years)->check(CLI::PositiveNumber)->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--config", gen.config, "Generator config (JSON)")->check(CLI::ExistingFile);

  IngestArgs ingest;
  auto* ingest_cmd = app.add_subcommand("ingest", "Import a cohort CSV and its schema");
  ingest_cmd->add_option("--cohort", ingest.cohort)->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--schema", ingest.schema)->required()->check(CLI::ExistingFile);

  LabelArgs label;
  auto* label_cmd = app.add_subcommand("label", "Label records with a disease rule");
  label_cmd->add_option("--disease", label.disease)->required();
  label_cmd->add_option("--rule", label.rule, "Rule file (JSON); default: workspace or builtin")
      ->check(CLI::ExistingFile);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Fit a disease model");
  train_cmd->add_option("--disease", train.disease)->required();
  train_cmd->add_option("--horizon", train.options.horizon_years)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--rfe", train.options.rfe_target, "Target feature count, 0 = off")->capture_default_str();
  train_cmd->add_option("--rfe-step", train.options.rfe_step)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--rounds", train.options.train.rounds)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--depth", train.options.train.max_depth)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--learning-rate", train.options.train.learning_rate)->capture_default_str();
  train_cmd->add_option("--train-fraction", train.options.train_fraction)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  train_cmd->add_option("--split-seed", train.options.split_seed)->capture_default_str();
  train_cmd->add_option("--seed", train.options.seed)->capture_default_str();
  train_cmd->add_option("--folds", train.options.folds)->check(CLI::Range(2, 100))->capture_default_str();
  train_cmd->add_option("--max-missing", train.options.preprocess.max_missing_fraction)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  train_cmd->add_option("--k", train.options.projection.k)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--weights", train.weights)->check(CLI::IsMember(kWeights))->capture_default_str();
  train_cmd->add_option("--pool", train.pool, "Neighbour pool label")->check(CLI::IsMember(kPools))->capture_default_str();

  TuneKArgs tune;
  auto* tune_cmd = app.add_subcommand("tune-k", "Select the neighbour count on training records");
  tune_cmd->add_option("--disease", tune.disease)->required();
  tune_cmd->add_option("--grid", tune.grid, "k values (default 1..64 grid)")->delimiter(',');
  tune_cmd->add_option("--max-records", tune.max_records, "Subsample size, 0 = all")->capture_default_str();

  DiagramArgs dia;
  auto* dia_cmd = app.add_subcommand("diagram", "Build one phase diagram");
  dia_cmd->add_option("--record", dia.record, "Record id participant:year")->required();
  dia_cmd->add_option("--disease", dia.disease)->required();
  dia_cmd->add_option("--x", dia.x)->required();
  dia_cmd->add_option("--y", dia.y)->required();
  dia_cmd->add_option("--mode", dia.mode)->check(CLI::IsMember(kModes))->capture_default_str();
  dia_cmd->add_flag("--active", dia.active, "Active search instead of full search");
  dia_cmd->add_option("--budget", dia.budget)->check(CLI::PositiveNumber)->capture_default_str();

  BatchArgs batch;
  auto* batch_cmd = app.add_subcommand("batch", "Diagrams for all measured pairs of many records");
  batch_cmd->add_option("--disease", batch.disease)->required();
  batch_cmd->add_option("--mode", batch.mode)->check(CLI::IsMember(kModes))->capture_default_str();
  batch_cmd->add_option("--record", batch.records, "Record ids (default: predicted-onset test records)");
  batch_cmd->add_option("--limit", batch.limit, "At most this many records, 0 = all")->capture_default_str();

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Retrospective validation report");
  ev_cmd->add_option("--disease", ev.diseases, "Diseases (default: every model)");
  ev_cmd->add_option("--mode", ev.mode)->check(CLI::IsMember(kModes))->capture_default_str();
  ev_cmd->add_flag("--no-tune", ev.no_tune, "Keep the model's k");
  ev_cmd->add_option("--max-tuning", ev.max_tuning, "Tuning subsample size, 0 = all")->capture_default_str();
  ev_cmd->add_option("--grid", ev.grid, "k values for tuning")->delimiter(',');

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "HTTP API for interactive exploration");
  serve_cmd->add_option("--host", serve.host)->capture_default_str();
  serve_cmd->add_option("--port", serve.port, "Port (default $HDPD_PORT or 8080)");
  serve_cmd->add_option("--budget", serve.budget, "Default active-search budget")->check(CLI::PositiveNumber)->capture_default_str();

  PlotArgs plot;
  auto* plot_cmd = app.add_subcommand("plot", "Render diagrams or contribution maps as SVG");
  plot_cmd->add_option("--diagram", plot.diagrams, "Diagram or batch files")->check(CLI::ExistingFile);
  plot_cmd->add_option("--contribution", plot.contribution, "Contribution JSON")->check(CLI::ExistingFile);
  plot_cmd->add_flag("--superimpose", plot.superimpose, "Overlay the given diagrams");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  SetLogLevel(spdlog::level::from_str(log_level));
  const fs::path root(workspace);
  try {
    if (*gen_cmd) return GenSynthetic(root, gen, out, *gen_cmd);
    if (*ingest_cmd) return Ingest(root, ingest, out);
    if (*label_cmd) return Label(root, label, out);
    if (*train_cmd) return Train(root, train, out);
    if (*tune_cmd) return TuneK(root, tune, out);
    if (*dia_cmd) return MakeDiagram(root, dia, out);
    if (*batch_cmd) return Batch(root, batch, out);
    if (*ev_cmd) return EvaluateCmd(root, ev, out);
    if (*serve_cmd) return ServeCmd(root, serve, *serve_cmd);
    if (*plot_cmd) return PlotCmd(root, plot, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace hdpd::interface

#include "hdpd/cohort/preprocess.h"

#include <utility>
#include <algorithm>

#include "hdpd/common/error.h"
#include "hdpd/common/logging.h"

namespace hdpd::cohort {
namespace {

Split SplitOf(const LabeledDataset& dataset, const std::string& participant) {
  auto it = dataset.split.find(participant);
  if (it == dataset.split.end()) {
    throw InvalidArgument("participant '" + participant +
                          "' has no train/test assignment");
  }
  return it->second;
}

}  // namespace

Preprocessor Preprocessor::Fit(const Cohort& cohort, const LabeledDataset& dataset,
                               const PreprocessOptions& options) {
  const auto& schema = cohort.schema();
  const auto& records = cohort.records();
  std::vector<std::size_t> train;
  for (const auto& row : dataset.rows) {
    if (SplitOf(dataset, records[row.record_index].participant_id) == Split::kTrain) {
      train.push_back(row.record_index);
    }
  }
  if (train.empty()) throw ComputationError("no training rows to fit preprocessing");

  Preprocessor p;
  p.schema_width_ = schema.features.size();
  for (std::size_t j = 0; j < schema.features.size(); ++j) {
    const auto& meta = schema.features[j];
    if (schema.IsExcluded(meta.name)) continue;
    std::vector<double> observed;
    observed.reserve(train.size());
    for (const std::size_t idx : train) {
      if (const auto& v = records[idx].values[j]) observed.push_back(*v);
    }
    if (observed.empty()) {
      Log().warn("feature '{}' has no training values; dropped", meta.name);
      p.dropped_.push_back(meta.name);
      continue;
    }
    const double missing_fraction =
        1.0 - static_cast<double>(observed.size()) / static_cast<double>(train.size());
    if (missing_fraction >= options.max_missing_fraction) {
      p.dropped_.push_back(meta.name);
      continue;
    }

    Source source{meta.name, j, meta.kind, 0.0, p.columns_.size(), 0};
    if (meta.kind == FeatureKind::kCategorical) {
      std::vector<std::size_t> counts(meta.levels.size(), 0);
      for (const double v : observed) ++counts[static_cast<std::size_t>(v)];
      source.fill = static_cast<double>(
          std::max_element(counts.begin(), counts.end()) - counts.begin());
      source.n_levels = meta.levels.size();
      OneHotGroup group{meta.name, {}};
      for (std::size_t l = 0; l < meta.levels.size(); ++l) {
        group.columns.push_back(p.columns_.size());
        p.columns_.push_back({meta.name + "=" + meta.levels[l], FeatureKind::kBinary,
                              meta.name, l, std::nullopt});
      }
      p.groups_.push_back(std::move(group));
    } else {
      source.fill = LowerMedian(std::move(observed));
      p.columns_.push_back({meta.name, meta.kind, meta.name, std::nullopt,
                            meta.risk_direction});
    }
    p.sources_.push_back(source);
  }
  if (p.columns_.empty()) throw ComputationError("every feature was dropped");
  return p;
}

TransformedRow Preprocessor::Transform(const Record& record) const {
  if (record.values.size() != schema_width_) {
    throw InvalidArgument("record " + record.Id() +
                          " does not match the preprocessing schema width");
  }
  TransformedRow row{std::vector<double>(columns_.size(), 0.0),
                     std::vector<bool>(columns_.size(), false)};
  for (const auto& s : sources_) {
    const auto& v = record.values[s.schema_index];
    const double value = v ? *v : s.fill;
    if (s.kind == FeatureKind::kCategorical) {
      for (std::size_t l = 0; l < s.n_levels; ++l) {
        row.values[s.first_column + l] = static_cast<double>(l) == value ? 1.0 : 0.0;
        row.missing[s.first_column + l] = !v;
      }
    } else {
      row.values[s.first_column] = value;
      row.missing[s.first_column] = !v;
    }
  }
  return row;
}

std::optional<std::size_t> Preprocessor::ColumnIndex(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

nlohmann::json Preprocessor::ToJson() const {
  nlohmann::json sources = nlohmann::json::array();
  for (const auto& s : sources_) {
    sources.push_back({{"name", s.name},
                       {"schema_index", s.schema_index},
                       {"kind", ToString(s.kind)},
                       {"fill", s.fill},
                       {"first_column", s.first_column},
                       {"n_levels", s.n_levels}});
  }
  nlohmann::json columns = nlohmann::json::array();
  for (const auto& c : columns_) {
    nlohmann::json j = {{"name", c.name}, {"kind", ToString(c.kind)}, {"source", c.source}};
    if (c.level) j["level"] = *c.level;
    if (c.risk_direction) j["risk_direction"] = ToString(*c.risk_direction);
    columns.push_back(std::move(j));
  }
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : groups_) {
    groups.push_back({{"feature", g.feature}, {"columns", g.columns}});
  }
  return {{"schema_width", schema_width_}, {"sources", sources},
          {"columns", columns},            {"groups", groups},
          {"dropped", dropped_}};
}

Preprocessor Preprocessor::FromJson(const nlohmann::json& j) {
  Preprocessor p;
  try {
    p.schema_width_ = j.at("schema_width").get<std::size_t>();
    for (const auto& s : j.at("sources")) {
      p.sources_.push_back({s.at("name").get<std::string>(),
                            s.at("schema_index").get<std::size_t>(),
                            ParseFeatureKind(s.at("kind").get<std::string>()),
                            s.at("fill").get<double>(),
                            s.at("first_column").get<std::size_t>(),
                            s.at("n_levels").get<std::size_t>()});
    }
    for (const auto& c : j.at("columns")) {
      Column col{c.at("name").get<std::string>(),
                 ParseFeatureKind(c.at("kind").get<std::string>()),
                 c.at("source").get<std::string>(), std::nullopt, std::nullopt};
      if (c.contains("level")) col.level = c.at("level").get<std::size_t>();
      if (c.contains("risk_direction")) {
        col.risk_direction = ParseRiskDirection(c.at("risk_direction").get<std::string>());
      }
      p.columns_.push_back(std::move(col));
    }
    for (const auto& g : j.at("groups")) {
      p.groups_.push_back({g.at("feature").get<std::string>(),
                           g.at("columns").get<std::vector<std::size_t>>()});
    }
    p.dropped_ = j.at("dropped").get<std::vector<std::string>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("preprocessor: ") + e.what());
  }
  return p;
}

std::vector<std::size_t> PreparedDataset::RowsIn(Split which) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < split.size(); ++i) {
    if (split[i] == which) out.push_back(i);
  }
  return out;
}

PreparedDataset Preprocess(const Cohort& cohort, const LabeledDataset& dataset,
                           const PreprocessOptions& options) {
  return Preprocess(cohort, dataset, Preprocessor::Fit(cohort, dataset, options));
}

PreparedDataset Preprocess(const Cohort& cohort, const LabeledDataset& dataset,
                           Preprocessor preprocessor) {
  PreparedDataset out;
  out.disease = dataset.disease;
  out.horizon_years = dataset.horizon_years;
  out.preprocessor = std::move(preprocessor);
  const std::size_t width = out.preprocessor.columns().size();
  out.values = Matrix(dataset.rows.size(), width);
  out.observed = Matrix(dataset.rows.size(), width);
  const auto& records = cohort.records();
  for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
    const auto& row = dataset.rows[i];
    const auto& record = records[row.record_index];
    const auto t = out.preprocessor.Transform(record);
    for (std::size_t c = 0; c < width; ++c) {
      out.values(i, c) = t.values[c];
      out.observed(i, c) = t.missing[c] ? kMissing : t.values[c];
    }
    out.labels.push_back(row.label);
    out.record_index.push_back(row.record_index);
    out.participants.push_back(record.participant_id);
    out.years.push_back(record.year);
    out.split.push_back(SplitOf(dataset, record.participant_id));
  }
  return out;
}

}  // namespace hdpd::cohort

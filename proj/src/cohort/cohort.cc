#include "hdpd/cohort/cohort.h"

#include <algorithm>
#include <charconv>
#include <set>

#include "hdpd/common/error.h"

namespace hdpd::cohort {

std::string_view ToString(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kContinuous:
      return "continuous";
    case FeatureKind::kBinary:
      return "binary";
    case FeatureKind::kCategorical:
      return "categorical";
  }
  return "continuous";
}

FeatureKind ParseFeatureKind(std::string_view text) {
  if (text == "continuous") return FeatureKind::kContinuous;
  if (text == "binary") return FeatureKind::kBinary;
  if (text == "categorical") return FeatureKind::kCategorical;
  throw ParseError("unknown feature kind '" + std::string(text) + "'");
}

std::string_view ToString(RiskDirection direction) {
  return direction == RiskDirection::kHighIsRisk ? "high" : "low";
}

RiskDirection ParseRiskDirection(std::string_view text) {
  if (text == "high" || text == "high-is-risk") return RiskDirection::kHighIsRisk;
  if (text == "low" || text == "low-is-risk") return RiskDirection::kLowIsRisk;
  throw ParseError("unknown risk direction '" + std::string(text) + "'");
}

void Schema::Validate() const {
  std::set<std::string, std::less<>> seen;
  for (const auto& f : features) {
    if (f.name.empty()) throw InvalidArgument("feature with empty name");
    if (f.name == "participant_id" || f.name == "year") {
      throw InvalidArgument("feature name '" + f.name + "' is reserved");
    }
    if (!seen.insert(f.name).second) {
      throw InvalidArgument("duplicate feature name '" + f.name + "'");
    }
    if (f.kind == FeatureKind::kCategorical && f.levels.empty()) {
      throw InvalidArgument("categorical feature '" + f.name +
                            "' has no levels");
    }
  }
  for (const auto& name : excluded) {
    if (!seen.contains(name)) {
      throw InvalidArgument("excluded feature '" + name + "' not in schema");
    }
  }
}

std::optional<std::size_t> Schema::IndexOf(std::string_view name) const {
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (features[i].name == name) return i;
  }
  return std::nullopt;
}

bool Schema::IsExcluded(std::string_view name) const {
  return std::find(excluded.begin(), excluded.end(), name) != excluded.end();
}

std::string Record::Id() const {
  return participant_id + ":" + std::to_string(year);
}

std::pair<std::string, int> ParseRecordId(std::string_view id) {
  const auto colon = id.rfind(':');
  if (colon == std::string_view::npos || colon == 0) {
    throw InvalidArgument("record id '" + std::string(id) +
                          "' is not of the form participant:year");
  }
  int year = 0;
  const auto tail = id.substr(colon + 1);
  const auto [ptr, ec] = std::from_chars(tail.data(), tail.data() + tail.size(), year);
  if (ec != std::errc() || ptr != tail.data() + tail.size()) {
    throw InvalidArgument("record id '" + std::string(id) + "' has a bad year");
  }
  return {std::string(id.substr(0, colon)), year};
}

Cohort::Cohort(Schema schema) : schema_(std::move(schema)) {
  schema_.Validate();
}

void Cohort::AddRecord(Record record) {
  const auto& features = schema_.features;
  if (record.values.size() != features.size()) {
    throw InvalidArgument("record " + record.Id() + " has " +
                          std::to_string(record.values.size()) +
                          " values, schema has " +
                          std::to_string(features.size()));
  }
  for (std::size_t j = 0; j < features.size(); ++j) {
    if (!record.values[j]) continue;
    const double v = *record.values[j];
    if (features[j].kind == FeatureKind::kBinary && v != 0.0 && v != 1.0) {
      throw InvalidArgument("record " + record.Id() + ": binary feature '" +
                            features[j].name + "' has value " +
                            std::to_string(v));
    }
    if (features[j].kind == FeatureKind::kCategorical &&
        (v < 0 || v >= static_cast<double>(features[j].levels.size()) ||
         v != static_cast<double>(static_cast<long>(v)))) {
      throw InvalidArgument("record " + record.Id() + ": categorical feature '" +
                            features[j].name + "' has invalid level index");
    }
  }
  auto key = std::make_pair(record.participant_id, record.year);
  if (index_.contains(key)) {
    throw InvalidArgument("duplicate record (" + record.participant_id + ", " +
                          std::to_string(record.year) + ")");
  }
  const std::size_t idx = records_.size();
  index_.emplace(std::move(key), idx);
  auto& list = by_participant_[record.participant_id];
  list.push_back(idx);
  records_.push_back(std::move(record));
  // Keep per-participant lists ordered by year regardless of insertion order.
  std::sort(list.begin(), list.end(), [this](std::size_t a, std::size_t b) {
    return records_[a].year < records_[b].year;
  });
}

std::size_t Cohort::RequireFeature(std::string_view name) const {
  if (auto idx = schema_.IndexOf(name)) return *idx;
  throw NotFound("unknown feature '" + std::string(name) + "'");
}

std::optional<std::size_t> Cohort::FindRecord(std::string_view participant,
                                              int year) const {
  auto it = index_.find(std::make_pair(std::string(participant), year));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Cohort::FindRecord(std::string_view record_id) const {
  std::pair<std::string, int> key;
  try {
    key = ParseRecordId(record_id);
  } catch (const InvalidArgument&) {
    return std::nullopt;
  }
  return FindRecord(key.first, key.second);
}

std::vector<std::size_t> Cohort::ParticipantRecords(
    std::string_view participant) const {
  auto it = by_participant_.find(participant);
  if (it == by_participant_.end()) return {};
  return it->second;
}

std::vector<std::string> Cohort::Participants() const {
  std::vector<std::string> out;
  out.reserve(by_participant_.size());
  for (const auto& [id, _] : by_participant_) out.push_back(id);
  return out;
}

}  // namespace hdpd::cohort

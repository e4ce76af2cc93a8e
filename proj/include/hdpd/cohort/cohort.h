#ifndef HDPD_COHORT_COHORT_H_
#define HDPD_COHORT_COHORT_H_

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hdpd::cohort {

enum class FeatureKind { kContinuous, kBinary, kCategorical };
enum class RiskDirection { kHighIsRisk, kLowIsRisk };

std::string_view ToString(FeatureKind kind);
FeatureKind ParseFeatureKind(std::string_view text);
std::string_view ToString(RiskDirection direction);
RiskDirection ParseRiskDirection(std::string_view text);

struct FeatureMeta {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;
  // Level names for categorical features; values are stored as level indices.
  std::vector<std::string> levels;
  std::string unit;
  std::optional<RiskDirection> risk_direction;
};

// Feature declarations plus the names that are parsed but never used as model
// inputs (free-text answers, label markers, ...).
struct Schema {
  std::vector<FeatureMeta> features;
  std::vector<std::string> excluded;

  // Throws InvalidArgument on duplicate names or empty level sets.
  void Validate() const;
  std::optional<std::size_t> IndexOf(std::string_view name) const;
  bool IsExcluded(std::string_view name) const;
};

// One health-checkup visit. `values` is aligned with Schema::features.
struct Record {
  std::string participant_id;
  int year = 0;
  std::vector<std::optional<double>> values;

  // "participant_id:year", the identifier used by diagrams and the API.
  std::string Id() const;
};

// Splits a record id produced by Record::Id(). Throws InvalidArgument.
std::pair<std::string, int> ParseRecordId(std::string_view id);

// Longitudinal collection of records sharing one schema. Insertion validates
// the (participant, year) key and value domains.
class Cohort {
 public:
  Cohort() = default;
  explicit Cohort(Schema schema);

  const Schema& schema() const { return schema_; }
  const std::vector<FeatureMeta>& features() const { return schema_.features; }
  const std::vector<Record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

  // Throws InvalidArgument on duplicate keys, wrong width, non-binary values
  // in binary features, or out-of-range categorical levels.
  void AddRecord(Record record);

  std::size_t RequireFeature(std::string_view name) const;
  std::optional<std::size_t> FindRecord(std::string_view participant,
                                        int year) const;
  std::optional<std::size_t> FindRecord(std::string_view record_id) const;

  // Record indices of one participant ordered by year.
  std::vector<std::size_t> ParticipantRecords(std::string_view participant) const;
  // Sorted unique participant ids.
  std::vector<std::string> Participants() const;

 private:
  Schema schema_;
  std::vector<Record> records_;
  std::map<std::pair<std::string, int>, std::size_t> index_;
  std::map<std::string, std::vector<std::size_t>, std::less<>> by_participant_;
};

}  // namespace hdpd::cohort

#endif  // HDPD_COHORT_COHORT_H_

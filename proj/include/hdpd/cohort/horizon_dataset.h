#ifndef HDPD_COHORT_HORIZON_DATASET_H_
#define HDPD_COHORT_HORIZON_DATASET_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hdpd/cohort/cohort.h"

namespace hdpd::cohort {

enum class Split { kTrain, kTest };

struct DatasetRow {
  std::size_t record_index = 0;  // into Cohort::records()
  int label = 0;
};

struct LabeledDataset {
  std::string disease;
  int horizon_years = 0;  // 0 = current onset
  std::vector<DatasetRow> rows;
  std::map<std::string, Split> split;  // participant -> split
};

// Rows for onset within `horizon_years`.
//  horizon 0: every record with a known label, labelled by itself.
//  horizon n > 0: record (p, t) is included iff its own label is known and
//  negative and p has at least one labelled record in (t, t + n]; the row is
//  positive iff any of those future labels is positive.
LabeledDataset BuildHorizonDataset(const Cohort& cohort,
                                   std::span<const std::optional<int>> labels,
                                   int horizon_years, std::string disease);

// Participant-level partition. The train set holds round(fraction * n)
// participants chosen by a seeded shuffle of the sorted ids.
std::map<std::string, Split> SplitByParticipant(
    std::span<const std::string> participants, double train_fraction,
    std::uint64_t seed);

// Splits all cohort participants and stores the assignment in `dataset`.
void AssignSplit(const Cohort& cohort, LabeledDataset& dataset,
                 double train_fraction, std::uint64_t seed);

// Records of the row's participant with year in (year, year + horizon].
std::vector<std::size_t> FutureRecords(const Cohort& cohort,
                                       std::size_t record_index, int horizon);

}  // namespace hdpd::cohort

#endif  // HDPD_COHORT_HORIZON_DATASET_H_

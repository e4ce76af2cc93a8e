#include "hdpd/cohort/horizon_dataset.h"

#include <algorithm>
#include <cmath>
#include <random>

#include "hdpd/common/error.h"

namespace hdpd::cohort {

LabeledDataset BuildHorizonDataset(const Cohort& cohort,
                                   std::span<const std::optional<int>> labels,
                                   int horizon_years, std::string disease) {
  if (labels.size() != cohort.size()) {
    throw InvalidArgument("label vector does not match cohort size");
  }
  if (horizon_years < 0) throw InvalidArgument("horizon must be >= 0");
  LabeledDataset dataset;
  dataset.disease = std::move(disease);
  dataset.horizon_years = horizon_years;
  const auto& records = cohort.records();
  for (const auto& participant : cohort.Participants()) {
    const auto indices = cohort.ParticipantRecords(participant);
    for (std::size_t a = 0; a < indices.size(); ++a) {
      const std::size_t idx = indices[a];
      const auto& current = labels[idx];
      if (!current) continue;
      if (horizon_years == 0) {
        dataset.rows.push_back({idx, *current});
        continue;
      }
      if (*current != 0) continue;
      const int year = records[idx].year;
      bool eligible = false;
      bool positive = false;
      for (std::size_t b = a + 1; b < indices.size(); ++b) {
        const int future_year = records[indices[b]].year;
        if (future_year > year + horizon_years) break;
        if (const auto& future = labels[indices[b]]) {
          eligible = true;
          positive = positive || *future == 1;
        }
      }
      if (eligible) dataset.rows.push_back({idx, positive ? 1 : 0});
    }
  }
  return dataset;
}

std::map<std::string, Split> SplitByParticipant(
    std::span<const std::string> participants, double train_fraction,
    std::uint64_t seed) {
  if (!(train_fraction >= 0.0 && train_fraction <= 1.0)) {
    throw InvalidArgument("train fraction must lie in [0, 1]");
  }
  std::vector<std::string> ids(participants.begin(), participants.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(ids.size())));
  std::map<std::string, Split> split;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    split[ids[i]] = i < n_train ? Split::kTrain : Split::kTest;
  }
  return split;
}

void AssignSplit(const Cohort& cohort, LabeledDataset& dataset,
                 double train_fraction, std::uint64_t seed) {
  // Split over every cohort participant so that all disease datasets built
  // from one cohort share the same assignment.
  const auto ids = cohort.Participants();
  dataset.split = SplitByParticipant(ids, train_fraction, seed);
}

std::vector<std::size_t> FutureRecords(const Cohort& cohort,
                                       std::size_t record_index, int horizon) {
  const auto& record = cohort.records().at(record_index);
  std::vector<std::size_t> out;
  for (const std::size_t idx : cohort.ParticipantRecords(record.participant_id)) {
    const int year = cohort.records()[idx].year;
    if (year > record.year && year <= record.year + horizon) out.push_back(idx);
  }
  return out;
}

}  // namespace hdpd::cohort

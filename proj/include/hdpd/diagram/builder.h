#ifndef HDPD_DIAGRAM_BUILDER_H_
#define HDPD_DIAGRAM_BUILDER_H_

#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hdpd/diagram/active_search.h"
#include "hdpd/diagram/diagram.h"
#include "hdpd/pmice/grid.h"
#include "hdpd/pmice/projector.h"
#include "hdpd/predictor/tree_ensemble.h"

namespace hdpd::diagram {

// One record in model-feature space. `values` are model inputs (imputed);
// `missing` marks values that were not measured.
struct RecordView {
  std::string id;
  std::string participant;
  int year = 0;
  std::vector<double> values;
  std::vector<bool> missing;
};

// Everything a diagram needs besides the record. Pointers are non-owning.
struct DiagramContext {
  const predictor::FittedModel* model = nullptr;
  const pmice::ReferenceData* reference = nullptr;
  const pmice::FeatureSpace* space = nullptr;
  pmice::GridConfig grid;
  pmice::ProjectionConfig projection;
  std::string disease;
  // Drop the participant's reference rows at or after the record's year.
  bool exclude_future = true;

  void Validate() const;
};

// Scores the cells of one (record, pair) grid.
class CellScorer {
 public:
  CellScorer(const DiagramContext& context, const RecordView& record, std::size_t fx,
             std::size_t fy, DiagramMode mode);

  const pmice::PerturbationGrid& grid() const { return grid_; }
  // 2d-ICE point of a cell.
  std::vector<double> IcePoint(std::size_t cell) const;
  // Point the model scores in the configured mode.
  std::vector<double> ScoredPoint(std::size_t cell) const;
  double Score(std::size_t cell) const;

 private:
  const DiagramContext& context_;
  const RecordView& record_;
  DiagramMode mode_;
  pmice::PerturbationGrid grid_;
  int original_label_ = 0;
  std::vector<bool> excluded_;
  std::unique_ptr<pmice::PairProjector> projector_;
};

// Throws InvalidArgument for an unknown or repeated index and for a feature
// missing in the record.
void CheckPair(const DiagramContext& context, const RecordView& record, std::size_t fx,
               std::size_t fy);

Diagram BuildDiagramFull(const DiagramContext& context, const RecordView& record,
                         std::size_t fx, std::size_t fy, DiagramMode mode);

Diagram BuildDiagramActive(const DiagramContext& context, const RecordView& record,
                           std::size_t fx, std::size_t fy, DiagramMode mode,
                           const ActiveLearningConfig& config = {});

// Unordered pairs (fx < fy) of features measured in the record.
std::vector<std::pair<std::size_t, std::size_t>> MeasuredPairs(const RecordView& record);

// Full-search diagrams for every measured pair.
std::vector<Diagram> BatchDiagrams(const DiagramContext& context, const RecordView& record,
                                   DiagramMode mode);

}  // namespace hdpd::diagram

#endif  // HDPD_DIAGRAM_BUILDER_H_

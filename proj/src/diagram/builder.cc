#include "hdpd/diagram/builder.h"

#include <cmath>

#include "hdpd/common/error.h"

namespace hdpd::diagram {

std::string_view ToString(DiagramMode mode) {
  return mode == DiagramMode::kIce2d ? "2d-ice" : "pmice";
}

DiagramMode ParseDiagramMode(std::string_view text) {
  if (text == "2d-ice" || text == "ice") return DiagramMode::kIce2d;
  if (text == "pmice" || text == "p-mice") return DiagramMode::kPmice;
  throw InvalidArgument("unknown diagram mode '" + std::string(text) + "'");
}

void Diagram::Validate() const {
  const std::size_t n = cells();
  if (n == 0 || prob.size() != n || label.size() != n || (!queried.empty() && queried.size() != n)) {
    throw InvalidArgument("diagram grids do not share the axis dimensions");
  }
  if (origin_x >= nx() || origin_y >= ny()) throw InvalidArgument("diagram origin outside the grid");
  for (std::size_t c = 0; c < n; ++c) {
    const bool known = queried.empty() || queried[c];
    if (!known) continue;
    if (std::isnan(prob[c])) throw InvalidArgument("queried cell without a probability");
    if ((prob[c] >= threshold ? 1 : 0) != label[c]) {
      throw InvalidArgument("diagram label disagrees with its probability");
    }
  }
  if (ClassifyBoundary(label, nx(), ny()) != pattern) {
    throw InvalidArgument("diagram boundary pattern does not match its labels");
  }
}

void DiagramContext::Validate() const {
  if (model == nullptr || reference == nullptr || space == nullptr) {
    throw InvalidArgument("diagram context is incomplete");
  }
  const std::size_t m = model->features().size();
  if (space->size() != m || reference->values.cols() != m || space->domains.size() != m) {
    throw InvalidArgument("diagram context widths disagree with the model");
  }
  grid.Validate();
  projection.Validate();
}

void CheckPair(const DiagramContext& context, const RecordView& record, std::size_t fx,
               std::size_t fy) {
  const std::size_t m = context.model->features().size();
  if (record.values.size() != m || record.missing.size() != m) {
    throw InvalidArgument("record width does not match the model");
  }
  if (fx >= m || fy >= m) throw NotFound("intervention variable not in the model");
  if (fx == fy) throw InvalidArgument("intervention variables must differ");
  if (record.missing[fx] || record.missing[fy]) {
    throw InvalidArgument("intervention variable is missing in the record");
  }
}

CellScorer::CellScorer(const DiagramContext& context, const RecordView& record, std::size_t fx,
                       std::size_t fy, DiagramMode mode)
    : context_(context), record_(record), mode_(mode) {
  context.Validate();
  CheckPair(context, record, fx, fy);
  grid_ = pmice::MakeGrid(record.values, fx, fy, context.space->domains, context.space->discrete,
                          context.grid);
  if (mode == DiagramMode::kPmice) {
    if (context.exclude_future) {
      excluded_ = pmice::FutureExclusion(*context.reference, record.participant, record.year);
    }
    projector_ = std::make_unique<pmice::PairProjector>(*context.reference, *context.space,
                                                        record.values, fx, fy, excluded_);
    original_label_ = context.model->PredictOnset(record.values) ? 1 : 0;
  }
}

std::vector<double> CellScorer::IcePoint(std::size_t cell) const {
  if (cell >= grid_.cells()) throw InvalidArgument("cell outside the grid");
  std::vector<double> p = record_.values;
  p[grid_.fx] = grid_.x.values[cell % grid_.nx()];
  p[grid_.fy] = grid_.y.values[cell / grid_.nx()];
  return p;
}

std::vector<double> CellScorer::ScoredPoint(std::size_t cell) const {
  std::vector<double> ice = IcePoint(cell);
  if (mode_ == DiagramMode::kIce2d) return ice;
  const int label = context_.projection.pool_label == pmice::PoolLabel::kPerturbedPoint
                        ? (context_.model->PredictOnset(ice) ? 1 : 0)
                        : original_label_;
  return projector_->Project(ice[grid_.fx], ice[grid_.fy], label, context_.projection);
}

double CellScorer::Score(std::size_t cell) const {
  return context_.model->Predict(ScoredPoint(cell));
}

namespace {

Diagram Skeleton(const DiagramContext& context, const RecordView& record,
                 const pmice::PerturbationGrid& grid, DiagramMode mode) {
  Diagram d;
  d.record_id = record.id;
  d.disease = context.disease;
  d.var_x = context.model->features()[grid.fx];
  d.var_y = context.model->features()[grid.fy];
  d.fx = grid.fx;
  d.fy = grid.fy;
  d.axis_x = grid.x.values;
  d.axis_y = grid.y.values;
  d.origin_x = grid.x.origin;
  d.origin_y = grid.y.origin;
  d.threshold = context.model->threshold;
  d.mode = mode;
  d.prob.assign(grid.cells(), std::nan(""));
  d.label.assign(grid.cells(), 0);
  return d;
}

}  // namespace

Diagram BuildDiagramFull(const DiagramContext& context, const RecordView& record,
                         std::size_t fx, std::size_t fy, DiagramMode mode) {
  const CellScorer scorer(context, record, fx, fy, mode);
  Diagram d = Skeleton(context, record, scorer.grid(), mode);
  for (std::size_t c = 0; c < d.cells(); ++c) {
    d.prob[c] = scorer.Score(c);
    d.label[c] = d.prob[c] >= d.threshold ? 1 : 0;
  }
  d.pattern = ClassifyBoundary(d.label, d.nx(), d.ny());
  return d;
}

Diagram BuildDiagramActive(const DiagramContext& context, const RecordView& record,
                           std::size_t fx, std::size_t fy, DiagramMode mode,
                           const ActiveLearningConfig& config) {
  const CellScorer scorer(context, record, fx, fy, mode);
  Diagram d = Skeleton(context, record, scorer.grid(), mode);
  auto oracle = [&](std::size_t cell) {
    d.prob[cell] = scorer.Score(cell);
    return d.prob[cell] >= d.threshold ? 1 : 0;
  };
  ActiveSearchResult result =
      ActiveSearch(d.nx(), d.ny(), scorer.grid().OriginCell(), oracle, config);
  d.label = std::move(result.labels);
  d.queried = std::move(result.queried);
  d.pattern = ClassifyBoundary(d.label, d.nx(), d.ny());
  return d;
}

std::vector<std::pair<std::size_t, std::size_t>> MeasuredPairs(const RecordView& record) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < record.missing.size(); ++a) {
    if (record.missing[a]) continue;
    for (std::size_t b = a + 1; b < record.missing.size(); ++b) {
      if (!record.missing[b]) pairs.emplace_back(a, b);
    }
  }
  return pairs;
}

std::vector<Diagram> BatchDiagrams(const DiagramContext& context, const RecordView& record,
                                   DiagramMode mode) {
  std::vector<Diagram> out;
  for (const auto& [fx, fy] : MeasuredPairs(record)) {
    out.push_back(BuildDiagramFull(context, record, fx, fy, mode));
  }
  return out;
}

}  // namespace hdpd::diagram

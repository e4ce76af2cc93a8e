#ifndef HDPD_PREDICTOR_MODEL_IO_H_
#define HDPD_PREDICTOR_MODEL_IO_H_

#include <filesystem>

#include "hdpd/predictor/tree_ensemble.h"
#include "json.hpp"

namespace hdpd::predictor {

inline constexpr int kModelFormatVersion = 1;

// Portable model file (JSON):
//   {"format": "tree-ensemble", "version": 1, "base_score": b,
//    "features": [names...],
//    "trees": [[{"feature": i, "threshold": t, "missing_left": bool,
//                "left": l, "right": r, "gain": g}   (internal; gain optional)
//               | {"leaf": v}, ...], ...]}
// Node 0 of each tree is the root; rows go left iff value < threshold. Doubles
// are written in shortest round-trip form, so a reload predicts bit-identically.
nlohmann::json EnsembleToJson(const TreeEnsemble& ensemble);
TreeEnsemble EnsembleFromJson(const nlohmann::json& j);

// Fitted model: {"format": "fitted-model", "version": 1, "threshold": tau,
//                "importances": {name: gain}, "ensemble": {...}}
nlohmann::json FittedModelToJson(const FittedModel& model);
FittedModel FittedModelFromJson(const nlohmann::json& j);

// Parse errors (including truncated text) throw ParseError; an unsupported
// version throws VersionMismatch. No partially built model is returned.
TreeEnsemble ParseEnsemble(std::string_view text);
FittedModel ParseFittedModel(std::string_view text);

void SaveFittedModel(const std::filesystem::path& path, const FittedModel& model);
FittedModel LoadFittedModel(const std::filesystem::path& path);

}  // namespace hdpd::predictor

#endif  // HDPD_PREDICTOR_MODEL_IO_H_

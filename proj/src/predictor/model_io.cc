#include "hdpd/predictor/model_io.h"

#include <fstream>
#include <sstream>

#include "hdpd/common/error.h"

namespace hdpd::predictor {
namespace {

void CheckHeader(const nlohmann::json& j, std::string_view format) {
  if (!j.is_object()) throw ParseError("model file is not a JSON object");
  if (j.value("format", "") != format) {
    throw ParseError("expected format '" + std::string(format) + "'");
  }
  const int version = j.value("version", -1);
  if (version != kModelFormatVersion) {
    throw VersionMismatch("model format version " + std::to_string(version) +
                          " is not supported (expected " +
                          std::to_string(kModelFormatVersion) +
                          "); re-export or migrate the model");
  }
}

nlohmann::json ParseText(std::string_view text) {
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("model file: ") + e.what());
  }
}

}  // namespace

nlohmann::json EnsembleToJson(const TreeEnsemble& ensemble) {
  nlohmann::json trees = nlohmann::json::array();
  for (const Tree& tree : ensemble.trees) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const TreeNode& n : tree) {
      if (n.is_leaf()) {
        nodes.push_back({{"leaf", n.leaf}});
      } else {
        nodes.push_back({{"feature", n.feature},
                         {"threshold", n.threshold},
                         {"missing_left", n.missing_left},
                         {"left", n.left},
                         {"right", n.right},
                         {"gain", n.gain}});
      }
    }
    trees.push_back(std::move(nodes));
  }
  return {{"format", "tree-ensemble"},
          {"version", kModelFormatVersion},
          {"base_score", ensemble.base_score},
          {"features", ensemble.features},
          {"trees", std::move(trees)}};
}

TreeEnsemble EnsembleFromJson(const nlohmann::json& j) {
  CheckHeader(j, "tree-ensemble");
  TreeEnsemble e;
  try {
    e.base_score = j.at("base_score").get<double>();
    e.features = j.at("features").get<std::vector<std::string>>();
    for (const auto& jt : j.at("trees")) {
      Tree tree;
      for (const auto& jn : jt) {
        TreeNode n;
        if (jn.contains("leaf")) {
          n.leaf = jn.at("leaf").get<double>();
        } else {
          n.feature = jn.at("feature").get<int>();
          if (n.feature < 0) throw ParseError("negative feature index in split node");
          n.threshold = jn.at("threshold").get<double>();
          n.missing_left = jn.value("missing_left", true);
          n.left = jn.at("left").get<int>();
          n.right = jn.at("right").get<int>();
          n.gain = jn.value("gain", 0.0);
        }
        tree.push_back(n);
      }
      e.trees.push_back(std::move(tree));
    }
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("tree ensemble: ") + ex.what());
  }
  try {
    e.Validate();
  } catch (const InvalidArgument& ex) {
    throw ParseError(std::string("tree ensemble: ") + ex.what());
  }
  return e;
}

nlohmann::json FittedModelToJson(const FittedModel& model) {
  return {{"format", "fitted-model"},
          {"version", kModelFormatVersion},
          {"threshold", model.threshold},
          {"importances", model.importances},
          {"ensemble", EnsembleToJson(model.ensemble)}};
}

FittedModel FittedModelFromJson(const nlohmann::json& j) {
  CheckHeader(j, "fitted-model");
  FittedModel m;
  try {
    m.threshold = j.at("threshold").get<double>();
    m.importances = j.value("importances", std::map<std::string, double>{});
    m.ensemble = EnsembleFromJson(j.at("ensemble"));
  } catch (const nlohmann::json::exception& ex) {
    throw ParseError(std::string("fitted model: ") + ex.what());
  }
  if (!(m.threshold > 0.0 && m.threshold <= 1.0)) {
    throw ParseError("fitted model: threshold outside (0, 1]");
  }
  return m;
}

TreeEnsemble ParseEnsemble(std::string_view text) { return EnsembleFromJson(ParseText(text)); }

FittedModel ParseFittedModel(std::string_view text) {
  return FittedModelFromJson(ParseText(text));
}

void SaveFittedModel(const std::filesystem::path& path, const FittedModel& model) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << FittedModelToJson(model).dump() << '\n';
}

FittedModel LoadFittedModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open model file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return ParseFittedModel(buffer.str());
}

}  // namespace hdpd::predictor

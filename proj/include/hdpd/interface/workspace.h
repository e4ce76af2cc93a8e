#ifndef HDPD_INTERFACE_WORKSPACE_H_
#define HDPD_INTERFACE_WORKSPACE_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hdpd/cohort/cohort.h"
#include "hdpd/cohort/disease_rules.h"
#include "hdpd/interface/pipeline.h"
#include "json.hpp"

namespace hdpd::interface {

inline constexpr int kWorkspaceVersion = 1;

// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits. Object keys are
// sorted by the JSON library, so equal configs hash equally.
std::string ConfigHash(const nlohmann::json& config);

struct ArtifactEntry {
  std::string kind;
  std::uint64_t seed = 0;
  std::string config_hash;
};

// Directory layout:
//   manifest.json   artifact index
//   cohort.csv      schema.json
//   rules/<disease>.json
//   models/<disease>.json
//   diagrams/<disease>/...
//   reports/  plots/
// Paths in the manifest are relative to the root, with '/' separators.
class Workspace {
 public:
  // Creates the directory and an empty manifest unless one exists.
  static Workspace Create(const std::filesystem::path& root);
  // Throws NotFound when the manifest or any artifact it lists is missing,
  // VersionMismatch on an unknown manifest version.
  static Workspace Open(const std::filesystem::path& root);

  const std::filesystem::path& root() const { return root_; }
  std::filesystem::path Resolve(std::string_view relative) const;
  const std::map<std::string, ArtifactEntry>& artifacts() const { return artifacts_; }
  bool Has(std::string_view relative) const;

  // Records an artifact that has already been written and saves the manifest.
  void Register(const std::string& relative, std::string kind, std::uint64_t seed,
                std::string config_hash);

  static std::string RulePath(std::string_view disease);
  static std::string ModelPath(std::string_view disease);
  static std::string DiagramDir(std::string_view disease);
  // Record ids contain ':'; file names replace anything outside [A-Za-z0-9._-].
  static std::string SafeName(std::string_view text);

  cohort::Cohort LoadCohort() const;
  cohort::DiseaseRule LoadRule(std::string_view disease) const;
  DiseaseModel LoadModel(std::string_view disease) const;
  // Diseases with a registered model, sorted.
  std::vector<std::string> ModelDiseases() const;

  nlohmann::json ManifestJson() const;

 private:
  explicit Workspace(std::filesystem::path root) : root_(std::move(root)) {}
  void SaveManifest() const;

  std::filesystem::path root_;
  std::map<std::string, ArtifactEntry> artifacts_;
};

}  // namespace hdpd::interface

#endif  // HDPD_INTERFACE_WORKSPACE_H_

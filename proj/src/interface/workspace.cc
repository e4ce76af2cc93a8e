#include "hdpd/interface/workspace.h"

#include <cstdio>
#include <utility>

#include "hdpd/cohort/csv_io.h"
#include "hdpd/common/error.h"
#include "hdpd/common/json_file.h"

namespace hdpd::interface {

namespace fs = std::filesystem;

namespace {

constexpr char kManifest[] = "manifest.json";

}  // namespace

std::string ConfigHash(const nlohmann::json& config) {
  std::uint64_t h = 14695981039346656037ull;
  for (const unsigned char c : config.dump()) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Workspace Workspace::Create(const fs::path& root) {
  fs::create_directories(root);
  if (fs::exists(root / kManifest)) return Open(root);
  Workspace ws(root);
  ws.SaveManifest();
  return ws;
}

Workspace Workspace::Open(const fs::path& root) {
  const fs::path manifest = root / kManifest;
  if (!fs::exists(manifest)) {
    throw NotFound("workspace manifest not found: " + manifest.string());
  }
  const auto j = ReadJsonFile(manifest);
  Workspace ws(root);
  try {
    if (j.at("format").get<std::string>() != "hdpd-workspace") {
      throw ParseError("not a workspace manifest: " + manifest.string());
    }
    const int version = j.at("version").get<int>();
    if (version != kWorkspaceVersion) {
      throw VersionMismatch("workspace manifest version " + std::to_string(version) +
                            " is not supported (expected " +
                            std::to_string(kWorkspaceVersion) + ")");
    }
    for (const auto& [path, entry] : j.at("artifacts").items()) {
      ArtifactEntry a;
      a.kind = entry.at("kind").get<std::string>();
      a.seed = entry.at("seed").get<std::uint64_t>();
      a.config_hash = entry.at("config_hash").get<std::string>();
      ws.artifacts_.emplace(path, std::move(a));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed workspace manifest: " + std::string(e.what()));
  }
  for (const auto& [path, entry] : ws.artifacts_) {
    if (!fs::exists(ws.Resolve(path))) {
      throw NotFound("manifest references missing file: " + path);
    }
  }
  return ws;
}

fs::path Workspace::Resolve(std::string_view relative) const {
  return root_ / fs::path(std::string(relative));
}

bool Workspace::Has(std::string_view relative) const {
  return artifacts_.count(std::string(relative)) > 0;
}

void Workspace::Register(const std::string& relative, std::string kind, std::uint64_t seed,
                         std::string config_hash) {
  if (!fs::exists(Resolve(relative))) {
    throw NotFound("cannot register missing artifact: " + relative);
  }
  artifacts_[relative] = {std::move(kind), seed, std::move(config_hash)};
  SaveManifest();
}

std::string Workspace::RulePath(std::string_view disease) {
  return "rules/" + SafeName(disease) + ".json";
}

std::string Workspace::ModelPath(std::string_view disease) {
  return "models/" + SafeName(disease) + ".json";
}

std::string Workspace::DiagramDir(std::string_view disease) {
  return "diagrams/" + SafeName(disease);
}

std::string Workspace::SafeName(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                    c == '.' || c == '_' || c == '-';
    if (!ok) c = '_';
  }
  return out;
}

cohort::Cohort Workspace::LoadCohort() const {
  const auto schema = cohort::LoadSchema(Resolve("schema.json"));
  return cohort::LoadCohortCsv(Resolve("cohort.csv"), schema);
}

cohort::DiseaseRule Workspace::LoadRule(std::string_view disease) const {
  const auto path = Resolve(RulePath(disease));
  if (!fs::exists(path)) throw NotFound("no rule for disease '" + std::string(disease) + "'");
  return cohort::LoadRule(path);
}

DiseaseModel Workspace::LoadModel(std::string_view disease) const {
  const auto path = Resolve(ModelPath(disease));
  if (!fs::exists(path)) throw NotFound("no model for disease '" + std::string(disease) + "'");
  return DiseaseModel::FromJson(ReadJsonFile(path));
}

std::vector<std::string> Workspace::ModelDiseases() const {
  std::vector<std::string> out;
  for (const auto& [path, entry] : artifacts_) {
    if (entry.kind != "model") continue;
    // models/<disease>.json
    const fs::path p(path);
    out.push_back(p.stem().string());
  }
  return out;
}

nlohmann::json Workspace::ManifestJson() const {
  nlohmann::json artifacts = nlohmann::json::object();
  for (const auto& [path, e] : artifacts_) {
    artifacts[path] = {{"kind", e.kind}, {"seed", e.seed}, {"config_hash", e.config_hash}};
  }
  return {{"format", "hdpd-workspace"}, {"version", kWorkspaceVersion}, {"artifacts", artifacts}};
}

void Workspace::SaveManifest() const { WriteJsonFile(root_ / kManifest, ManifestJson()); }

}  // namespace hdpd::interface

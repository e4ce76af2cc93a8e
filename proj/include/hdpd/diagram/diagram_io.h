#ifndef HDPD_DIAGRAM_DIAGRAM_IO_H_
#define HDPD_DIAGRAM_DIAGRAM_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "hdpd/diagram/analytics.h"
#include "hdpd/diagram/diagram.h"
#include "hdpd/diagram/ward.h"
#include "json.hpp"

namespace hdpd::diagram {

inline constexpr int kDiagramFormatVersion = 1;

// Grids are nested [iy][ix]; unqueried probabilities are null.
nlohmann::json DiagramToJson(const Diagram& diagram);
// Throws ParseError on malformed input and VersionMismatch on an unknown
// version; the result is validated.
Diagram DiagramFromJson(const nlohmann::json& j);

void SaveDiagram(const std::filesystem::path& path, const Diagram& diagram);
Diagram LoadDiagram(const std::filesystem::path& path);

nlohmann::json SuperimposedToJson(const SuperimposedGrid& grid);

// Tab-separated matrix with a header row ("record" then the feature names).
std::string ContributionToTsv(const ContributionMatrix& matrix);
// Leaf order as "position<TAB>record" lines under a header.
std::string ClusterOrderToTsv(const ContributionMatrix& matrix, const Dendrogram& tree);

nlohmann::json ContributionToJson(const ContributionMatrix& matrix, const Dendrogram* tree);

}  // namespace hdpd::diagram

#endif  // HDPD_DIAGRAM_DIAGRAM_IO_H_

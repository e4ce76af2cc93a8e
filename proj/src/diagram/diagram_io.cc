#include "hdpd/diagram/diagram_io.h"

#include <cmath>
#include <sstream>

#include "hdpd/cohort/csv_io.h"
#include "hdpd/common/error.h"
#include "hdpd/common/json_file.h"

namespace hdpd::diagram {
namespace {

template <typename T, typename F>
nlohmann::json Nested(const std::vector<T>& flat, std::size_t nx, std::size_t ny, F convert) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t iy = 0; iy < ny; ++iy) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t ix = 0; ix < nx; ++ix) row.push_back(convert(flat[iy * nx + ix]));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename F>
void Flatten(const nlohmann::json& rows, std::size_t nx, std::size_t ny, const char* name,
             F consume) {
  if (!rows.is_array() || rows.size() != ny) {
    throw ParseError(std::string("diagram field '") + name + "' has the wrong row count");
  }
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != nx) {
      throw ParseError(std::string("diagram field '") + name + "' has the wrong row width");
    }
    for (const auto& v : row) consume(v);
  }
}

}  // namespace

nlohmann::json DiagramToJson(const Diagram& d) {
  nlohmann::json j = {
      {"format", "hdpd-diagram"},
      {"version", kDiagramFormatVersion},
      {"record_id", d.record_id},
      {"disease", d.disease},
      {"var_x", d.var_x},
      {"var_y", d.var_y},
      {"fx", d.fx},
      {"fy", d.fy},
      {"axis_x", d.axis_x},
      {"axis_y", d.axis_y},
      {"origin", {d.origin_x, d.origin_y}},
      {"threshold", d.threshold},
      {"mode", ToString(d.mode)},
      {"pattern", ToString(d.pattern)},
  };
  j["prob"] = Nested(d.prob, d.nx(), d.ny(), [](double p) {
    return std::isnan(p) ? nlohmann::json(nullptr) : nlohmann::json(p);
  });
  j["label"] = Nested(d.label, d.nx(), d.ny(), [](int v) { return v; });
  if (d.active()) {
    j["queried"] = Nested(d.queried, d.nx(), d.ny(), [](bool v) { return v; });
  }
  return j;
}

Diagram DiagramFromJson(const nlohmann::json& j) {
  if (!j.is_object() || j.value("format", "") != "hdpd-diagram") {
    throw ParseError("not a diagram file");
  }
  const int version = j.value("version", -1);
  if (version != kDiagramFormatVersion) {
    throw VersionMismatch("diagram format version " + std::to_string(version) +
                          " is not supported (expected " +
                          std::to_string(kDiagramFormatVersion) + "); rebuild the diagram");
  }
  Diagram d;
  try {
    d.record_id = j.at("record_id").get<std::string>();
    d.disease = j.at("disease").get<std::string>();
    d.var_x = j.at("var_x").get<std::string>();
    d.var_y = j.at("var_y").get<std::string>();
    d.fx = j.at("fx").get<std::size_t>();
    d.fy = j.at("fy").get<std::size_t>();
    d.axis_x = j.at("axis_x").get<std::vector<double>>();
    d.axis_y = j.at("axis_y").get<std::vector<double>>();
    d.origin_x = j.at("origin").at(0).get<std::size_t>();
    d.origin_y = j.at("origin").at(1).get<std::size_t>();
    d.threshold = j.at("threshold").get<double>();
    d.mode = ParseDiagramMode(j.at("mode").get<std::string>());
    d.pattern = ParseBoundaryPattern(j.at("pattern").get<std::string>());
    Flatten(j.at("prob"), d.nx(), d.ny(), "prob", [&](const nlohmann::json& v) {
      d.prob.push_back(v.is_null() ? std::nan("") : v.get<double>());
    });
    Flatten(j.at("label"), d.nx(), d.ny(), "label",
            [&](const nlohmann::json& v) { d.label.push_back(v.get<int>()); });
    if (j.contains("queried")) {
      Flatten(j.at("queried"), d.nx(), d.ny(), "queried",
              [&](const nlohmann::json& v) { d.queried.push_back(v.get<bool>()); });
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("diagram file: ") + e.what());
  } catch (const InvalidArgument& e) {
    throw ParseError(std::string("diagram file: ") + e.what());
  }
  d.Validate();
  return d;
}

void SaveDiagram(const std::filesystem::path& path, const Diagram& diagram) {
  WriteTextFile(path, DiagramToJson(diagram).dump() + "\n");
}

Diagram LoadDiagram(const std::filesystem::path& path) {
  return DiagramFromJson(ReadJsonFile(path));
}

nlohmann::json SuperimposedToJson(const SuperimposedGrid& grid) {
  return {{"record_id", grid.record_id},
          {"var_x", grid.var_x},
          {"var_y", grid.var_y},
          {"axis_x", grid.axis_x},
          {"axis_y", grid.axis_y},
          {"cells", Nested(grid.cells, grid.axis_x.size(), grid.axis_y.size(),
                           [](const std::vector<std::string>& c) { return c; })},
          {"free_cells", grid.FreeCells()}};
}

std::string ContributionToTsv(const ContributionMatrix& matrix) {
  std::ostringstream out;
  out << "record";
  for (const auto& f : matrix.features) out << '\t' << f;
  out << '\n';
  for (std::size_t r = 0; r < matrix.records.size(); ++r) {
    out << matrix.records[r];
    for (std::size_t c = 0; c < matrix.features.size(); ++c) {
      out << '\t' << cohort::FormatDouble(matrix.values(r, c));
    }
    out << '\n';
  }
  return out.str();
}

std::string ClusterOrderToTsv(const ContributionMatrix& matrix, const Dendrogram& tree) {
  std::ostringstream out;
  out << "position\trecord\n";
  for (std::size_t i = 0; i < tree.order.size(); ++i) {
    out << i << '\t' << matrix.records.at(tree.order[i]) << '\n';
  }
  return out.str();
}

nlohmann::json ContributionToJson(const ContributionMatrix& matrix, const Dendrogram* tree) {
  nlohmann::json values = nlohmann::json::array();
  for (std::size_t r = 0; r < matrix.records.size(); ++r) {
    const auto row = matrix.values.Row(r);
    values.push_back(std::vector<double>(row.begin(), row.end()));
  }
  nlohmann::json j = {{"records", matrix.records},
                      {"features", matrix.features},
                      {"values", std::move(values)}};
  if (tree != nullptr) {
    nlohmann::json merges = nlohmann::json::array();
    for (const auto& m : tree->merges) merges.push_back({m.a, m.b, m.height, m.size});
    std::vector<std::string> order;
    for (const std::size_t i : tree->order) order.push_back(matrix.records.at(i));
    j["cluster_order"] = order;
    j["merges"] = std::move(merges);
  }
  return j;
}

}  // namespace hdpd::diagram

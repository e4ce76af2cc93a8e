#include "hdpd/cohort/csv_io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "hdpd/common/error.h"

namespace hdpd::cohort {
namespace {

std::vector<std::string_view> SplitCsvLine(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return cells;
}

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

bool ParseDouble(std::string_view text, double& out) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size();
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

Cohort ParseCohortCsv(std::istream& in, const Schema& schema) {
  Cohort cohort(schema);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw ParseError("empty cohort file", 1);
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = SplitCsvLine(line);
  if (header.size() < 2 || Trim(header[0]) != "participant_id" ||
      Trim(header[1]) != "year") {
    throw ParseError("header must start with participant_id,year", line_no);
  }
  if (header.size() - 2 != schema.features.size()) {
    throw ParseError("header has " + std::to_string(header.size() - 2) +
                         " feature columns, schema declares " +
                         std::to_string(schema.features.size()),
                     line_no);
  }
  // column -> schema feature index
  std::vector<std::size_t> column_feature(header.size() - 2);
  std::vector<bool> used(schema.features.size(), false);
  for (std::size_t c = 2; c < header.size(); ++c) {
    const auto name = Trim(header[c]);
    const auto idx = schema.IndexOf(name);
    if (!idx) {
      throw ParseError("header column '" + std::string(name) +
                           "' is not in the schema",
                       line_no);
    }
    if (used[*idx]) {
      throw ParseError("header column '" + std::string(name) + "' repeated",
                       line_no);
    }
    used[*idx] = true;
    column_feature[c - 2] = *idx;
  }

  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const auto cells = SplitCsvLine(line);
    if (cells.size() != header.size()) {
      throw ParseError("expected " + std::to_string(header.size()) +
                           " cells, found " + std::to_string(cells.size()),
                       line_no);
    }
    Record record;
    record.participant_id = std::string(Trim(cells[0]));
    if (record.participant_id.empty()) {
      throw ParseError("empty participant_id", line_no);
    }
    const auto year_text = Trim(cells[1]);
    const auto [yptr, yec] = std::from_chars(
        year_text.data(), year_text.data() + year_text.size(), record.year);
    if (yec != std::errc() || yptr != year_text.data() + year_text.size()) {
      throw ParseError("year '" + std::string(year_text) + "' is not an integer",
                       line_no);
    }
    record.values.assign(schema.features.size(), std::nullopt);
    for (std::size_t c = 2; c < cells.size(); ++c) {
      const auto cell = Trim(cells[c]);
      if (cell.empty()) continue;
      const auto& meta = schema.features[column_feature[c - 2]];
      if (meta.kind == FeatureKind::kCategorical) {
        const auto it = std::find(meta.levels.begin(), meta.levels.end(), cell);
        if (it == meta.levels.end()) {
          throw ParseError("unknown level '" + std::string(cell) +
                               "' for feature '" + meta.name + "'",
                           line_no);
        }
        record.values[column_feature[c - 2]] =
            static_cast<double>(it - meta.levels.begin());
        continue;
      }
      double v = 0;
      if (!ParseDouble(cell, v)) {
        throw ParseError("value '" + std::string(cell) + "' for feature '" +
                             meta.name + "' is not numeric",
                         line_no);
      }
      record.values[column_feature[c - 2]] = v;
    }
    try {
      cohort.AddRecord(std::move(record));
    } catch (const InvalidArgument& e) {
      throw ParseError(e.what(), line_no);
    }
  }
  return cohort;
}

Cohort LoadCohortCsv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open cohort file " + path.string());
  return ParseCohortCsv(in, schema);
}

void WriteCohortCsv(std::ostream& out, const Cohort& cohort) {
  const auto& features = cohort.features();
  out << "participant_id,year";
  for (const auto& f : features) out << ',' << f.name;
  out << '\n';
  for (const auto& r : cohort.records()) {
    out << r.participant_id << ',' << r.year;
    for (std::size_t j = 0; j < features.size(); ++j) {
      out << ',';
      if (!r.values[j]) continue;
      if (features[j].kind == FeatureKind::kCategorical) {
        out << features[j].levels[static_cast<std::size_t>(*r.values[j])];
      } else {
        out << FormatDouble(*r.values[j]);
      }
    }
    out << '\n';
  }
}

void SaveCohortCsv(const std::filesystem::path& path, const Cohort& cohort) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  WriteCohortCsv(out, cohort);
}

nlohmann::json SchemaToJson(const Schema& schema) {
  nlohmann::json features = nlohmann::json::array();
  for (const auto& f : schema.features) {
    nlohmann::json j = {{"name", f.name}, {"kind", ToString(f.kind)}};
    if (!f.levels.empty()) j["levels"] = f.levels;
    if (!f.unit.empty()) j["unit"] = f.unit;
    if (f.risk_direction) j["risk_direction"] = ToString(*f.risk_direction);
    features.push_back(std::move(j));
  }
  return {{"features", features}, {"excluded", schema.excluded}};
}

Schema SchemaFromJson(const nlohmann::json& j) {
  Schema schema;
  try {
    for (const auto& f : j.at("features")) {
      FeatureMeta meta;
      meta.name = f.at("name").get<std::string>();
      meta.kind = ParseFeatureKind(f.value("kind", "continuous"));
      meta.levels = f.value("levels", std::vector<std::string>{});
      meta.unit = f.value("unit", "");
      if (f.contains("risk_direction")) {
        meta.risk_direction =
            ParseRiskDirection(f.at("risk_direction").get<std::string>());
      }
      schema.features.push_back(std::move(meta));
    }
    schema.excluded = j.value("excluded", std::vector<std::string>{});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("schema: ") + e.what());
  }
  schema.Validate();
  return schema;
}

Schema LoadSchema(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFound("cannot open schema file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
  return SchemaFromJson(j);
}

void SaveSchema(const std::filesystem::path& path, const Schema& schema) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << SchemaToJson(schema).dump(2) << '\n';
}

}  // namespace hdpd::cohort

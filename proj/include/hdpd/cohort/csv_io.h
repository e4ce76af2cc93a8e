#ifndef HDPD_COHORT_CSV_IO_H_
#define HDPD_COHORT_CSV_IO_H_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "hdpd/cohort/cohort.h"
#include "json.hpp"

namespace hdpd::cohort {

// Cohort file: comma-separated, header "participant_id,year,<feature...>"
// (feature columns in any order, exactly the schema's names), empty cell =
// missing. Numeric cells must parse completely; categorical cells hold a level
// name. Errors are ParseError carrying the 1-based line number.
Cohort ParseCohortCsv(std::istream& in, const Schema& schema);
Cohort LoadCohortCsv(const std::filesystem::path& path, const Schema& schema);

// Writes in schema column order with shortest round-trip number formatting.
void WriteCohortCsv(std::ostream& out, const Cohort& cohort);
void SaveCohortCsv(const std::filesystem::path& path, const Cohort& cohort);

nlohmann::json SchemaToJson(const Schema& schema);
Schema SchemaFromJson(const nlohmann::json& j);
Schema LoadSchema(const std::filesystem::path& path);
void SaveSchema(const std::filesystem::path& path, const Schema& schema);

// Shortest decimal text that parses back to exactly `v`.
std::string FormatDouble(double v);

}  // namespace hdpd::cohort

#endif  // HDPD_COHORT_CSV_IO_H_

#ifndef HDPD_COMMON_JSON_FILE_H_
#define HDPD_COMMON_JSON_FILE_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "json.hpp"

namespace hdpd {

// Whole-file read; throws NotFound when the file cannot be opened.
std::string ReadTextFile(const std::filesystem::path& path);
// Creates parent directories; throws Error on failure.
void WriteTextFile(const std::filesystem::path& path, std::string_view text);

// Throws ParseError prefixed with `what` on malformed JSON.
nlohmann::json ParseJson(std::string_view text, std::string_view what);
nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteJsonFile(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace hdpd

#endif  // HDPD_COMMON_JSON_FILE_H_

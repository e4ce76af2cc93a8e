#ifndef HDPD_COMMON_LOGGING_H_
#define HDPD_COMMON_LOGGING_H_

#include <memory>

#include <spdlog/logger.h>

namespace hdpd {

// Shared library logger (stderr). Warnings about clamped or skipped inputs go
// here; tests silence it with SetLogLevel(spdlog::level::off).
spdlog::logger& Log();

void SetLogLevel(spdlog::level::level_enum level);

}  // namespace hdpd

#endif  // HDPD_COMMON_LOGGING_H_

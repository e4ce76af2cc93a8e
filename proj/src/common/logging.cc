#include "hdpd/common/logging.h"

#include <spdlog/sinks/stdout_color_sinks.h>

namespace hdpd {

spdlog::logger& Log() {
  static std::shared_ptr<spdlog::logger> logger = [] {
    auto l = spdlog::stderr_color_mt("hdpd");
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::info);
    return l;
  }();
  return *logger;
}

void SetLogLevel(spdlog::level::level_enum level) { Log().set_level(level); }

}  // namespace hdpd

#include "sqeval/logging.hpp"

#include <cstdlib>
#include <mutex>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace sqeval {

spdlog::logger& log() {
  static std::once_flag once;
  static std::shared_ptr<spdlog::logger> logger;
  std::call_once(once, [] {
    logger = spdlog::get("sqeval");
    if (!logger) logger = spdlog::stderr_color_mt("sqeval");
    logger->set_pattern("[%l] %v");
    auto level = spdlog::level::warn;
    if (const char* env = std::getenv("SQ_EVAL_LOG"); env != nullptr && *env != '\0') {
      level = spdlog::level::from_str(env);
    }
    logger->set_level(level);
  });
  return *logger;
}

}  // namespace sqeval

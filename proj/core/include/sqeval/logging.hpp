#pragma once

#include <memory>

#include <spdlog/logger.h>

namespace sqeval {

/// Library logger ("sqeval"), writing to stderr. The level comes from the
/// SQ_EVAL_LOG environment variable (trace|debug|info|warn|error|off),
/// defaulting to warn.
[[nodiscard]] spdlog::logger& log();

}  // namespace sqeval

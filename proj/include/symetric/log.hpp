#pragma once

#include <spdlog/spdlog.h>

#include <utility>

namespace symetric::log {

/// Library logger writing to stderr. Level comes from SYMETRIC_LOG
/// (trace, debug, info, warn, error, off); default warn.
spdlog::logger& logger();

template <typename... Args>
void debug(fmt::format_string<Args...> fmt, Args&&... args) {
  logger().debug(fmt, std::forward<Args>(args)...);
}

template <typename... Args>
void info(fmt::format_string<Args...> fmt, Args&&... args) {
  logger().info(fmt, std::forward<Args>(args)...);
}

template <typename... Args>
void warn(fmt::format_string<Args...> fmt, Args&&... args) {
  logger().warn(fmt, std::forward<Args>(args)...);
}

}  // namespace symetric::log

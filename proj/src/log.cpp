#include "log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>

#include <string>

#include "mlrec/error.hpp"
#include "mlrec/log.hpp"

namespace mlrec {

namespace detail {

spdlog::logger& logger() {
  static const std::shared_ptr<spdlog::logger> instance = [] {
    auto sink = std::make_shared<spdlog::sinks::stderr_color_sink_mt>();
    auto l = std::make_shared<spdlog::logger>("mlrec", sink);
    l->set_pattern("[%l] %v");
    l->set_level(spdlog::level::warn);
    return l;
  }();
  return *instance;
}

}  // namespace detail

void set_log_level(std::string_view level) {
  const auto parsed = spdlog::level::from_str(std::string(level));
  if (parsed == spdlog::level::off && level != "off") {
    throw InputError("unknown log level '" + std::string(level) + "'");
  }
  detail::logger().set_level(parsed);
}

void log_warning(std::string_view message) { detail::logger().warn("{}", message); }

}  // namespace mlrec

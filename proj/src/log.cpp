#include "synapcount/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <mutex>
#include <string>

namespace synapcount {

void init_logging_from_env() {
  // Diagnostics never share stdout with command output.
  static std::once_flag once;
  std::call_once(once, [] {
    auto logger = spdlog::get("synapcount");
    if (!logger) logger = spdlog::stderr_color_mt("synapcount");
    spdlog::set_default_logger(logger);
  });
  const char* env = std::getenv("SYNAPCOUNT_LOG");
  const std::string level = env ? env : "warn";
  if (level == "error")
    spdlog::set_level(spdlog::level::err);
  else if (level == "info")
    spdlog::set_level(spdlog::level::info);
  else if (level == "debug")
    spdlog::set_level(spdlog::level::debug);
  else
    spdlog::set_level(spdlog::level::warn);
}

}  // namespace synapcount

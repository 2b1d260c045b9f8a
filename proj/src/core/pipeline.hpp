#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "config.hpp"

namespace porohom {

enum class ExitStatus : int {
  ok = 0,
  check_failed = 1,
  config_error = 2,
  run_error = 3,
  io_error = 4,
  usage_error = 64,
};

struct RunFlags {
  bool poisson_every_step = false;
  bool explicit_time = false;
};

/// Command-line overrides, mirrored into the config echo so the hash covers them.
void apply_flags(RunConfig& config, const RunFlags& flags);

struct DispatchResult {
  ExitStatus status = ExitStatus::ok;
  std::string message;
  std::vector<std::string> failed_checks;
};

const std::vector<std::string>& subcommands();

/// Runs one pipeline and writes its artifacts plus manifest.json into `out`.
/// Library errors are mapped to exit statuses; nothing escapes.
DispatchResult dispatch(const std::string& subcommand, const RunConfig& config,
                        const std::filesystem::path& out);

}  // namespace porohom

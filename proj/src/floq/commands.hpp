#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "floq/config.hpp"
#include "floq/io.hpp"

namespace floq {

struct CommandOptions {
  std::string a2_scan;  // "start:stop:step" for the spectrum command
};

struct CommandResult {
  std::filesystem::path directory;
  std::vector<std::string> files;
  json summary;
};

std::vector<std::string> command_names();

/// dynamics | spectrum | fbs | filter | sweep | converge. The config is validated before
/// any computation and every file is written only after all results are available.
CommandResult run_command(const std::string& name, const RunConfig& cfg, const CommandOptions& options = {});

}  // namespace floq

#pragma once

#include <string>
#include <vector>

#include "cli/config.hpp"

namespace gaplabel::cli {

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandContext {
  const RunConfig& config;
  int workers = 1;
};

std::vector<OutputFile> cmd_ids(const CommandContext& ctx);
std::vector<OutputFile> cmd_rot(const CommandContext& ctx);
std::vector<OutputFile> cmd_gaps(const CommandContext& ctx);
std::vector<OutputFile> cmd_uh(const CommandContext& ctx);
std::vector<OutputFile> cmd_duality(const CommandContext& ctx);
std::vector<OutputFile> cmd_perturb(const CommandContext& ctx);
std::vector<OutputFile> cmd_star(const CommandContext& ctx);

/// "gaplabel <version> config=<hash>"
std::string provenance(const RunConfig& config);

}  // namespace gaplabel::cli

#pragma once

#include <string>
#include <vector>

#include "varlp/config.hpp"

namespace varlp::cli {

/// Names of the available subcommands, in help order.
const std::vector<std::string>& command_names();

/// Config schema (known keys, defaults, descriptions) of one subcommand.
const std::vector<KeySpec>& schema_for(const std::string& command);

/// Runs a subcommand against a fully resolved configuration.
int run(const std::string& command, const ResolvedConfig& cfg);

}  // namespace varlp::cli

#pragma once

#include <string>

#include "sldisc/config.hpp"

namespace sldisc {

/// Runs one subcommand (forward, invert, invert-partial, roundtrip,
/// stability, basis-check) and writes its files plus report.txt and
/// config_effective.txt into out_dir. Returns the report.txt text.
std::string run_command(const RunConfig& cfg, const std::string& command,
                        const std::string& out_dir);

}  // namespace sldisc

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "elastoborn/config.hpp"

namespace elastoborn {

enum ExitCode { kExitPass = 0, kExitError = 1, kExitFail = 2 };

const std::vector<std::string>& command_names();

// Runs one command, writes <out>/<command>.json, <out>/effective_config.json and
// any field or CSV artifacts. Errors are reported on `log` and map to kExitError.
int run(const std::string& command, const RunConfig& cfg, std::ostream& log);

// The report of the last run with the "runtime" and "threads" entries removed,
// as compact JSON. Used for determinism checks.
std::string strip_timing(const std::string& report_json);

}  // namespace elastoborn

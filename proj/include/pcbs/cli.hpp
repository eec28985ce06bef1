#pragma once

namespace pcbs::cli {

/// Entry point for the pcbs tool. Subcommands: sample | stats | bench |
/// loss-check. Returns the process exit code: 0 success, 1 usage error,
/// 2 data/format error, 3 check failure.
int run(int argc, const char* const* argv);

} // namespace pcbs::cli

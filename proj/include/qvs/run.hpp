#pragma once

#include <string>

#include "qvs/config.hpp"

namespace qvs {

// Process exit codes shared by the library runner and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;     // bad config / bad usage
inline constexpr int kExitNumerical = 3;  // task failed numerically
inline constexpr int kExitPartial = 4;    // some work items failed (non-strict)
inline constexpr int kExitIo = 5;         // filesystem failure

struct RunOptions {
  int threads = 0;            // 0 = library default
  bool strict = false;        // OR'd with the config's flag
  std::string out_override;   // nonempty replaces config.output_dir
};

/// Execute the configured task, write its artifacts and a manifest.json into
/// the output directory, and return the process exit code.  Errors are
/// reported on stderr; the manifest is written atomically as the last file
/// whenever the run got far enough to produce anything.
int run_task(const RunConfig& cfg, const RunOptions& opt);

}  // namespace qvs

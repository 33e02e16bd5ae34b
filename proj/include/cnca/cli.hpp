#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cnca/config.hpp"

namespace cnca {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    /// Bad flags, unknown names, inconsistent configuration.
    kExitUsage = 2,
    /// Missing or malformed input files and checkpoints.
    kExitData = 3,
    /// Non-finite loss or scores.
    kExitNumeric = 4,
    /// replay produced outputs that differ from the manifest.
    kExitReplayMismatch = 5,
};

/// Toolkit version string recorded in manifests.
const char* version();

/**
 * Runs one command line (args excludes the program name) and returns its
 * exit code. Normal output goes to `out`, diagnostics to `err`.
 */
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Training config from defaults_for(metric) < config file < CNCA_<KEY>
/// environment variables < flags. The metric itself is resolved first with
/// the same precedence. `env` maps upper-case variable names to values.
TrainingConfig resolve_config(const std::string& config_path, const std::map<std::string, std::string>& env,
                              const std::map<std::string, std::string>& flags);

/// CNCA_* variables of the current process environment.
std::map<std::string, std::string> cnca_environment();

/// FNV-1a digest of a file's content with timing removed: in tab-separated
/// files every column headed "seconds" and every "# seconds..." summary line
/// are skipped. Other files are hashed byte for byte.
std::string stable_digest(const std::filesystem::path& path);

}  // namespace cnca

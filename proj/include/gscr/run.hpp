#pragma once

#include <string>
#include <vector>

#include "gscr/config.hpp"
#include "gscr/error.hpp"

namespace gscr {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitConfigError = 2;

struct RunManifest {
    std::string config_hash;
    std::string tool_version;
    std::string timestamp;  // UTC, ISO 8601
    std::string experiment;
    std::vector<std::string> files;
    std::vector<std::string> warnings;
    std::string summary;  // one human-readable line for the terminal
};

std::string tool_version();

/// Runs the configured experiment, writes its outputs and manifest.json into
/// cfg.output and returns the manifest. Throws Error on failure.
RunManifest run(StudyConfig const& cfg);

int exit_code(ErrorCode code) noexcept;

/// Single-line JSON record for stderr: {"code":...,"exit":...,"message":...}.
std::string error_record(Error const& e);

}  // namespace gscr

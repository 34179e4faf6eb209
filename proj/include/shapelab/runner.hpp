#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "shapelab/config.hpp"

namespace shapelab {

/// CLI exit codes.
enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitNoConvergence = 3,
    kExitIo = 4,
};

struct RunOptions {
    int jobs = 1;
    std::optional<std::string> out_override;
    std::optional<std::uint64_t> seed_override;
    /// Cache directory; falls back to $SHAPELAB_CACHE, then <out>/cache.
    std::optional<std::string> cache_override;
};

struct RunStatus {
    int exit_code = kExitOk;
    std::string message;
};

/// Executes the configured experiment and writes its artifacts plus a
/// manifest into the output directory. Idempotent for identical config and
/// seed. Non-convergence still writes artifacts, flags the manifest, and
/// reports exit code 3.
RunStatus run_experiment(ExperimentConfig cfg, const RunOptions& opts);

}  // namespace shapelab

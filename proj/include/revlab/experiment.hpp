#pragma once

#include <string>
#include <vector>

namespace revlab {

// Config-driven experiment runner.  Parses and validates the JSON config,
// dispatches on "kind", writes CSV/SVG artifacts plus a run manifest into the
// config's output directory.  Throws ConfigError for schema problems and
// NumericalError for runtime failures; the CLI maps these to exit codes 2/3.
struct RunOverrides {
    int workers = 0;            // 0: take from config / hardware
    std::string cache_dir;      // empty: take from config
};

std::vector<std::string> run_experiment(const std::string& config_path,
                                        const RunOverrides& overrides = {});

// Prints a dry-run resource plan (no computation).
void describe_experiment(const std::string& config_path);

}  // namespace revlab

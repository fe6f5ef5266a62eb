#pragma once

#include <string>
#include <vector>

#include "arratia/config.hpp"

namespace arratia {

struct RunResult {
    int exit_code = 0;  // 0 ok, 1 failed checks, 2 config error
    std::string run_dir;
    std::vector<std::string> messages;
};

// Executes the configured study: writes the manifest, trajectory CSVs and
// report JSONs into a content-addressed subdirectory of the output root.
// Deterministic: identical configs produce byte-identical artifacts.
RunResult run(const RunConfig& cfg);

// load_config + run; config errors surface as exit code 2 with the
// file:line message, nothing written.
RunResult run_from_file(const std::string& config_path);

}  // namespace arratia

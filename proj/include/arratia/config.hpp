#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "arratia/quantile.hpp"
#include "arratia/sheet.hpp"

namespace arratia {

/// Config/manifest parse or validation failure, carrying "file:line: what".
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class RunMode { Coalescing, Smooth, Compare, Verify, Ito, SheetCheck, MassStats };

std::string to_string(RunMode mode);
std::optional<RunMode> parse_mode(const std::string& name);

/// Resolved run configuration. The manifest round-trips through the same
/// flat key-value format the user writes.
struct RunConfig {
    RunMode mode = RunMode::Coalescing;
    GridSpec grid{64, 512, 0.5};
    InitialSpec initial;
    double sigma = 0.1;
    double epsilon = 0.01;
    std::optional<double> eta;  // defaults to sigma/4 when unset
    std::int64_t seed = 1;
    int replicas = 200;
    int refine_depth = 0;
    bool isotonic_repair = false;
    std::vector<double> compare_sigmas{0.2, 0.1, 0.05};
    std::vector<double> compare_epsilons{0.1, 0.01, 0.05};
    double mass_beta = 1.2;
    std::vector<double> mass_t_points{0.05, 0.1, 0.2, 0.4};
    std::string output_dir;  // empty = env ARRATIA_OUTPUT_ROOT or "runs"

    QuantileState initial_state() const { return from_initial(initial, grid.m_space); }
};

// Parses the flat "key = value" file (dotted namespaces, '#' comments).
// Rejects unknown or duplicated keys with a file:line message; validates
// mode-specific requirements.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& source_name);

// Canonical resolved manifest: fixed key order, every default made explicit,
// plus tool_version and config_hash lines.
std::string manifest_text(const RunConfig& cfg);

// FNV-1a over the canonical manifest body (hash line excluded).
std::string config_hash(const RunConfig& cfg);

extern const char* const kToolVersion;

}  // namespace arratia

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "monoproj/smoothers.hpp"

namespace monoproj {

enum ExitCode : int {
    kExitOk = 0,
    kExitInput = 2,
    kExitNumerical = 3,
    kExitNonConvergence = 4,
};

// Parameters of one CLI run. Anything left unset takes the per-command default.
struct RunConfig {
    std::string command;
    std::filesystem::path input;
    std::filesystem::path out_dir = ".";
    std::filesystem::path out;  // simulate / coverage table; default <out_dir>/<command>.csv
    SmootherSpec smoother = KernelSpec{};
    std::size_t grid_nodes = 0;  // 0: per-dimension default
    std::optional<double> tol;
    std::optional<std::size_t> max_sweeps;  // default 500; kReplicateMaxSweeps for resampling commands
    std::uint64_t seed = 0;
    bool decreasing = false;
    bool clamp_unit = false;
    // bootstrap/toxicology: B (default 2000); simulate: 50; coverage: outer replicates, 2000.
    std::optional<std::size_t> replicates;
    std::size_t bootstrap_replicates = 2000;  // coverage only
    double level = 0.95;
    std::string catalog = "1d";
    std::vector<std::string> functions;  // empty: command default
    std::vector<double> sigmas;          // empty: command default
    std::size_t n = 100;
};

nlohmann::json to_json(const RunConfig& config);
// Overlays the keys present in `j` onto `config`; unknown keys are rejected.
void apply_config_json(RunConfig& config, const nlohmann::json& j);

// Entry point behind the `monoproj` executable. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace monoproj

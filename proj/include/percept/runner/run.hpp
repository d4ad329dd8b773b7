#pragma once

#include "percept/runner/config.hpp"

namespace percept::runner {

/// Outcome of one scenario run. `document` is the content of summary.json:
/// scenario, resolved parameter echo, seed, verdicts, metrics, wall_clock_s.
struct RunSummary {
    json document;
    std::filesystem::path output_dir;
};

/// Validates the config (throwing ConfigValidationError with every
/// violation), runs the scenario, and writes trajectory.csv, summary.json,
/// and plot.svg into the output directory. Simulation verdicts (diverted,
/// unstable, not controllable, wall contact, ...) are results, not errors.
RunSummary run(const ScenarioConfig& config);

} // namespace percept::runner

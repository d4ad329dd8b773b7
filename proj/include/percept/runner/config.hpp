#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "percept/errors.hpp"

namespace percept::runner {

using json = nlohmann::json;

/// One experiment run: a scenario name, its parameter map, a seed, and the
/// output directory. The on-disk form is a single JSON document.
struct ScenarioConfig {
    std::string scenario;
    json parameters = json::object();
    std::uint64_t seed = 0;
    std::filesystem::path output_dir;
};

/// Carries every violation found, not just the first.
class ConfigValidationError : public Error {
public:
    explicit ConfigValidationError(std::vector<std::string> violations);
    std::vector<std::string> violations;
};

enum class ParamType { number, integer, string, array, boolean };

struct ParamSpec {
    std::string key;
    ParamType type = ParamType::number;
    bool required = false;
    json default_value; // null when the key is required
    std::optional<double> min;
    bool min_exclusive = false;
    std::optional<double> max;
    bool max_exclusive = false;
    std::vector<std::string> choices; // for string parameters
    std::string description;
};

struct ScenarioSchema {
    std::string name;
    std::string summary;
    std::vector<ParamSpec> params;
};

const std::vector<ScenarioSchema>& scenario_catalogue();
const ScenarioSchema* find_schema(const std::string& scenario);

/// Parses the top-level config document (unknown top-level keys are kept and
/// reported by validate()).
ScenarioConfig config_from_json(const json& doc);
json config_to_json(const ScenarioConfig& config);

/// Returns every violation: unknown scenario, missing required keys, type,
/// range, and unknown-parameter errors. Empty means valid.
std::vector<std::string> validate(const ScenarioConfig& config);

/// Parameters with schema defaults filled in; call only on a valid config.
json resolved_parameters(const ScenarioConfig& config);

/// Applies a CLI override "dotted.path=value" into a config document; the
/// value is parsed as JSON when possible and kept as a string otherwise.
void apply_override(json& doc, const std::string& assignment);

/// Human-readable catalogue of scenarios and their parameters.
std::string describe_scenarios();

} // namespace percept::runner

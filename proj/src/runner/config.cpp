#include "percept/runner/config.hpp"

#include <sstream>

namespace percept::runner {

namespace {

std::string join(const std::vector<std::string>& items, const char* sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

ParamSpec num(std::string key, bool required, json def, std::optional<double> min,
              bool min_excl, std::optional<double> max, bool max_excl, std::string desc) {
    ParamSpec p;
    p.key = std::move(key);
    p.type = ParamType::number;
    p.required = required;
    p.default_value = std::move(def);
    p.min = min;
    p.min_exclusive = min_excl;
    p.max = max;
    p.max_exclusive = max_excl;
    p.description = std::move(desc);
    return p;
}

ParamSpec integer(std::string key, json def, double min, std::string desc) {
    ParamSpec p;
    p.key = std::move(key);
    p.type = ParamType::integer;
    p.required = false;
    p.default_value = std::move(def);
    p.min = min;
    p.description = std::move(desc);
    return p;
}

ParamSpec str(std::string key, json def, std::vector<std::string> choices, std::string desc) {
    ParamSpec p;
    p.key = std::move(key);
    p.type = ParamType::string;
    p.required = false;
    p.default_value = std::move(def);
    p.choices = std::move(choices);
    p.description = std::move(desc);
    return p;
}

ParamSpec arr(std::string key, bool required, json def, std::string desc) {
    ParamSpec p;
    p.key = std::move(key);
    p.type = ParamType::array;
    p.required = required;
    p.default_value = std::move(def);
    p.description = std::move(desc);
    return p;
}

std::vector<ParamSpec> corridor_base() {
    return {
        num("f", true, {}, 0.0, true, {}, false, "camera focal length (tan of half-cone)"),
        num("R", true, {}, 0.0, true, {}, false, "corridor half width (walls at +-R)"),
        num("v", true, {}, 0.0, true, {}, false, "forward speed"),
        num("k", true, {}, 0.0, true, {}, false, "steering gain"),
        num("x0", false, 1.0, {}, false, {}, false, "initial lateral position"),
        num("y0", false, 0.0, {}, false, {}, false, "initial along-corridor position"),
        num("theta0_deg", false, 100.0, 0.0, true, 180.0, true,
            "initial heading in degrees (90 = parallel to walls)"),
        num("t_end", true, {}, 0.0, true, {}, false, "simulation horizon (s)"),
        num("dt", false, 1e-3, 0.0, true, {}, false, "integrator step (s)"),
    };
}

std::vector<ScenarioSchema> build_catalogue() {
    std::vector<ScenarioSchema> cat;

    cat.push_back({"corridor", "continuous two-pixel tau-balance steering", corridor_base()});

    {
        auto p = corridor_base();
        p.push_back(num("h", true, {}, 0.0, true, {}, false,
                        "sample-and-hold interval (rounded to a multiple of dt)"));
        cat.push_back({"corridor-sampled", "sample-and-hold tau-balance steering", p});
    }
    {
        auto p = corridor_base();
        p.push_back(integer("n_per_side", 200, 1, "receptors per wall"));
        p.push_back(num("dropout_prob", false, 0.3, 0.0, false, 1.0, true,
                        "per-step receptor dropout probability"));
        p.push_back(num("sigma", false, 0.2, 0.0, false, {}, false,
                        "tau noise standard deviation (s)"));
        p.push_back(num("jitter", false, 0.2, 0.0, false, 0.5, true,
                        "uniform receptor-position jitter amplitude"));
        cat.push_back({"corridor-noisy", "steering from averaged noisy receptor taus", p});
    }
    {
        std::vector<ParamSpec> p{
            str("system", "kchannel",
                {"double-integrator-1ch", "double-integrator-2ch", "kchannel"},
                "named input-matrix variant of the planar drift"),
            arr("pattern", false, {}, "0/1 channel availability mask (default: all on)"),
            arr("x0", false, json::array({0.0, 0.0}), "start state"),
            arr("x1", true, {}, "target state"),
            num("T", false, 1.0, 0.0, true, {}, false, "steering horizon (s)"),
            num("dt", false, 1e-3, 0.0, true, {}, false, "integrator step (s)"),
            str("method", "quadrature", {"quadrature", "series"}, "Gramian evaluation method"),
            integer("panels", 512, 2, "Simpson panel count (even)"),
        };
        cat.push_back({"min-energy", "minimum-energy steering of the planar LTI system", p});
    }
    {
        std::vector<ParamSpec> p{
            integer("n_phi", 64, 4, "number of unit-circle targets"),
            num("T", false, 1.0, 0.0, true, {}, false, "steering horizon (s)"),
            integer("panels", 512, 2, "Simpson panel count (even)"),
        };
        cat.push_back({"cost-sweep",
                       "minimum-energy cost vs target angle for 1/2/3 input channels", p});
    }
    {
        std::vector<ParamSpec> p{
            str("system", "kchannel",
                {"double-integrator-1ch", "double-integrator-2ch", "kchannel"},
                "named input-matrix variant"),
            num("T", false, 1.0, 0.0, true, {}, false, "Gramian horizon (s)"),
        };
        cat.push_back({"channel-classify",
                       "controllability verdict for every channel availability pattern", p});
    }
    {
        std::vector<ParamSpec> p{
            num("goal_phi_deg", false, 0.0, {}, false, {}, false,
                "goal angle on the unit circle (degrees)"),
            str("construction", "hat_A", {"particular", "hat_A", "min_norm"},
                "offset construction"),
            arr("pattern", false, json::array({1, 1, 1}), "0/1 channel availability mask"),
            arr("x0", false, json::array({0.0, 0.0}), "start state"),
            num("t_end", false, 30.0, 0.0, true, {}, false, "simulation horizon (s)"),
            num("dt", false, 1e-3, 0.0, true, {}, false, "integrator step (s)"),
        };
        cat.push_back({"dropout",
                       "set-point controller under channel dropout (three-channel system)", p});
    }
    {
        std::vector<ParamSpec> p{
            num("p_switch", false, 0.5, 0.0, false, 1.0, false,
                "probability of switching controller at each dwell boundary"),
            num("dwell", false, 0.05, 0.0, true, {}, false,
                "dwell time between switching decisions (s)"),
            arr("pattern", false, json::array({0, 1, 1}), "0/1 channel availability mask"),
            arr("x0", false, json::array({0.0, 0.0}), "start state"),
            arr("target", false,
                json::array({0.7071067811865476, 0.7071067811865476}),
                "reference point for the min-distance statistic"),
            num("t_end", false, 30.0, 0.0, true, {}, false, "simulation horizon (s)"),
            num("dt", false, 1e-3, 0.0, true, {}, false, "integrator step (s)"),
        };
        cat.push_back({"markov",
                       "Markov-modulated switching between the (1,0)- and (0,1)-controllers", p});
    }
    return cat;
}

} // namespace

ConfigValidationError::ConfigValidationError(std::vector<std::string> violations_)
    : Error("invalid configuration:\n  " + join(violations_, "\n  ")),
      violations(std::move(violations_)) {}

const std::vector<ScenarioSchema>& scenario_catalogue() {
    static const std::vector<ScenarioSchema> cat = build_catalogue();
    return cat;
}

const ScenarioSchema* find_schema(const std::string& scenario) {
    for (const ScenarioSchema& s : scenario_catalogue())
        if (s.name == scenario) return &s;
    return nullptr;
}

ScenarioConfig config_from_json(const json& doc) {
    if (!doc.is_object()) throw ParameterError("config document must be a JSON object");
    ScenarioConfig cfg;
    if (doc.contains("scenario") && doc["scenario"].is_string())
        cfg.scenario = doc["scenario"].get<std::string>();
    if (doc.contains("parameters") && doc["parameters"].is_object())
        cfg.parameters = doc["parameters"];
    if (doc.contains("seed") && doc["seed"].is_number())
        cfg.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("output_dir") && doc["output_dir"].is_string())
        cfg.output_dir = doc["output_dir"].get<std::string>();
    return cfg;
}

json config_to_json(const ScenarioConfig& config) {
    json doc;
    doc["scenario"] = config.scenario;
    doc["parameters"] = config.parameters;
    doc["seed"] = config.seed;
    if (!config.output_dir.empty()) doc["output_dir"] = config.output_dir.string();
    return doc;
}

namespace {

bool type_matches(const ParamSpec& spec, const json& v) {
    switch (spec.type) {
        case ParamType::number: return v.is_number();
        case ParamType::integer: return v.is_number_integer();
        case ParamType::string: return v.is_string();
        case ParamType::array: return v.is_array();
        case ParamType::boolean: return v.is_boolean();
    }
    return false;
}

const char* type_name(ParamType t) {
    switch (t) {
        case ParamType::number: return "number";
        case ParamType::integer: return "integer";
        case ParamType::string: return "string";
        case ParamType::array: return "array";
        case ParamType::boolean: return "boolean";
    }
    return "?";
}

void check_value(const ParamSpec& spec, const json& v, std::vector<std::string>& out) {
    if (!type_matches(spec, v)) {
        out.push_back("parameter '" + spec.key + "' must be a " + type_name(spec.type));
        return;
    }
    if (spec.type == ParamType::number || spec.type == ParamType::integer) {
        const double x = v.get<double>();
        if (spec.min) {
            const bool bad = spec.min_exclusive ? !(x > *spec.min) : !(x >= *spec.min);
            if (bad)
                out.push_back("parameter '" + spec.key + "' = " + v.dump() + " must be " +
                              (spec.min_exclusive ? "> " : ">= ") + std::to_string(*spec.min));
        }
        if (spec.max) {
            const bool bad = spec.max_exclusive ? !(x < *spec.max) : !(x <= *spec.max);
            if (bad)
                out.push_back("parameter '" + spec.key + "' = " + v.dump() + " must be " +
                              (spec.max_exclusive ? "< " : "<= ") + std::to_string(*spec.max));
        }
    }
    if (spec.type == ParamType::string && !spec.choices.empty()) {
        const std::string s = v.get<std::string>();
        bool ok = false;
        for (const std::string& c : spec.choices) ok |= (c == s);
        if (!ok)
            out.push_back("parameter '" + spec.key + "' = '" + s + "' must be one of {" +
                          join(spec.choices, ", ") + "}");
    }
    if (spec.type == ParamType::array) {
        for (const json& e : v)
            if (!e.is_number()) {
                out.push_back("parameter '" + spec.key + "' must contain only numbers");
                break;
            }
    }
}

void scenario_cross_checks(const ScenarioConfig& cfg, std::vector<std::string>& out) {
    const json& p = cfg.parameters;
    auto array_len = [&](const char* key, std::size_t want) {
        if (p.contains(key) && p[key].is_array() && p[key].size() != want)
            out.push_back("parameter '" + std::string(key) + "' must have " +
                          std::to_string(want) + " entries");
    };
    if (cfg.scenario == "min-energy") {
        array_len("x0", 2);
        array_len("x1", 2);
        std::size_t m = 3;
        if (p.contains("system") && p["system"].is_string()) {
            const std::string s = p["system"].get<std::string>();
            m = s == "double-integrator-1ch" ? 1 : s == "double-integrator-2ch" ? 2 : 3;
        }
        array_len("pattern", m);
        if (p.contains("panels") && p["panels"].is_number_integer() &&
            p["panels"].get<int>() % 2 != 0)
            out.push_back("parameter 'panels' must be even");
    }
    if (cfg.scenario == "cost-sweep" && p.contains("panels") &&
        p["panels"].is_number_integer() && p["panels"].get<int>() % 2 != 0)
        out.push_back("parameter 'panels' must be even");
    if (cfg.scenario == "dropout" || cfg.scenario == "markov") {
        array_len("pattern", 3);
        array_len("x0", 2);
        if (cfg.scenario == "markov") array_len("target", 2);
    }
    if (cfg.scenario == "dropout" || cfg.scenario == "markov" ||
        cfg.scenario == "min-energy") {
        if (p.contains("pattern") && p["pattern"].is_array())
            for (const json& b : p["pattern"])
                if (b.is_number() && b.get<double>() != 0.0 && b.get<double>() != 1.0) {
                    out.push_back("parameter 'pattern' entries must be 0 or 1");
                    break;
                }
    }
}

} // namespace

std::vector<std::string> validate(const ScenarioConfig& config) {
    std::vector<std::string> out;
    if (config.scenario.empty()) {
        out.push_back("missing required key 'scenario'");
        return out;
    }
    const ScenarioSchema* schema = find_schema(config.scenario);
    if (schema == nullptr) {
        std::vector<std::string> names;
        for (const ScenarioSchema& s : scenario_catalogue()) names.push_back(s.name);
        out.push_back("unknown scenario '" + config.scenario + "' (known: " +
                      join(names, ", ") + ")");
        return out;
    }
    if (!config.parameters.is_object()) {
        out.push_back("'parameters' must be a JSON object");
        return out;
    }
    for (const ParamSpec& spec : schema->params) {
        if (!config.parameters.contains(spec.key)) {
            if (spec.required)
                out.push_back("missing required parameter '" + spec.key + "'");
            continue;
        }
        check_value(spec, config.parameters[spec.key], out);
    }
    for (auto it = config.parameters.begin(); it != config.parameters.end(); ++it) {
        bool known = false;
        for (const ParamSpec& spec : schema->params) known |= (spec.key == it.key());
        if (!known) out.push_back("unknown parameter '" + it.key() + "'");
    }
    scenario_cross_checks(config, out);
    return out;
}

json resolved_parameters(const ScenarioConfig& config) {
    const ScenarioSchema* schema = find_schema(config.scenario);
    if (schema == nullptr) throw ParameterError("unknown scenario " + config.scenario);
    json out = json::object();
    for (const ParamSpec& spec : schema->params) {
        if (config.parameters.contains(spec.key))
            out[spec.key] = config.parameters[spec.key];
        else if (!spec.default_value.is_null())
            out[spec.key] = spec.default_value;
    }
    return out;
}

void apply_override(json& doc, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ParameterError("override must have the form key=value: " + assignment);
    const std::string path = assignment.substr(0, eq);
    const std::string value_text = assignment.substr(eq + 1);

    json value;
    try {
        value = json::parse(value_text);
    } catch (const json::parse_error&) {
        value = value_text; // plain string
    }

    json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot - start);
        if (key.empty()) throw ParameterError("empty key segment in override: " + assignment);
        if (dot == std::string::npos) {
            (*node)[key] = value;
            break;
        }
        node = &(*node)[key];
        start = dot + 1;
    }
}

std::string describe_scenarios() {
    std::ostringstream os;
    os << "Scenarios:\n";
    for (const ScenarioSchema& s : scenario_catalogue()) {
        os << "\n  " << s.name << " -- " << s.summary << "\n";
        for (const ParamSpec& p : s.params) {
            os << "    " << p.key << " (" << type_name(p.type);
            if (p.required)
                os << ", required";
            else if (!p.default_value.is_null())
                os << ", default " << p.default_value.dump();
            os << "): " << p.description;
            if (!p.choices.empty()) os << " [" << join(p.choices, "|") << "]";
            os << "\n";
        }
    }
    os << "\nCommon top-level keys: scenario (string), parameters (object), seed (integer, "
          "default 0), output_dir (string; default $PERCEPT_CTL_OUTPUT/<scenario>).\n";
    return os.str();
}

} // namespace percept::runner

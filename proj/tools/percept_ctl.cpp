#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "percept/runner/run.hpp"

namespace {

using percept::runner::json;

int load_config(const std::string& path, const std::vector<std::string>& overrides,
                percept::runner::ScenarioConfig& out) {
    std::ifstream in(path);
    if (!in) {
        std::cerr << "error: cannot read config file '" << path << "'\n";
        return 2;
    }
    json doc;
    try {
        in >> doc;
    } catch (const json::parse_error& e) {
        std::cerr << "error: config is not valid JSON: " << e.what() << "\n";
        return 2;
    }
    try {
        for (const std::string& ov : overrides) percept::runner::apply_override(doc, ov);
        out = percept::runner::config_from_json(doc);
    } catch (const percept::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"percept-ctl: corridor-steering and multichannel-control experiments"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;

    CLI::App* cmd_run = app.add_subcommand("run", "run a scenario and write outputs");
    cmd_run->add_option("--config", config_path, "path to the JSON config")->required();
    cmd_run->add_option("--set", overrides,
                        "override a config key by dotted path, e.g. parameters.k=0.3");

    CLI::App* cmd_validate = app.add_subcommand("validate", "check a config without running");
    cmd_validate->add_option("--config", config_path, "path to the JSON config")->required();
    cmd_validate->add_option("--set", overrides, "override a config key by dotted path");

    CLI::App* cmd_scenarios =
        app.add_subcommand("scenarios", "list scenarios and their parameters");

    CLI11_PARSE(app, argc, argv);

    if (cmd_scenarios->parsed()) {
        std::cout << percept::runner::describe_scenarios();
        return 0;
    }

    percept::runner::ScenarioConfig config;
    if (int rc = load_config(config_path, overrides, config); rc != 0) return rc;

    if (cmd_validate->parsed()) {
        const std::vector<std::string> violations = percept::runner::validate(config);
        if (violations.empty()) {
            std::cout << "config ok\n";
            return 0;
        }
        for (const std::string& v : violations) std::cout << "violation: " << v << "\n";
        return 2;
    }

    if (cmd_run->parsed()) {
        try {
            const percept::runner::RunSummary summary = percept::runner::run(config);
            std::cout << summary.document.dump(2) << "\n";
            std::cout << "outputs written to " << summary.output_dir.string() << "\n";
            return 0;
        } catch (const percept::runner::ConfigValidationError& e) {
            for (const std::string& v : e.violations) std::cerr << "violation: " << v << "\n";
            return 2;
        } catch (const std::exception& e) {
            std::cerr << "simulation failure: " << e.what() << "\n";
            return 3;
        }
    }
    return 0;
}

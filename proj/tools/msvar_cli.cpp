// Command-line front end: msvar <derive|test|fit|analyze|compare|simulate>
// [--config file] [--key value ...]. Every configuration key is also a flag.

#include "msvar/error.hpp"
#include "msvar/pipeline.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <functional>
#include <iostream>
#include <map>
#include <memory>

namespace {

std::string dashed(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

struct Overrides {
    std::string config_path;
    std::map<std::string, std::vector<std::string>> values;
    std::map<std::string, CLI::Option*> options;
};

void register_keys(CLI::App* sub, Overrides& o) {
    sub->add_option("--config", o.config_path, "key = value configuration file");
    for (const auto& k : msvar::config_keys()) {
        auto* opt = sub->add_option("--" + dashed(k.name), o.values[k.name],
                                    k.help + " (default: " + (k.default_value.empty() ? "none" : k.default_value) + ")");
        if (k.is_flag) opt->expected(0, 1);
        o.options[k.name] = opt;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Markov-switching VAR toolkit for household consumption analysis"};
    app.require_subcommand(1);
    using Command = std::function<msvar::CommandOutcome(const msvar::PipelineConfig&)>;
    const std::vector<std::tuple<std::string, std::string, Command>> commands{
        {"derive", "add MPC and IMPC series to the dataset", msvar::cmd_derive},
        {"test", "panel unit-root and Engle-Granger tables", msvar::cmd_test},
        {"fit", "estimate the Markov-switching VAR per entity", msvar::cmd_fit},
        {"analyze", "impulse responses and variance decompositions", msvar::cmd_analyze},
        {"compare", "cross-entity COVID and fiscal comparison tables", msvar::cmd_compare},
        {"simulate", "simulate data or run a recovery experiment", msvar::cmd_simulate},
    };
    std::vector<std::unique_ptr<Overrides>> overrides;
    std::vector<CLI::App*> subs;
    for (const auto& [name, help, fn] : commands) {
        overrides.push_back(std::make_unique<Overrides>());
        subs.push_back(app.add_subcommand(name, help));
        register_keys(subs.back(), *overrides.back());
    }
    CLI11_PARSE(app, argc, argv);

    for (std::size_t c = 0; c < commands.size(); ++c) {
        if (!subs[c]->parsed()) continue;
        const Overrides& o = *overrides[c];
        try {
            msvar::ConfigMap values;
            if (!o.config_path.empty()) values = msvar::load_config_file(o.config_path);
            for (const auto& [key, opt] : o.options) {
                if (opt->count() == 0) continue;
                const auto& v = o.values.at(key);
                values[key] = v.empty() ? "true" : v.back();
            }
            const msvar::PipelineConfig config = msvar::make_config(values);
            const msvar::CommandOutcome outcome = std::get<2>(commands[c])(config);
            for (const auto& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
            for (const auto& e : outcome.errors) std::cerr << "error: " << e << '\n';
            for (const auto& f : outcome.files) std::cout << f.string() << '\n';
            return outcome.exit_code();
        } catch (const msvar::Error& e) {
            std::cerr << "error: " << e.what() << '\n';
            return 1;
        }
    }
    return 1;
}

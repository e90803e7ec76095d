#include "ftpl/cli.hpp"
#include "ftpl/errors.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <iostream>

int main(int argc, char** argv) {
    CLI::App app{"Stationary heterogeneous-agent equilibria under fiscal price-level determination"};
    app.require_subcommand(1, 1);

    std::filesystem::path config_path;
    ftpl::Overrides overrides;
    bool require = false;

    for (std::string_view name : ftpl::command_names()) {
        auto* sub = app.add_subcommand(std::string(name));
        sub->add_option("--config", config_path, "INI configuration file")->required()->check(CLI::ExistingFile);
        sub->add_option("--tau", overrides.tau, "override policy.tau");
        sub->add_option("--r", overrides.r, "override policy.r");
        sub->add_option("--alpha", overrides.alpha, "override firm.alpha");
        sub->add_option("--seed", overrides.seed, "override mc.seed");
        sub->add_option("--out", overrides.out, "override output.dir");
        sub->add_flag("--require", require, "exit 4 when no equilibrium exists");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : ftpl::kExitConfig;
    }

    ftpl::RunConfig config;
    try {
        config = ftpl::parse_config(config_path);
        ftpl::apply_overrides(config, overrides);
    } catch (const std::exception& e) {
        fmt::print(stderr, "{}\n", e.what());
        return ftpl::exit_code_for(e);
    }
    return ftpl::run_command(app.get_subcommands().front()->get_name(), config, require, std::cout, std::cerr);
}

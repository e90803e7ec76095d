#pragma once

#include "ftpl/config.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ftpl {

enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,
    kExitConfig = 2,
    kExitNonConvergence = 3,
    kExitNoEquilibrium = 4,
};

struct Overrides {
    std::optional<double> tau;
    std::optional<double> r;
    std::optional<double> alpha;
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> out;
};

// Applies command-line overrides and re-validates.
void apply_overrides(RunConfig& config, const Overrides& overrides);

const std::vector<std::string_view>& command_names();

struct CheckResult {
    std::string name;
    bool passed;
    std::string detail;
};

// Invariant suite behind the `validate` command.
std::vector<CheckResult> run_validation(const RunConfig& config, std::ostream& log);

// Runs one command; data goes to files under config.output_dir and to `out`,
// diagnostics to `err`. Library errors are mapped to exit codes.
int run_command(std::string_view command, const RunConfig& config, bool require, std::ostream& out,
                std::ostream& err);

// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

}  // namespace ftpl

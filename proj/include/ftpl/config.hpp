#pragma once

#include "ftpl/equilibrium.hpp"
#include "ftpl/hjb.hpp"
#include "ftpl/model.hpp"
#include "ftpl/stationary.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ftpl {

struct EconomyConfig {
    std::vector<double> states;
    std::vector<std::vector<double>> rates;
    double rho = 0.05;
    double gamma = 1.0;
    double a_min = 0.0;
};

struct PolicyConfig {
    double tau = 0.0;
    std::optional<double> r;  // rate for the fixed-price commands
    double nominal_rate = 0.0;
    double nominal_debt = 1.0;
};

struct MonteCarloConfig {
    std::size_t n_paths = 100000;
    double burn_in = 200.0;
    double horizon = 100.0;
    std::uint64_t seed = 42;
};

// Parameters of the figure sets: Huggett at one positive and two negative
// surpluses, Aiyagari at one negative surplus and two capital shares.
struct FiguresConfig {
    double tau_1 = 0.1;
    double tau_2a = -0.9;
    double tau_2b = -0.005;
    double tau_3 = -0.01;
    double alpha_3a = 0.05;
    double alpha_3b = 0.9;
};

struct RunConfig {
    EconomyConfig economy;
    FirmParams firm;
    std::vector<double> limit_alphas{0.3, 0.1, 0.03, 0.01, 0.003, 0.001};
    PolicyConfig policy;
    SolverSettings solver;
    ScanSpec scan;
    MonteCarloConfig mc;
    FiguresConfig figures;
    std::filesystem::path output_dir = "out";

    // Throws ConfigDomainError naming the first offending key.
    void validate() const;

    IncomeChain chain() const;
    Economy make_economy() const;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config(const std::filesystem::path& path);

}  // namespace ftpl

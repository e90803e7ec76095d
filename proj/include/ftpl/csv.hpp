#pragma once

#include "ftpl/equilibrium.hpp"
#include "ftpl/hjb.hpp"
#include "ftpl/stationary.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace ftpl {

// All writers emit a header line and numbers at 17 significant digits.

std::string household_csv(const HouseholdSolution& sol);
std::string distribution_csv(const StationaryDistribution& dist);
std::string sweep_csv(const SweepTable& table);
std::string equilibrium_csv(const std::vector<EquilibriumResult>& results);
std::string excess_csv(const std::vector<ExcessPoint>& curve);

struct CurvePoint {
    double r;
    double assets;
    double supply;
};

// Asset demand against the policy-implied supply: `r,A,supply`.
std::string curves_csv(const std::vector<CurvePoint>& curve);

std::string limit_csv(const LimitExperiment& experiment);

void write_file(const std::filesystem::path& path, const std::string& content);

}  // namespace ftpl

#pragma once

#include "ftpl/equilibrium.hpp"
#include "ftpl/hjb.hpp"
#include "ftpl/model.hpp"
#include "ftpl/stationary.hpp"

#include <vector>

namespace ftpl::testing {

// Two states 0.5 / 1.5, symmetric switching at rate 0.4.
inline IncomeChain e0_chain() {
    const std::vector<double> states{0.5, 1.5};
    return build_income_chain(states, {{0.0, 0.4}, {0.4, 0.0}});
}

inline IncomeChain single_state_chain() {
    const std::vector<double> states{1.0};
    return build_income_chain(states, {{0.0}});
}

// Grid used for E0 runs: fine near the constraint, relative spacing at the
// top small enough to resolve dissaving close to rho.
inline SolverSettings e0_settings() {
    SolverSettings s;
    s.n = 3000;
    s.stretch = 1.003;
    return s;
}

inline SolverSettings coarse_settings() { return SolverSettings{}; }

inline Economy e0_economy(const SolverSettings& settings = e0_settings()) {
    return Economy{e0_chain(), Utility(1.0), 0.05, 0.0, settings};
}

inline HouseholdParams e0_params(double r, double w = 1.0, double tau = 0.0) { return {0.05, r, w, tau, 0.0}; }

// Shared E0 solution at r = 0.03 on the fine grid.
inline const HouseholdSolution& e0_solution() {
    static const HouseholdSolution sol = solve_household(e0_chain(), Utility(1.0), e0_params(0.03), e0_settings());
    return sol;
}

// Memoized asset demand of E0 on the fine grid, shared across test cases.
inline AssetDemand& e0_demand() {
    static AssetDemand demand(e0_economy());
    return demand;
}

}  // namespace ftpl::testing

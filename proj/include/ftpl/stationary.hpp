#pragma once

#include "ftpl/hjb.hpp"
#include "ftpl/model.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ftpl {

// Probability masses on grid nodes x income states. The atom at the borrowing
// limit is the mass of row 0.
struct StationaryDistribution {
    WealthGrid grid;
    Eigen::MatrixXd g;
    double boundary_mass = 0.0;
    double support_upper = 0.0;

    Eigen::VectorXd wealth_marginal() const { return g.rowwise().sum(); }
    Eigen::VectorXd income_marginal() const { return g.colwise().sum().transpose(); }
};

// Null vector of the adjoint of the solver's final generator.
StationaryDistribution stationary_kfe(const HouseholdSolution& sol);

// Time-averaged occupation measure of n_paths independent paths over
// [burn_in, burn_in + horizon]; path k uses seed ^ k.
StationaryDistribution stationary_montecarlo(const HouseholdSolution& sol, std::size_t n_paths, double burn_in,
                                             double horizon, std::uint64_t seed);

// Cross-sectional law at time t of paths started from (a0, z0).
StationaryDistribution empirical_law_at(const HouseholdSolution& sol, std::size_t n_paths, double t, double a0,
                                        std::size_t z0, std::uint64_t seed);

struct Aggregates {
    double assets;
    double consumption;
};

Aggregates aggregates(const StationaryDistribution& dist, const HouseholdSolution& sol);

// Wealth marginal pooled into `bins` equal-width bins on [lo, hi]; nodes above
// hi go to the last bin.
Eigen::VectorXd wealth_histogram(const StationaryDistribution& dist, std::size_t bins, double lo, double hi);

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// Household block of an economy: everything except prices and policy.
struct Economy {
    IncomeChain chain;
    Utility utility{1.0};
    double rho = 0.05;
    double a_min = 0.0;
    SolverSettings solver;

    HouseholdParams params(double r, double w = 1.0, double tau = 0.0) const { return {rho, r, w, tau, a_min}; }
};

struct SweepRow {
    double r = 0.0;
    double assets = 0.0;
    double consumption = 0.0;
    double boundary_mass = 0.0;
    double a_max = 0.0;  // truncation used at (w = 1, tau = 0)
    bool converged = false;
    std::string diagnostic;
};

struct SweepTable {
    double w = 1.0;
    double tau = 0.0;
    std::vector<SweepRow> rows;
};

// Stationary aggregates of one economy at (r, w = 1, tau = 0).
struct StationaryPoint {
    HouseholdSolution household;
    StationaryDistribution distribution;
    Aggregates aggregates;
};

StationaryPoint solve_stationary(const Economy& economy, double r);

// Sweep row at (r, w = 1, tau = 0); solver failures are caught into the row.
SweepRow sweep_row(const Economy& economy, double r);

// One solve + KFE per rate at (w = 1, tau = 0), each on its own truncation,
// rescaled to (w, tau). Failed rows are kept with converged = false.
SweepTable sweep_A(const Economy& economy, std::span<const double> r_values, double w, double tau);

}  // namespace ftpl

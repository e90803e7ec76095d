#pragma once

#include "ftpl/model.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace ftpl {

struct SolverSettings {
    double tol = 1e-8;
    int max_iter = 300;
    std::size_t n = 1000;
    std::optional<double> a_max;  // nullopt: grown automatically
    double stretch = 1.0;

    void validate() const;
};

using SparseMatrix = Eigen::SparseMatrix<double>;

// Solution of the household problem on a truncated wealth grid. Arrays are
// N x d with one column per income state. The generator acts on vectors laid
// out column-major (index z * N + i), i.e. on `matrix.reshaped()`.
struct HouseholdSolution {
    WealthGrid grid;
    IncomeChain chain;
    Utility utility{1.0};
    HouseholdParams params;

    Eigen::MatrixXd v;
    Eigen::MatrixXd v_a;
    Eigen::MatrixXd c;
    Eigen::MatrixXd s;
    SparseMatrix generator;  // drift plus income jumps of the final policy

    int iterations = 0;
    double bellman_residual = 0.0;

    std::size_t nodes() const noexcept { return grid.size(); }
    std::size_t states() const noexcept { return chain.size(); }
    double income(std::size_t i, std::size_t z) const {
        return params.r * grid[i] + params.net_wage() * chain.state(z);
    }
};

// Starting truncation used by the automatic a_max search.
double initial_truncation(const IncomeChain& chain, const HouseholdParams& params);

HouseholdSolution solve_household(const IncomeChain& chain, const Utility& utility,
                                  const HouseholdParams& params, const SolverSettings& settings);

// Solve on a caller-supplied grid (no truncation search).
HouseholdSolution solve_household_on_grid(const IncomeChain& chain, const Utility& utility,
                                          const HouseholdParams& params, const WealthGrid& grid,
                                          double tol, int max_iter);

// Node-wise residual of the Euler equation; at zero-drift boundary nodes the
// entry is the slack of the one-sided inequality (nonnegative when it holds).
Eigen::MatrixXd euler_residual(const HouseholdSolution& sol);

// Largest node at which some income state saves (weakly).
double dissaving_threshold(const HouseholdSolution& sol);

struct ScaledPolicy {
    WealthGrid grid;
    Eigen::MatrixXd c;
};

// Consumption at (w, tau) obtained from a base solution at (w=1, tau=0) by the
// CRRA homogeneity of the problem.
ScaledPolicy scaled_consumption(const HouseholdSolution& base, double w, double tau);

class DriftField;

// Time spent near each node by flows of a DriftField: the half cell on either
// side of a node belongs to it. Whole half cells crossed by a flow are counted
// in a difference array and priced once at the end.
class Occupancy {
public:
    Occupancy(std::size_t nodes, std::size_t states);

    void add(std::size_t z, std::size_t node, double dt) { time_(static_cast<Eigen::Index>(node), static_cast<Eigen::Index>(z)) += dt; }
    void add_crossings(std::size_t z, std::size_t first, std::size_t end);

    // Nodes x states matrix of occupation times.
    Eigen::MatrixXd times(const DriftField& field) const;

private:
    Eigen::MatrixXd time_;
    std::vector<std::vector<double>> crossings_;
};

// Wealth drift s(., z) interpolated between nodes, with the state constraint at
// both ends of the grid enforced. The drift is linear on each cell, so the
// flow is available in closed form; pieces of the flow end at nodes and cell
// midpoints ("breakpoints").
class DriftField {
public:
    explicit DriftField(const HouseholdSolution& sol);

    double drift(double a, std::size_t z) const;
    double lower() const noexcept { return grid_.front(); }
    double upper() const noexcept { return grid_.back(); }
    const WealthGrid& grid() const noexcept { return grid_; }

    // Position after following the flow of state z for `duration`, optionally
    // recording occupation times. Crossing whole half cells costs O(log N).
    double advance(double a, std::size_t z, double duration, Occupancy* occupancy = nullptr) const;

    // Same flow, reported piece by piece: `on_step(t0, a0, t1, a1)` with times
    // relative to the call.
    using StepObserver = std::function<void(double, double, double, double)>;
    double trace(double a, std::size_t z, double duration, const StepObserver& on_step) const;

    // Node whose half cell contains a.
    std::size_t nearest_node(double a) const { return owner(piece_of(a)); }

    std::size_t pieces() const noexcept { return points_.size() - 1; }
    // Node whose half cell contains piece k.
    static std::size_t owner(std::size_t piece) noexcept { return (piece + 1) / 2; }
    double crossing_time(std::size_t z, std::size_t piece) const { return cross_[z][piece]; }

private:
    std::size_t piece_of(double a) const;
    double slope(std::size_t z, std::size_t piece) const { return slope_[z][piece / 2]; }
    double velocity(std::size_t z, std::size_t piece, double a) const;
    // Time to move from x to y inside one piece (same drift sign at both ends).
    double time_between(std::size_t z, std::size_t piece, double x, double y) const;
    double move_for(std::size_t z, std::size_t piece, double x, double t) const;

    WealthGrid grid_;
    std::vector<std::vector<double>> drift_;
    std::vector<std::vector<double>> slope_;  // per cell
    std::vector<double> points_;              // breakpoints
    std::vector<std::vector<double>> at_points_;
    std::vector<std::vector<double>> cross_;   // crossing time per piece, inf if blocked
    std::vector<std::vector<double>> elapsed_;  // prefix sums of finite crossing times
    std::vector<std::vector<std::size_t>> up_stop_;    // first piece >= k with no upward crossing
    std::vector<std::vector<std::ptrdiff_t>> down_stop_;  // last piece <= k with no downward crossing
    double snap_;
};

struct PathPoint {
    double t;
    double a;
    std::size_t z;
    double c;
};

// Piecewise-deterministic sample path of the optimally controlled state.
std::vector<PathPoint> simulate_path(const HouseholdSolution& sol, double a0, std::size_t z0, double horizon,
                                     std::uint64_t seed);

// Samples the next income state and the holding time; shared by the path
// simulators so that per-seed streams are identical.
class IncomeJumps {
public:
    explicit IncomeJumps(const IncomeChain& chain);
    template <typename Rng>
    double holding_time(std::size_t z, Rng& rng) const;
    template <typename Rng>
    std::size_t next_state(std::size_t z, Rng& rng) const;

private:
    std::vector<double> exit_;
    std::vector<std::vector<double>> cumulative_;
};

}  // namespace ftpl

#include "ftpl/detail/income_jumps.ipp"

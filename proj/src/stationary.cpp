#include "ftpl/stationary.hpp"

#include "ftpl/errors.hpp"

#include <Eigen/SparseLU>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <random>

namespace ftpl {

namespace {

constexpr double kSupportMass = 1e-12;

void finish(StationaryDistribution& dist) {
    dist.boundary_mass = dist.g.row(0).sum();
    dist.support_upper = dist.grid.front();
    for (std::size_t i = dist.grid.size(); i-- > 0;) {
        if (dist.g.row(static_cast<Eigen::Index>(i)).sum() > kSupportMass) {
            dist.support_upper = dist.grid[i];
            break;
        }
    }
}

template <typename Rng>
std::size_t draw_from(const std::vector<double>& law, Rng& rng) {
    const double u = detail::uniform01(rng);
    double acc = 0.0;
    for (std::size_t z = 0; z < law.size(); ++z) {
        acc += law[z];
        if (u < acc) return z;
    }
    return law.size() - 1;
}

}  // namespace

StationaryDistribution stationary_kfe(const HouseholdSolution& sol) {
    const auto size = sol.generator.rows();
    // A^T g = 0 with the balance equation at (a_min, lowest z) replaced by the
    // pin g = 1 there; that node always carries mass since the lowest income
    // state dissaves everywhere above the limit. Normalized afterwards.
    const SparseMatrix adjoint = sol.generator.transpose();
    constexpr Eigen::Index pin = 0;
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(static_cast<std::size_t>(adjoint.nonZeros() + 1));
    for (Eigen::Index col = 0; col < adjoint.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator it(adjoint, col); it; ++it) {
            if (it.row() != pin) entries.emplace_back(it.row(), it.col(), it.value());
        }
    }
    entries.emplace_back(pin, pin, 1.0);
    SparseMatrix system(size, size);
    system.setFromTriplets(entries.begin(), entries.end());
    system.makeCompressed();

    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(system);
    if (lu.info() != Eigen::Success) {
        throw Error(ErrorKind::DegenerateNullSpace, "balance system is singular: " + lu.lastErrorMessage());
    }
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(size);
    rhs(pin) = 1.0;
    Eigen::VectorXd g = lu.solve(rhs);
    if (!g.allFinite() || g.minCoeff() < -1e-9) {
        throw Error(ErrorKind::DegenerateNullSpace,
                    fmt::format("null vector is not a probability vector (min entry {:.3e})", g.minCoeff()));
    }
    g = g.cwiseMax(0.0);
    g /= g.sum();
    const double balance = (adjoint * g).lpNorm<Eigen::Infinity>();
    const double scale = std::max(1.0, sol.generator.coeffs().cwiseAbs().maxCoeff());
    if (balance > 1e-9 * scale) {
        throw Error(ErrorKind::DegenerateNullSpace, fmt::format("balance residual {:.3e}", balance));
    }

    StationaryDistribution dist{sol.grid, g.reshaped(static_cast<Eigen::Index>(sol.nodes()),
                                                     static_cast<Eigen::Index>(sol.states())),
                                0.0, 0.0};
    finish(dist);
    return dist;
}

StationaryDistribution stationary_montecarlo(const HouseholdSolution& sol, std::size_t n_paths, double burn_in,
                                             double horizon, std::uint64_t seed) {
    if (n_paths == 0) throw Error(ErrorKind::InvalidParameters, "need at least one path");
    if (!(burn_in > 0.0) || !(horizon > 0.0)) throw Error(ErrorKind::InvalidParameters, "burn-in and horizon must be positive");

    const DriftField field(sol);
    const IncomeJumps jumps(sol.chain);
    Occupancy occupancy(sol.nodes(), sol.states());
    const double end = burn_in + horizon;

    for (std::size_t k = 0; k < n_paths; ++k) {
        std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(k));
        std::size_t z = draw_from(sol.chain.stationary_law(), rng);
        double a = field.lower();
        double t = 0.0;
        while (t < end) {
            const double seg_end = std::min(t + jumps.holding_time(z, rng), end);
            if (seg_end <= burn_in) {
                a = field.advance(a, z, seg_end - t);
            } else if (t >= burn_in) {
                a = field.advance(a, z, seg_end - t, &occupancy);
            } else {
                a = field.advance(a, z, burn_in - t);
                a = field.advance(a, z, seg_end - burn_in, &occupancy);
            }
            t = seg_end;
            if (t < end) z = jumps.next_state(z, rng);
        }
    }
    const Eigen::MatrixXd occ = occupancy.times(field);
    StationaryDistribution dist{sol.grid, occ / occ.sum(), 0.0, 0.0};
    finish(dist);
    return dist;
}

StationaryDistribution empirical_law_at(const HouseholdSolution& sol, std::size_t n_paths, double t_end, double a0,
                                        std::size_t z0, std::uint64_t seed) {
    if (n_paths == 0) throw Error(ErrorKind::InvalidParameters, "need at least one path");
    const DriftField field(sol);
    const IncomeJumps jumps(sol.chain);
    Eigen::MatrixXd mass = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sol.nodes()),
                                                  static_cast<Eigen::Index>(sol.states()));
    for (std::size_t k = 0; k < n_paths; ++k) {
        std::mt19937_64 rng(seed ^ static_cast<std::uint64_t>(k));
        std::size_t z = z0;
        double a = a0;
        double t = 0.0;
        while (t < t_end) {
            const double seg_end = std::min(t + jumps.holding_time(z, rng), t_end);
            a = field.advance(a, z, seg_end - t);
            t = seg_end;
            if (t < t_end) z = jumps.next_state(z, rng);
        }
        mass(static_cast<Eigen::Index>(field.nearest_node(a)), static_cast<Eigen::Index>(z)) += 1.0;
    }
    StationaryDistribution dist{sol.grid, mass / static_cast<double>(n_paths), 0.0, 0.0};
    finish(dist);
    return dist;
}

Aggregates aggregates(const StationaryDistribution& dist, const HouseholdSolution& sol) {
    if (dist.g.rows() != sol.c.rows() || dist.g.cols() != sol.c.cols() || !dist.grid.same_as(sol.grid)) {
        throw Error(ErrorKind::GridMismatch, "distribution and household solution live on different grids");
    }
    double assets = 0.0;
    for (std::size_t i = 0; i < sol.nodes(); ++i) {
        assets += sol.grid[i] * dist.g.row(static_cast<Eigen::Index>(i)).sum();
    }
    return {assets, dist.g.cwiseProduct(sol.c).sum()};
}

Eigen::VectorXd wealth_histogram(const StationaryDistribution& dist, std::size_t bins, double lo, double hi) {
    if (bins == 0 || !(hi > lo)) throw Error(ErrorKind::InvalidParameters, "histogram needs bins and hi > lo");
    Eigen::VectorXd h = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(bins));
    const Eigen::VectorXd marginal = dist.wealth_marginal();
    const double width = (hi - lo) / static_cast<double>(bins);
    for (std::size_t i = 0; i < dist.grid.size(); ++i) {
        const double pos = (dist.grid[i] - lo) / width;
        const auto b = static_cast<Eigen::Index>(std::clamp(pos, 0.0, static_cast<double>(bins - 1)));
        h(b) += marginal(static_cast<Eigen::Index>(i));
    }
    return h;
}

double total_variation(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
    if (p.size() != q.size()) throw Error(ErrorKind::GridMismatch, "histograms differ in length");
    return 0.5 * (p - q).cwiseAbs().sum();
}

StationaryPoint solve_stationary(const Economy& economy, double r) {
    auto household = solve_household(economy.chain, economy.utility, economy.params(r), economy.solver);
    auto distribution = stationary_kfe(household);
    const auto agg = aggregates(distribution, household);
    return {std::move(household), std::move(distribution), agg};
}

SweepRow sweep_row(const Economy& economy, double r) {
    SweepRow row;
    row.r = r;
    try {
        const auto point = solve_stationary(economy, r);
        const auto& sol = point.household;
        row.assets = point.aggregates.assets;
        row.consumption = point.aggregates.consumption;
        row.boundary_mass = point.distribution.boundary_mass;
        row.a_max = sol.grid.back();
        row.converged = true;
        const auto top = static_cast<Eigen::Index>(sol.nodes() - 1);
        if ((sol.s.row(top).array() >= 0.0).any()) {
            row.converged = false;
            row.diagnostic = "TruncationTooSmall: savings nonnegative at a_max";
        }
    } catch (const Error& e) {
        row.diagnostic = e.what();
    }
    return row;
}

SweepTable sweep_A(const Economy& economy, std::span<const double> r_values, double w, double tau) {
    if (r_values.empty()) throw Error(ErrorKind::InvalidParameters, "empty rate list");
    if (!(w > 0.0) || !(tau < 1.0)) throw Error(ErrorKind::InvalidParameters, "need w > 0 and tau < 1");
    std::vector<double> rates(r_values.begin(), r_values.end());
    std::sort(rates.begin(), rates.end());
    for (double r : rates) {
        if (!(r < economy.rho)) throw Error(ErrorKind::InvalidRate, fmt::format("sweep rate {} must be below rho", r));
    }
    const double k = w * (1.0 - tau);
    SweepTable table{w, tau, {}};
    table.rows.reserve(rates.size());
    for (double r : rates) {
        SweepRow row = sweep_row(economy, r);
        row.assets *= k;
        row.consumption *= k;
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace ftpl

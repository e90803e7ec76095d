#include "ftpl/cli.hpp"

#include "ftpl/errors.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <ostream>

namespace ftpl {

namespace {

class Suite {
public:
    explicit Suite(std::ostream& log) : log_(log) {}

    void check(std::string name, bool passed, std::string detail) {
        results_.push_back({std::move(name), passed, std::move(detail)});
    }

    // Runs a group of checks; an escaping error fails the group.
    template <typename F>
    void group(const std::string& name, F&& body) {
        try {
            body();
        } catch (const std::exception& e) {
            fmt::print(log_, "{}: {}\n", name, e.what());
            check(name, false, e.what());
        }
    }

    std::vector<CheckResult> take() { return std::move(results_); }

private:
    std::ostream& log_;
    std::vector<CheckResult> results_;
};

double max_abs(const Eigen::MatrixXd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

void chain_checks(Suite& suite, const IncomeChain& chain) {
    const auto& law = chain.stationary_law();
    double total = 0.0;
    double mean = 0.0;
    for (std::size_t z = 0; z < chain.size(); ++z) {
        total += law[z];
        mean += law[z] * chain.state(z);
    }
    suite.check("chain.law_sums_to_one", std::abs(total - 1.0) < 1e-12, fmt::format("|sum-1|={:.2e}", std::abs(total - 1.0)));
    suite.check("chain.mean_is_one", std::abs(mean - 1.0) < 1e-12, fmt::format("|mean-1|={:.2e}", std::abs(mean - 1.0)));

    double slowest = std::numeric_limits<double>::infinity();
    for (std::size_t z = 0; z < chain.size(); ++z) {
        if (chain.exit_rate(z) > 0.0) slowest = std::min(slowest, chain.exit_rate(z));
    }
    if (std::isfinite(slowest)) {
        const Eigen::MatrixXd q = chain.generator();
        const Eigen::MatrixXd p = (q * (200.0 / slowest)).exp();
        double gap = 0.0;
        for (Eigen::Index i = 0; i < p.rows(); ++i) {
            for (Eigen::Index z = 0; z < p.cols(); ++z) {
                gap = std::max(gap, std::abs(p(i, z) - law[static_cast<std::size_t>(z)]));
            }
        }
        suite.check("chain.law_matches_long_run", gap < 1e-8, fmt::format("gap={:.2e}", gap));
    }
}

void utility_checks(Suite& suite, const Utility& u) {
    double envelope = 0.0;
    bool decreasing = true;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = -40; k <= 40; ++k) {
        const double p = std::pow(10.0, k / 10.0);
        const auto h = hamiltonian(u, p);
        const double lhs = h.value + p * h.maximizer;
        envelope = std::max(envelope, std::abs(lhs - u.value(h.maximizer)) / std::max(1.0, std::abs(lhs)));
        decreasing = decreasing && h.value < prev;
        prev = h.value;
    }
    suite.check("utility.envelope_identity", envelope < 1e-10, fmt::format("max rel={:.2e}", envelope));
    suite.check("utility.hamiltonian_decreasing", decreasing, "log-spaced p in [1e-4, 1e4]");
}

void firm_checks(Suite& suite, const FirmParams& firm, double r) {
    if (!(r > -firm.delta)) return;
    const auto fs = firm_side(firm, r);
    const double rate_gap = std::abs(firm.alpha * std::pow(fs.capital, firm.alpha - 1.0) - firm.delta - r);
    const double wage_gap = std::abs((1.0 - firm.alpha) * std::pow(fs.capital, firm.alpha) - fs.wage);
    suite.check("firm.profit_maximization", rate_gap < 1e-12 * (1.0 + std::abs(r)) && wage_gap < 1e-12 * fs.wage,
                fmt::format("rate gap={:.2e} wage gap={:.2e}", rate_gap, wage_gap));
}

void household_checks(Suite& suite, const HouseholdSolution& sol, double tol) {
    const auto n = static_cast<Eigen::Index>(sol.nodes());
    const auto d = static_cast<Eigen::Index>(sol.states());
    const double y = sol.params.net_wage();
    const double rho = sol.params.rho;
    const double r = sol.params.r;
    const double a_min = sol.grid.front();

    suite.check("hjb.residual_within_tol", sol.bellman_residual <= tol, fmt::format("residual={:.2e}", sol.bellman_residual));

    double worst_concavity = -std::numeric_limits<double>::infinity();
    bool increasing = true;
    bool monotone_c = true;
    for (Eigen::Index z = 0; z < d; ++z) {
        for (Eigen::Index i = 0; i + 1 < n; ++i) {
            const auto iu = static_cast<std::size_t>(i);
            increasing = increasing && sol.v(i + 1, z) > sol.v(i, z);
            monotone_c = monotone_c && sol.c(i + 1, z) >= sol.c(i, z) * (1.0 - 1e-12);
            if (i == 0) continue;
            const double left = (sol.v(i, z) - sol.v(i - 1, z)) / sol.grid.width(iu - 1);
            const double right = (sol.v(i + 1, z) - sol.v(i, z)) / sol.grid.width(iu);
            worst_concavity = std::max(worst_concavity, right - left);
        }
    }
    suite.check("hjb.value_increasing", increasing, "first differences positive");
    suite.check("hjb.value_concave", worst_concavity <= 1e-10, fmt::format("max slope increase={:.2e}", worst_concavity));
    suite.check("hjb.consumption_monotone", monotone_c, "c nondecreasing in a");

    bool feasible = true;
    for (Eigen::Index z = 0; z < d; ++z) {
        const double income = sol.income(0, static_cast<std::size_t>(z));
        feasible = feasible && sol.c(0, z) > 0.0 && sol.c(0, z) <= income * (1.0 + 1e-12);
    }
    suite.check("hjb.boundary_feasible", feasible, "0 < c(a_min, z) <= income");

    bool low_dissaves = true;
    for (Eigen::Index i = 1; i < n; ++i) low_dissaves = low_dissaves && sol.s(i, 0) < 0.0;
    suite.check("hjb.lowest_state_dissaves", low_dissaves && std::abs(sol.s(0, 0)) < 1e-10,
                fmt::format("s(a_min, z_min)={:.2e}", sol.s(0, 0)));

    const Utility& u = sol.utility;
    const double floor_c = 0.5 * (r * a_min + y * sol.chain.lowest());
    double bound_gap = 0.0;
    for (Eigen::Index z = 0; z < d; ++z) {
        for (Eigen::Index i = 0; i < n; ++i) {
            const double a = sol.grid[static_cast<std::size_t>(i)];
            const double lo = u.value(floor_c) / rho;
            const double hi = u.value(rho * a - (rho - r) * a_min + y) / rho;
            bound_gap = std::max({bound_gap, lo - sol.v(i, z), sol.v(i, z) - hi});
        }
    }
    suite.check("hjb.value_bounds", bound_gap <= 1e-8, fmt::format("max violation={:.2e}", bound_gap));

    const Eigen::MatrixXd euler = euler_residual(sol);
    suite.check("hjb.euler_boundary_slack", euler(0, 0) > 0.0, fmt::format("slack={:.3e}", euler(0, 0)));

    const double threshold = dissaving_threshold(sol);
    suite.check("hjb.dissaving_threshold_inside", threshold < sol.grid.back(),
                fmt::format("threshold={:.4g} a_max={:.4g}", threshold, sol.grid.back()));
}

void distribution_checks(Suite& suite, const HouseholdSolution& sol, const StationaryDistribution& dist) {
    suite.check("kfe.nonnegative", dist.g.minCoeff() >= 0.0, fmt::format("min={:.2e}", dist.g.minCoeff()));
    suite.check("kfe.normalized", std::abs(dist.g.sum() - 1.0) < 1e-12, fmt::format("|sum-1|={:.2e}", std::abs(dist.g.sum() - 1.0)));
    const Eigen::VectorXd marginal = dist.income_marginal();
    double gap = 0.0;
    for (Eigen::Index z = 0; z < marginal.size(); ++z) {
        gap = std::max(gap, std::abs(marginal(z) - sol.chain.stationary_law()[static_cast<std::size_t>(z)]));
    }
    suite.check("kfe.income_marginal", gap < 1e-10, fmt::format("gap={:.2e}", gap));
    const double threshold = dissaving_threshold(sol);
    const std::size_t cell = sol.grid.locate(threshold);
    const double allowed = threshold + (cell + 1 < sol.nodes() ? sol.grid.width(cell) : 0.0);
    suite.check("kfe.support_below_threshold", dist.support_upper <= allowed * (1.0 + 1e-12),
                fmt::format("support={:.4g} threshold={:.4g}", dist.support_upper, threshold));

    const auto agg = aggregates(dist, sol);
    const double conservation = std::abs(agg.consumption - sol.params.r * agg.assets - sol.params.net_wage());
    suite.check("kfe.conservation", conservation < 1e-8, fmt::format("|C-rA-w(1-tau)|={:.2e}", conservation));
}

void scaling_checks(Suite& suite, const Economy& economy, const HouseholdSolution& base, double base_assets) {
    if (economy.a_min != 0.0) return;
    const std::pair<double, double> cases[] = {{1.0, 0.5}, {2.0, -0.2}};
    for (const auto& [w, tau] : cases) {
        const double k = w * (1.0 - tau);
        const auto sol = solve_household_on_grid(economy.chain, economy.utility, economy.params(base.params.r, w, tau),
                                                 base.grid.scaled(k), economy.solver.tol, economy.solver.max_iter);
        const auto agg = aggregates(stationary_kfe(sol), sol);
        const double rel = std::abs(agg.assets - k * base_assets) / std::max(base_assets, 1e-300);
        suite.check(fmt::format("scaling.assets(w={},tau={})", w, tau), rel < 1e-8, fmt::format("rel={:.2e}", rel));
        const auto scaled = scaled_consumption(base, w, tau);
        const double policy_gap = max_abs(scaled.c - sol.c) / std::max(1.0, max_abs(sol.c));
        suite.check(fmt::format("scaling.policy(w={},tau={})", w, tau), policy_gap < 1e-6,
                    fmt::format("rel={:.2e}", policy_gap));
    }
}

void montecarlo_checks(Suite& suite, const HouseholdSolution& sol, const StationaryDistribution& dist,
                       const MonteCarloConfig& mc) {
    const auto sim = stationary_montecarlo(sol, mc.n_paths, mc.burn_in, mc.horizon, mc.seed);
    const double hi = std::max(dist.support_upper, sol.grid[1]);
    const double tv = total_variation(wealth_histogram(dist, 50, sol.grid.front(), hi),
                                      wealth_histogram(sim, 50, sol.grid.front(), hi));
    suite.check("stationary.montecarlo_tv", tv < 0.02, fmt::format("tv={:.4f} paths={}", tv, mc.n_paths));
}

void lower_bound_checks(Suite& suite, const Economy& economy, double tau) {
    if (economy.a_min != 0.0 || economy.chain.size() < 2) return;
    const double bound = lower_interest_bound(economy.chain, economy.utility, economy.params(0.0, 1.0, tau));
    const double r = bound - 0.05;
    const auto sol = solve_household(economy.chain, economy.utility, economy.params(r, 1.0, tau), economy.solver);
    const auto dist = stationary_kfe(sol);
    suite.check("stationary.atom_below_lower_bound", std::abs(dist.boundary_mass - 1.0) < 1e-9,
                fmt::format("r={:.4g} boundary mass={:.12f}", r, dist.boundary_mass));
}

void equilibrium_checks(Suite& suite, const RunConfig& config, AssetDemand& demand) {
    const double tau = config.policy.tau;
    const auto scans = {find_huggett_equilibria(demand, tau, config.scan),
                        find_aiyagari_equilibria(demand, tau, config.firm, config.scan)};
    for (const auto& scan : scans) {
        double worst = 0.0;
        for (const auto& root : scan.roots) {
            worst = std::max({worst, root.residuals.asset, root.residuals.goods, root.residuals.budget});
        }
        const auto name = fmt::format("equilibrium.{}_walras", to_string(scan.kind));
        suite.check(name, worst < 1e-6,
                    fmt::format("verdict={} roots={} max residual={:.2e}", to_string(scan.verdict), scan.roots.size(), worst));
        bool ordered = std::is_sorted(scan.roots.begin(), scan.roots.end(),
                                      [](const auto& a, const auto& b) { return a.r < b.r; });
        bool admissible = true;
        for (const auto& root : scan.roots) {
            admissible = admissible && root.B >= 0.0 && root.r < config.economy.rho;
            if (scan.kind == ModelKind::Aiyagari) admissible = admissible && root.r > -config.firm.delta;
        }
        suite.check(fmt::format("equilibrium.{}_admissible", to_string(scan.kind)), ordered && admissible,
                    "sorted, B >= 0, r < rho");
    }
}

}  // namespace

std::vector<CheckResult> run_validation(const RunConfig& config, std::ostream& log) {
    Suite suite(log);
    const Economy economy = config.make_economy();
    const double tau = config.policy.tau;
    const double r = config.policy.r.value_or(0.6 * config.economy.rho);

    suite.group("chain", [&] { chain_checks(suite, economy.chain); });
    suite.group("utility", [&] { utility_checks(suite, economy.utility); });
    suite.group("firm", [&] { firm_checks(suite, config.firm, r); });
    suite.group("household", [&] {
        const auto sol = solve_household(economy.chain, economy.utility, economy.params(r, 1.0, tau), economy.solver);
        household_checks(suite, sol, economy.solver.tol);
        const auto dist = stationary_kfe(sol);
        distribution_checks(suite, sol, dist);
        montecarlo_checks(suite, sol, dist, config.mc);
        if (tau == 0.0) {
            scaling_checks(suite, economy, sol, aggregates(dist, sol).assets);
        } else {
            const auto base = solve_household(economy.chain, economy.utility, economy.params(r), economy.solver);
            scaling_checks(suite, economy, base, aggregates(stationary_kfe(base), base).assets);
        }
    });
    suite.group("lower_bound", [&] { lower_bound_checks(suite, economy, tau); });
    AssetDemand demand(economy);
    suite.group("equilibrium", [&] { equilibrium_checks(suite, config, demand); });
    return suite.take();
}

}  // namespace ftpl

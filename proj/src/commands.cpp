#include "ftpl/cli.hpp"

#include "ftpl/csv.hpp"
#include "ftpl/errors.hpp"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <functional>
#include <map>
#include <ostream>

namespace ftpl {

namespace {

struct Context {
    const RunConfig& config;
    bool require;
    std::ostream& out;
    std::ostream& err;

    std::filesystem::path file(std::string_view name) const { return config.output_dir / name; }

    double rate(std::string_view command) const {
        if (!config.policy.r) throw ConfigDomainError("policy.r", fmt::format("is required by `{}`", command));
        return *config.policy.r;
    }
};

void report_scan(const Context& ctx, const EquilibriumScan& scan) {
    fmt::print(ctx.out, "{} tau={:.17g} verdict={} roots={} rejected={}\n", to_string(scan.kind), scan.tau,
               to_string(scan.verdict), scan.roots.size(), scan.rejected.size());
    if (scan.family_upper) fmt::print(ctx.out, "non-monetary family: r < {:.17g} and r = 0\n", *scan.family_upper);
    if (scan.tangent_r) fmt::print(ctx.out, "tangency near r={:.17g}\n", *scan.tangent_r);
    const auto& policy = ctx.config.policy;
    for (const auto& root : scan.roots) {
        fmt::print(ctx.out, "r*={:.17g} B*={:.17g} A*={:.17g}", root.r, root.B, root.A);
        if (root.B > 0.0) {
            fmt::print(ctx.out, " P0={:.17g} inflation={:.17g}", price_level(policy.nominal_debt, policy.nominal_rate, root, 0.0),
                       policy.nominal_rate - root.r);
        }
        fmt::print(ctx.out, "\n");
    }
}

int finish_scan(const Context& ctx, const EquilibriumScan& scan) {
    report_scan(ctx, scan);
    if (ctx.require && scan.verdict == Verdict::None) {
        fmt::print(ctx.err, "no equilibrium found\n");
        return kExitNoEquilibrium;
    }
    return kExitOk;
}

int household(const Context& ctx) {
    const Economy economy = ctx.config.make_economy();
    const double r = ctx.rate("household");
    const auto sol = solve_household(economy.chain, economy.utility, economy.params(r, 1.0, ctx.config.policy.tau),
                                     economy.solver);
    write_file(ctx.file("household.csv"), household_csv(sol));
    fmt::print(ctx.out, "iterations={} residual={:.3e} a_max={:.17g} dissaving_threshold={:.17g}\n", sol.iterations,
               sol.bellman_residual, sol.grid.back(), dissaving_threshold(sol));
    return kExitOk;
}

int stationary(const Context& ctx) {
    const Economy economy = ctx.config.make_economy();
    const double r = ctx.rate("stationary");
    const double tau = ctx.config.policy.tau;
    const auto sol = solve_household(economy.chain, economy.utility, economy.params(r, 1.0, tau), economy.solver);
    const auto dist = stationary_kfe(sol);
    const auto agg = aggregates(dist, sol);
    write_file(ctx.file("household.csv"), household_csv(sol));
    write_file(ctx.file("distribution.csv"), distribution_csv(dist));
    fmt::print(ctx.out, "A={:.17g} C={:.17g} boundary_mass={:.17g} conservation={:.3e}\n", agg.assets, agg.consumption,
               dist.boundary_mass, std::abs(agg.consumption - r * agg.assets - (1.0 - tau)));
    return kExitOk;
}

int sweep(const Context& ctx) {
    AssetDemand demand(ctx.config.make_economy());
    const auto rates = market_scan_rates(demand, ModelKind::Huggett, ctx.config.firm, ctx.config.scan);
    const auto table = sweep_A(demand.economy(), rates, 1.0, ctx.config.policy.tau);
    write_file(ctx.file("sweep.csv"), sweep_csv(table));
    std::size_t failed = 0;
    for (const auto& row : table.rows) {
        if (!row.converged) {
            ++failed;
            fmt::print(ctx.err, "r={:.17g}: {}\n", row.r, row.diagnostic);
        }
    }
    fmt::print(ctx.out, "rows={} failed={}\n", table.rows.size(), failed);
    return kExitOk;
}

void write_scan(const Context& ctx, const EquilibriumScan& scan, const std::string& stem) {
    write_file(ctx.file(stem + "_equilibrium.csv"), equilibrium_csv(scan.roots));
    write_file(ctx.file(stem + "_excess.csv"), excess_csv(scan.excess_curve));
    if (scan.kind == ModelKind::Aiyagari) write_file(ctx.file(stem + "_rejected.csv"), equilibrium_csv(scan.rejected));
}

int equilibrium_huggett(const Context& ctx) {
    AssetDemand demand(ctx.config.make_economy());
    const auto scan = find_huggett_equilibria(demand, ctx.config.policy.tau, ctx.config.scan);
    write_scan(ctx, scan, "huggett");
    return finish_scan(ctx, scan);
}

int equilibrium_aiyagari(const Context& ctx) {
    AssetDemand demand(ctx.config.make_economy());
    const auto scan = find_aiyagari_equilibria(demand, ctx.config.policy.tau, ctx.config.firm, ctx.config.scan);
    write_scan(ctx, scan, "aiyagari");
    return finish_scan(ctx, scan);
}

int limit(const Context& ctx) {
    AssetDemand demand(ctx.config.make_economy());
    const auto experiment = huggett_limit_experiment(demand, ctx.config.policy.tau, ctx.config.limit_alphas,
                                                     ctx.config.firm.delta, ctx.config.scan);
    write_file(ctx.file("limit.csv"), limit_csv(experiment));
    std::string huggett = "root_index,r_star\n";
    for (std::size_t j = 0; j < experiment.huggett_r.size(); ++j) {
        huggett += fmt::format("{},{:.17g}\n", j, experiment.huggett_r[j]);
    }
    write_file(ctx.file("limit_huggett.csv"), huggett);
    for (const auto& row : experiment.rows) {
        fmt::print(ctx.out, "alpha={:.17g} roots={}", row.alpha, row.r_star.size());
        for (std::size_t j = 0; j < row.r_star.size(); ++j) {
            fmt::print(ctx.out, " r*={:.17g} gap={:.3e}", row.r_star[j], row.gap[j]);
        }
        fmt::print(ctx.out, "\n");
    }
    return kExitOk;
}

struct FigureSet {
    std::string name;
    ModelKind kind;
    double tau;
    double alpha;
};

int figures(const Context& ctx) {
    const auto& f = ctx.config.figures;
    const double delta = ctx.config.firm.delta;
    const std::vector<FigureSet> sets = {
        {"fig1", ModelKind::Huggett, f.tau_1, 0.0},
        {"fig2a", ModelKind::Huggett, f.tau_2a, 0.0},
        {"fig2b", ModelKind::Huggett, f.tau_2b, 0.0},
        {"fig3a", ModelKind::Aiyagari, f.tau_3, f.alpha_3a},
        {"fig3b", ModelKind::Aiyagari, f.tau_3, f.alpha_3b},
    };
    AssetDemand demand(ctx.config.make_economy());
    for (const auto& set : sets) {
        const FirmParams firm{set.kind == ModelKind::Aiyagari ? set.alpha : ctx.config.firm.alpha, delta};
        const auto scan = set.kind == ModelKind::Huggett
                              ? find_huggett_equilibria(demand, set.tau, ctx.config.scan)
                              : find_aiyagari_equilibria(demand, set.tau, firm, ctx.config.scan);
        const auto rates = market_scan_rates(demand, set.kind, firm, ctx.config.scan);
        SweepTable table = demand.table(rates);
        table.tau = set.tau;
        std::vector<CurvePoint> curve;
        for (auto& row : table.rows) {
            row.assets *= 1.0 - set.tau;
            row.consumption *= 1.0 - set.tau;
            if (!row.converged) continue;
            const double supply =
                set.kind == ModelKind::Huggett ? set.tau / row.r : aiyagari_supply(row.r, set.tau, firm);
            curve.push_back({row.r, row.assets, supply});
        }
        write_file(ctx.file(set.name + "_sweep.csv"), sweep_csv(table));
        write_file(ctx.file(set.name + "_curves.csv"), curves_csv(curve));
        write_scan(ctx, scan, set.name);
        fmt::print(ctx.out, "{}: ", set.name);
        report_scan(ctx, scan);
    }
    return kExitOk;
}

int validate(const Context& ctx) {
    const auto checks = run_validation(ctx.config, ctx.err);
    std::size_t failed = 0;
    for (const auto& c : checks) {
        fmt::print(ctx.out, "{} {:<40} {}\n", c.passed ? "PASS" : "FAIL", c.name, c.detail);
        if (!c.passed) ++failed;
    }
    fmt::print(ctx.out, "{} of {} checks passed\n", checks.size() - failed, checks.size());
    return failed == 0 ? kExitOk : kExitFailure;
}

using Handler = std::function<int(const Context&)>;

const std::map<std::string_view, Handler>& handlers() {
    static const std::map<std::string_view, Handler> table = {
        {"household", household},
        {"stationary", stationary},
        {"sweep", sweep},
        {"equilibrium-huggett", equilibrium_huggett},
        {"equilibrium-aiyagari", equilibrium_aiyagari},
        {"limit", limit},
        {"figures", figures},
        {"validate", validate},
    };
    return table;
}

}  // namespace

void apply_overrides(RunConfig& config, const Overrides& o) {
    if (o.tau) config.policy.tau = *o.tau;
    if (o.r) config.policy.r = *o.r;
    if (o.alpha) config.firm.alpha = *o.alpha;
    if (o.seed) config.mc.seed = *o.seed;
    if (o.out) config.output_dir = *o.out;
    config.validate();
}

const std::vector<std::string_view>& command_names() {
    static const std::vector<std::string_view> names = {
        "household", "stationary", "sweep", "equilibrium-huggett", "equilibrium-aiyagari", "limit", "figures", "validate",
    };
    return names;
}

int exit_code_for(const std::exception& e) {
    if (const auto* err = dynamic_cast<const Error*>(&e)) {
        switch (err->kind()) {
            case ErrorKind::ConfigSyntax:
            case ErrorKind::ConfigDomain: return kExitConfig;
            case ErrorKind::NonConvergence:
            case ErrorKind::TruncationTooSmall: return kExitNonConvergence;
            default: return kExitFailure;
        }
    }
    return kExitFailure;
}

int run_command(std::string_view command, const RunConfig& config, bool require, std::ostream& out,
                std::ostream& err) {
    const auto it = handlers().find(command);
    if (it == handlers().end()) {
        fmt::print(err, "unknown command '{}'\n", command);
        return kExitFailure;
    }
    try {
        return it->second(Context{config, require, out, err});
    } catch (const std::exception& e) {
        fmt::print(err, "{}\n", e.what());
        return exit_code_for(e);
    }
}

}  // namespace ftpl

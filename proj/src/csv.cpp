#include "ftpl/csv.hpp"

#include "ftpl/errors.hpp"

#include <fmt/format.h>

#include <fstream>
#include <iterator>

namespace ftpl {

namespace {

void append(std::string& out, double x) { fmt::format_to(std::back_inserter(out), "{:.17g}", x); }

template <typename... Ts>
void row(std::string& out, const Ts&... fields) {
    bool first = true;
    auto put = [&](const auto& f) {
        if (!first) out.push_back(',');
        first = false;
        using F = std::decay_t<decltype(f)>;
        if constexpr (std::is_floating_point_v<F>) {
            append(out, f);
        } else {
            fmt::format_to(std::back_inserter(out), "{}", f);
        }
    };
    (put(fields), ...);
    out.push_back('\n');
}

}  // namespace

std::string household_csv(const HouseholdSolution& sol) {
    std::string out = "a,z_index,z,v,c,s\n";
    for (std::size_t z = 0; z < sol.states(); ++z) {
        const auto zi = static_cast<Eigen::Index>(z);
        for (std::size_t i = 0; i < sol.nodes(); ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            row(out, sol.grid[i], z, sol.chain.state(z), sol.v(ii, zi), sol.c(ii, zi), sol.s(ii, zi));
        }
    }
    return out;
}

std::string distribution_csv(const StationaryDistribution& dist) {
    std::string out = "a,z_index,mass\n";
    for (Eigen::Index z = 0; z < dist.g.cols(); ++z) {
        for (std::size_t i = 0; i < dist.grid.size(); ++i) {
            row(out, dist.grid[i], static_cast<std::size_t>(z), dist.g(static_cast<Eigen::Index>(i), z));
        }
    }
    return out;
}

std::string sweep_csv(const SweepTable& table) {
    std::string out = "r,A,C,boundary_mass,converged\n";
    for (const auto& r : table.rows) row(out, r.r, r.assets, r.consumption, r.boundary_mass, r.converged ? 1 : 0);
    return out;
}

std::string equilibrium_csv(const std::vector<EquilibriumResult>& results) {
    std::string out =
        "kind,tau,r_star,B_star,K_star,w_star,A_star,C_star,res_asset,res_goods,res_budget,bracket_lo,bracket_hi\n";
    for (const auto& e : results) {
        row(out, to_string(e.kind), e.tau, e.r, e.B, e.K, e.w, e.A, e.C, e.residuals.asset, e.residuals.goods,
            e.residuals.budget, e.bracket_lo, e.bracket_hi);
    }
    return out;
}

std::string excess_csv(const std::vector<ExcessPoint>& curve) {
    std::string out = "r,excess,accepted\n";
    for (const auto& p : curve) row(out, p.r, p.excess, p.accepted ? 1 : 0);
    return out;
}

std::string curves_csv(const std::vector<CurvePoint>& curve) {
    std::string out = "r,A,supply\n";
    for (const auto& p : curve) row(out, p.r, p.assets, p.supply);
    return out;
}

std::string limit_csv(const LimitExperiment& experiment) {
    std::string out = "alpha,root_index,r_star,gap\n";
    for (const auto& r : experiment.rows) {
        for (std::size_t j = 0; j < r.r_star.size(); ++j) {
            row(out, r.alpha, j, r.r_star[j], j < r.gap.size() ? r.gap[j] : 0.0);
        }
    }
    return out;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw Error(ErrorKind::InvalidParameters, fmt::format("cannot write {}", path.string()));
}

}  // namespace ftpl

#include "ftpl/cli.hpp"
#include "ftpl/config.hpp"
#include "ftpl/csv.hpp"
#include "ftpl/errors.hpp"

#include <doctest.h>
#include <fmt/format.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace ftpl;
using doctest::Approx;

namespace {

const std::string kMinimal = "[economy]\nstates = 0.5, 1.5\nrates = 0, 0.4; 0.4, 0\n";

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / fmt::format("ftpl_test_{}", name);
    std::filesystem::remove_all(dir);
    return dir;
}

std::string first_line(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::string line;
    std::getline(in, line);
    return line;
}

int syntax_line(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigSyntaxError& e) {
        return e.line();
    }
    FAIL("expected a syntax error");
    return -1;
}

std::pair<std::string, std::string> domain_error(const std::string& text) {
    try {
        parse_config_text(text);
    } catch (const ConfigDomainError& e) {
        return {e.key(), e.reason()};
    }
    FAIL("expected a domain error");
    return {};
}

// Small, fast configuration for command tests.
RunConfig quick_config(const std::filesystem::path& out) {
    auto cfg = parse_config_text(kMinimal + "[solver]\nn = 200\n[policy]\nr = 0.02\n");
    cfg.output_dir = out;
    return cfg;
}

}  // namespace

TEST_CASE("config: minimal file takes the defaults") {
    const auto cfg = parse_config_text(kMinimal);
    CHECK(cfg.economy.states == std::vector<double>{0.5, 1.5});
    CHECK(cfg.economy.rates[0][1] == 0.4);
    CHECK(cfg.economy.rho == 0.05);
    CHECK(cfg.economy.gamma == 1.0);
    CHECK(cfg.economy.a_min == 0.0);
    CHECK(cfg.firm.alpha == 0.3);
    CHECK(cfg.firm.delta == 0.05);
    CHECK(cfg.policy.tau == 0.0);
    CHECK_FALSE(cfg.policy.r.has_value());
    CHECK(cfg.solver.n == 1000);
    CHECK(cfg.solver.tol == 1e-8);
    CHECK_FALSE(cfg.solver.a_max.has_value());
    CHECK_FALSE(cfg.scan.step.has_value());
    CHECK(cfg.mc.n_paths == 100000);
    CHECK(cfg.mc.seed == 42);
    CHECK(cfg.output_dir == "out");
    const auto chain = cfg.chain();
    CHECK(chain.state(0) == Approx(0.5));
}

TEST_CASE("config: comments, auto values and the shipped file") {
    const auto cfg = parse_config_text(
        "# leading comment\n; another\n[economy]\nstates = 0.5, 1.5  # trailing\nrates = 0, 0.4; 0.4, 0\n"
        "[solver]\na_max = auto\nstretch = 1.01\n[scan]\nr_min = -0.5\nr_max = auto\nstep = 0.01\n");
    CHECK(cfg.solver.stretch == 1.01);
    CHECK(cfg.scan.r_min == -0.5);
    CHECK_FALSE(cfg.scan.r_max.has_value());
    CHECK(cfg.scan.step == 0.01);

    const auto shipped = parse_config(std::filesystem::path(FTPL_SOURCE_DIR) / "configs" / "e0.ini");
    CHECK(shipped.policy.tau == 0.1);
    CHECK(shipped.solver.n == 3000);
    CHECK(shipped.figures.alpha_3a == 0.005);
}

TEST_CASE("config: syntax errors carry the line") {
    CHECK(syntax_line("[economy]\nstates = 0.5, 1.5\nrates = 0, 0.4, 1; 0.4, 0\n") == 3);
    CHECK(syntax_line("[economy]\nstates = 0.5, 1.5\nrates = 0, 0.4\n") == 3);
    CHECK(syntax_line(kMinimal + "colour = blue\n") == 4);
    CHECK(syntax_line(kMinimal + "[nowhere]\n") == 4);
    CHECK(syntax_line(kMinimal + "rho = 0.05\nrho = 0.04\n") == 5);
    CHECK(syntax_line(kMinimal + "rho = fast\n") == 4);
    CHECK(syntax_line(kMinimal + "rho =\n") == 4);
    CHECK(syntax_line("rho = 0.05\n" + kMinimal) == 1);
    CHECK(syntax_line(kMinimal + "[solver]\nn = 10.5\n") == 5);
    CHECK_THROWS_AS(parse_config("/nonexistent/ftpl.ini"), Error);
}

TEST_CASE("config: domain errors name the key") {
    CHECK(domain_error(kMinimal + "[policy]\ntau = 1.2\n") == std::pair<std::string, std::string>{"policy.tau", "must be < 1"});
    CHECK(domain_error(kMinimal + "rho = -1\n").first == "economy.rho");
    CHECK(domain_error(kMinimal + "a_min = 0.5\n").first == "economy.a_min");
    CHECK(domain_error(kMinimal + "[firm]\nalpha = 1.5\n").first == "firm.alpha");
    CHECK(domain_error(kMinimal + "[firm]\ndelta = 0\n").first == "firm.delta");
    CHECK(domain_error(kMinimal + "[solver]\nn = 20\n").first == "solver.n");
    CHECK(domain_error(kMinimal + "[policy]\nr = 0.06\n").first == "policy.r");
    CHECK(domain_error("[economy]\nstates = 0.5, 1.5\nrates = 0, 0.4; 0, 0\n").first == "economy.rates");
}

TEST_CASE("config: overrides are validated") {
    auto cfg = parse_config_text(kMinimal);
    Overrides o;
    o.tau = -0.2;
    o.r = 0.01;
    o.alpha = 0.5;
    o.seed = 7;
    o.out = "elsewhere";
    apply_overrides(cfg, o);
    CHECK(cfg.policy.tau == -0.2);
    CHECK(cfg.policy.r == 0.01);
    CHECK(cfg.firm.alpha == 0.5);
    CHECK(cfg.mc.seed == 7);
    CHECK(cfg.output_dir == "elsewhere");
    Overrides bad;
    bad.tau = 1.0;
    CHECK_THROWS_AS(apply_overrides(cfg, bad), ConfigDomainError);
}

TEST_CASE("csv: headers and full precision") {
    SweepTable t;
    SweepRow row;
    row.r = 0.1;
    row.assets = 1.0 / 3.0;
    row.consumption = 2.0;
    row.converged = true;
    t.rows.push_back(row);
    const std::string csv = sweep_csv(t);
    CHECK(csv.rfind("r,A,C,boundary_mass,converged\n", 0) == 0);
    CHECK(csv.find("0.10000000000000001,0.33333333333333331,2,0,1") != std::string::npos);

    EquilibriumResult e;
    const std::string eq = equilibrium_csv({e});
    CHECK(eq.rfind("kind,tau,r_star,B_star,K_star,w_star,A_star,C_star,res_asset,res_goods,res_budget,bracket_lo,"
                   "bracket_hi\n",
                   0) == 0);
    CHECK(excess_csv({{0.01, -0.5, true}}) == "r,excess,accepted\n0.01,-0.5,1\n");
    CHECK(curves_csv({{0.01, 2.0, 3.0}}).rfind("r,A,supply\n", 0) == 0);
    LimitExperiment lim;
    lim.rows.push_back({0.3, {0.04}, {0.007}});
    CHECK(limit_csv(lim).rfind("alpha,root_index,r_star,gap\n", 0) == 0);
}

TEST_CASE("commands: outputs and exit codes") {
    const auto out = scratch("commands");
    auto cfg = quick_config(out);
    std::ostringstream sink, err;

    CHECK(run_command("household", cfg, false, sink, err) == kExitOk);
    CHECK(first_line(out / "household.csv") == "a,z_index,z,v,c,s");
    CHECK(run_command("stationary", cfg, false, sink, err) == kExitOk);
    CHECK(first_line(out / "distribution.csv") == "a,z_index,mass");

    auto strict = cfg;
    strict.solver.tol = 1e-300;
    strict.solver.max_iter = 1;
    CHECK(run_command("household", strict, false, sink, err) == kExitNonConvergence);

    auto no_rate = cfg;
    no_rate.policy.r.reset();
    CHECK(run_command("household", no_rate, false, sink, err) == kExitConfig);

    auto deficit = cfg;
    deficit.policy.tau = -0.9;
    deficit.scan.step = 0.05;
    CHECK(run_command("equilibrium-huggett", deficit, false, sink, err) == kExitOk);
    CHECK(run_command("equilibrium-huggett", deficit, true, sink, err) == kExitNoEquilibrium);
    CHECK(first_line(out / "huggett_equilibrium.csv").rfind("kind,tau,r_star", 0) == 0);
    CHECK(first_line(out / "huggett_excess.csv") == "r,excess,accepted");

    CHECK(run_command("no-such-command", cfg, false, sink, err) == kExitFailure);
    std::filesystem::remove_all(out);
}

#include "ftpl/config.hpp"

#include "ftpl/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace ftpl {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

double to_double(const std::string& text, int line, const std::string& key) {
    double value = 0.0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ConfigSyntaxError(line, fmt::format("{}: '{}' is not a number", key, text));
    }
    return value;
}

std::uint64_t to_unsigned(const std::string& text, int line, const std::string& key) {
    std::uint64_t value = 0;
    const char* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw ConfigSyntaxError(line, fmt::format("{}: '{}' is not a nonnegative integer", key, text));
    }
    return value;
}

std::vector<double> to_list(const std::string& text, int line, const std::string& key) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(to_double(item, line, key));
    return out;
}

using Setter = std::function<void(RunConfig&, const std::string&, int)>;

template <typename T>
Setter number(const char* key, T RunConfig::*group, double T::*field) {
    return [key, group, field](RunConfig& c, const std::string& v, int line) {
        c.*group.*field = to_double(v, line, key);
    };
}

std::optional<double> optional_number(const std::string& v, int line, const std::string& key) {
    if (v == "auto") return std::nullopt;
    return to_double(v, line, key);
}

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"economy.states", [](RunConfig& c, const std::string& v, int line) {
             c.economy.states = to_list(v, line, "economy.states");
         }},
        {"economy.rates", [](RunConfig& c, const std::string& v, int line) {
             c.economy.rates.clear();
             for (const auto& row : split(v, ';')) c.economy.rates.push_back(to_list(row, line, "economy.rates"));
         }},
        {"economy.rho", number("economy.rho", &RunConfig::economy, &EconomyConfig::rho)},
        {"economy.gamma", number("economy.gamma", &RunConfig::economy, &EconomyConfig::gamma)},
        {"economy.a_min", number("economy.a_min", &RunConfig::economy, &EconomyConfig::a_min)},
        {"firm.alpha", number("firm.alpha", &RunConfig::firm, &FirmParams::alpha)},
        {"firm.delta", number("firm.delta", &RunConfig::firm, &FirmParams::delta)},
        {"firm.limit_alphas", [](RunConfig& c, const std::string& v, int line) {
             c.limit_alphas = to_list(v, line, "firm.limit_alphas");
         }},
        {"policy.tau", number("policy.tau", &RunConfig::policy, &PolicyConfig::tau)},
        {"policy.r", [](RunConfig& c, const std::string& v, int line) { c.policy.r = to_double(v, line, "policy.r"); }},
        {"policy.nominal_rate", number("policy.nominal_rate", &RunConfig::policy, &PolicyConfig::nominal_rate)},
        {"policy.nominal_debt", number("policy.nominal_debt", &RunConfig::policy, &PolicyConfig::nominal_debt)},
        {"solver.n", [](RunConfig& c, const std::string& v, int line) { c.solver.n = to_unsigned(v, line, "solver.n"); }},
        {"solver.a_max", [](RunConfig& c, const std::string& v, int line) {
             c.solver.a_max = optional_number(v, line, "solver.a_max");
         }},
        {"solver.tol", number("solver.tol", &RunConfig::solver, &SolverSettings::tol)},
        {"solver.max_iter", [](RunConfig& c, const std::string& v, int line) {
             const auto n = to_unsigned(v, line, "solver.max_iter");
             if (n > 1000000) throw ConfigSyntaxError(line, "solver.max_iter is out of range");
             c.solver.max_iter = static_cast<int>(n);
         }},
        {"solver.stretch", number("solver.stretch", &RunConfig::solver, &SolverSettings::stretch)},
        {"scan.r_min", [](RunConfig& c, const std::string& v, int line) {
             c.scan.r_min = optional_number(v, line, "scan.r_min");
         }},
        {"scan.r_max", [](RunConfig& c, const std::string& v, int line) {
             c.scan.r_max = optional_number(v, line, "scan.r_max");
         }},
        {"scan.step", [](RunConfig& c, const std::string& v, int line) {
             c.scan.step = optional_number(v, line, "scan.step");
         }},
        {"mc.n_paths", [](RunConfig& c, const std::string& v, int line) { c.mc.n_paths = to_unsigned(v, line, "mc.n_paths"); }},
        {"mc.burn_in", number("mc.burn_in", &RunConfig::mc, &MonteCarloConfig::burn_in)},
        {"mc.horizon", number("mc.horizon", &RunConfig::mc, &MonteCarloConfig::horizon)},
        {"mc.seed", [](RunConfig& c, const std::string& v, int line) { c.mc.seed = to_unsigned(v, line, "mc.seed"); }},
        {"figures.tau_1", number("figures.tau_1", &RunConfig::figures, &FiguresConfig::tau_1)},
        {"figures.tau_2a", number("figures.tau_2a", &RunConfig::figures, &FiguresConfig::tau_2a)},
        {"figures.tau_2b", number("figures.tau_2b", &RunConfig::figures, &FiguresConfig::tau_2b)},
        {"figures.tau_3", number("figures.tau_3", &RunConfig::figures, &FiguresConfig::tau_3)},
        {"figures.alpha_3a", number("figures.alpha_3a", &RunConfig::figures, &FiguresConfig::alpha_3a)},
        {"figures.alpha_3b", number("figures.alpha_3b", &RunConfig::figures, &FiguresConfig::alpha_3b)},
        {"output.dir", [](RunConfig& c, const std::string& v, int) { c.output_dir = v; }},
    };
    return table;
}

void require(bool ok, const std::string& key, const std::string& reason) {
    if (!ok) throw ConfigDomainError(key, reason);
}

void check_tau(double tau, const std::string& key) { require(tau < 1.0, key, "must be < 1"); }

void check_alpha(double alpha, const std::string& key) {
    require(alpha > 0.0 && alpha < 1.0, key, "must lie in (0, 1)");
}

}  // namespace

void RunConfig::validate() const {
    require(!economy.states.empty(), "economy.states", "is required");
    const std::size_t d = economy.states.size();
    if (d > 1) require(!economy.rates.empty(), "economy.rates", "is required when there is more than one state");
    if (!economy.rates.empty()) {
        require(economy.rates.size() == d, "economy.rates", fmt::format("needs {} rows", d));
        for (const auto& row : economy.rates) {
            require(row.size() == d, "economy.rates", fmt::format("rows need {} entries", d));
        }
    }
    require(economy.rho > 0.0, "economy.rho", "must be > 0");
    require(economy.gamma > 0.0, "economy.gamma", "must be > 0");
    require(economy.a_min <= 0.0, "economy.a_min", "must be <= 0");
    check_alpha(firm.alpha, "firm.alpha");
    require(firm.delta > 0.0, "firm.delta", "must be > 0");
    require(!limit_alphas.empty(), "firm.limit_alphas", "must not be empty");
    for (double a : limit_alphas) check_alpha(a, "firm.limit_alphas");
    check_tau(policy.tau, "policy.tau");
    if (policy.r) require(*policy.r < economy.rho, "policy.r", "must be < rho");
    require(policy.nominal_debt > 0.0, "policy.nominal_debt", "must be > 0");
    require(solver.n >= 50, "solver.n", "must be >= 50");
    require(solver.tol > 0.0, "solver.tol", "must be > 0");
    require(solver.max_iter >= 1, "solver.max_iter", "must be >= 1");
    require(solver.stretch >= 1.0, "solver.stretch", "must be >= 1");
    if (solver.a_max) require(*solver.a_max > economy.a_min, "solver.a_max", "must exceed economy.a_min");
    if (scan.r_max) require(*scan.r_max < economy.rho, "scan.r_max", "must be < rho");
    if (scan.r_min && scan.r_max) require(*scan.r_min < *scan.r_max, "scan.r_min", "must be < scan.r_max");
    if (scan.step) require(*scan.step > 0.0, "scan.step", "must be > 0");
    require(mc.n_paths >= 1, "mc.n_paths", "must be >= 1");
    require(mc.burn_in > 0.0, "mc.burn_in", "must be > 0");
    require(mc.horizon > 0.0, "mc.horizon", "must be > 0");
    check_tau(figures.tau_1, "figures.tau_1");
    check_tau(figures.tau_2a, "figures.tau_2a");
    check_tau(figures.tau_2b, "figures.tau_2b");
    check_tau(figures.tau_3, "figures.tau_3");
    check_alpha(figures.alpha_3a, "figures.alpha_3a");
    check_alpha(figures.alpha_3b, "figures.alpha_3b");
    require(!output_dir.empty(), "output.dir", "must not be empty");
    try {
        (void)chain();
    } catch (const Error& e) {
        throw ConfigDomainError(economy.rates.empty() ? "economy.states" : "economy.rates", e.what());
    }
}

IncomeChain RunConfig::chain() const {
    auto rates = economy.rates;
    if (rates.empty()) rates.assign(economy.states.size(), std::vector<double>(economy.states.size(), 0.0));
    return build_income_chain(economy.states, rates);
}

Economy RunConfig::make_economy() const {
    return Economy{chain(), Utility(economy.gamma), economy.rho, economy.a_min, solver};
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    std::set<std::string> seen;
    int line = 0;
    int rates_line = 0;
    while (std::getline(in, raw)) {
        ++line;
        // ';' separates rate rows, so it only starts a comment at line start.
        const std::string content = trim(raw.substr(0, raw.find('#')));
        if (content.empty() || content.front() == ';') continue;
        if (content.front() == '[') {
            if (content.back() != ']') throw ConfigSyntaxError(line, "unterminated section header");
            section = trim(std::string_view(content).substr(1, content.size() - 2));
            static const std::set<std::string> known = {"economy", "firm",    "policy", "solver",
                                                        "scan",    "mc",      "figures", "output"};
            if (!known.contains(section)) throw ConfigSyntaxError(line, fmt::format("unknown section [{}]", section));
            continue;
        }
        const auto eq = content.find('=');
        if (eq == std::string::npos) throw ConfigSyntaxError(line, "expected 'key = value'");
        if (section.empty()) throw ConfigSyntaxError(line, "key outside of a section");
        const std::string key = section + "." + trim(std::string_view(content).substr(0, eq));
        const std::string value = trim(std::string_view(content).substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigSyntaxError(line, fmt::format("unknown key {}", key));
        if (!seen.insert(key).second) throw ConfigSyntaxError(line, fmt::format("duplicate key {}", key));
        if (value.empty()) throw ConfigSyntaxError(line, fmt::format("{} has no value", key));
        it->second(config, value, line);
        if (key == "economy.rates") rates_line = line;
    }
    const auto& rates = config.economy.rates;
    const std::size_t d = config.economy.states.size();
    if (rates_line > 0 && d > 0) {
        if (rates.size() != d) {
            throw ConfigSyntaxError(rates_line, fmt::format("economy.rates has {} rows, expected {}", rates.size(), d));
        }
        for (std::size_t i = 0; i < d; ++i) {
            if (rates[i].size() != d) {
                throw ConfigSyntaxError(rates_line, fmt::format("economy.rates row {} has {} entries, expected {}", i + 1,
                                                                rates[i].size(), d));
            }
        }
    }
    config.validate();
    return config;
}

RunConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigSyntaxError(0, fmt::format("cannot open {}", path.string()));
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

}  // namespace ftpl

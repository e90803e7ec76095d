#include "ftpl/model.hpp"

#include "ftpl/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ftpl {

namespace {

void require(std::vector<std::string>& violations, bool ok, std::string message) {
    if (!ok) violations.push_back(std::move(message));
}

[[noreturn]] void throw_violations(const std::vector<std::string>& violations) {
    std::string joined;
    for (const auto& v : violations) {
        if (!joined.empty()) joined += "; ";
        joined += v;
    }
    throw Error(ErrorKind::InvalidParameters, joined);
}

bool strongly_connected(const Eigen::MatrixXd& rates) {
    const auto d = static_cast<std::size_t>(rates.rows());
    for (std::size_t start = 0; start < d; ++start) {
        std::vector<bool> seen(d, false);
        std::vector<std::size_t> stack{start};
        seen[start] = true;
        while (!stack.empty()) {
            const auto i = stack.back();
            stack.pop_back();
            for (std::size_t j = 0; j < d; ++j) {
                if (!seen[j] && rates(i, j) > 0.0) {
                    seen[j] = true;
                    stack.push_back(j);
                }
            }
        }
        if (std::find(seen.begin(), seen.end(), false) != seen.end()) return false;
    }
    return true;
}

}  // namespace

double IncomeChain::exit_rate(std::size_t from) const {
    return rates_.row(static_cast<Eigen::Index>(from)).sum();
}

Eigen::MatrixXd IncomeChain::generator() const {
    Eigen::MatrixXd q = rates_;
    for (Eigen::Index i = 0; i < q.rows(); ++i) q(i, i) = -rates_.row(i).sum();
    return q;
}

IncomeChain build_income_chain(std::span<const double> states,
                               const std::vector<std::vector<double>>& rates) {
    const std::size_t d = states.size();
    if (d == 0) throw Error(ErrorKind::InvalidParameters, "income chain needs at least one state");
    if (rates.size() != d) {
        throw Error(ErrorKind::InvalidParameters,
                    fmt::format("rate matrix has {} rows, expected {}", rates.size(), d));
    }
    for (std::size_t i = 0; i < d; ++i) {
        if (!(states[i] > 0.0)) {
            throw Error(ErrorKind::NonPositiveState, fmt::format("state {} = {} is not positive", i, states[i]));
        }
        if (i > 0 && !(states[i] > states[i - 1])) {
            throw Error(ErrorKind::InvalidParameters, "income states must be strictly increasing");
        }
    }

    IncomeChain chain;
    chain.rates_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        if (rates[i].size() != d) {
            throw Error(ErrorKind::InvalidParameters,
                        fmt::format("rate row {} has length {}, expected {}", i, rates[i].size(), d));
        }
        for (std::size_t j = 0; j < d; ++j) {
            if (i == j) continue;
            if (!(rates[i][j] >= 0.0) || !std::isfinite(rates[i][j])) {
                throw Error(ErrorKind::InvalidParameters,
                            fmt::format("rate ({},{}) = {} must be finite and nonnegative", i, j, rates[i][j]));
            }
            chain.rates_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rates[i][j];
        }
    }
    if (!strongly_connected(chain.rates_)) {
        throw Error(ErrorKind::ReducibleChain, "income chain has more than one communicating class");
    }

    // Balance equations nu^T Q = 0 with the last one replaced by sum(nu) = 1.
    const auto n = static_cast<Eigen::Index>(d);
    Eigen::MatrixXd system = chain.generator().transpose();
    system.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    const Eigen::VectorXd nu = system.fullPivLu().solve(rhs);

    chain.law_.resize(d);
    double mean = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
        chain.law_[i] = std::max(0.0, nu(static_cast<Eigen::Index>(i)));
        mean += chain.law_[i] * states[i];
    }
    const double total = std::accumulate(chain.law_.begin(), chain.law_.end(), 0.0);
    for (auto& p : chain.law_) p /= total;
    mean /= total;

    chain.states_.assign(states.begin(), states.end());
    for (auto& z : chain.states_) z /= mean;
    return chain;
}

Utility::Utility(double gamma) : gamma_(gamma), log_(gamma == 1.0) {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw Error(ErrorKind::InvalidParameters, fmt::format("risk aversion {} must be positive", gamma));
    }
}

double Utility::value(double c) const {
    if (log_) return std::log(c);
    return std::pow(c, 1.0 - gamma_) / (1.0 - gamma_);
}

double Utility::marginal(double c) const {
    if (log_) return 1.0 / c;
    return std::pow(c, -gamma_);
}

double Utility::inverse_marginal(double p) const {
    if (log_) return 1.0 / p;
    return std::pow(p, -1.0 / gamma_);
}

HamiltonianValue hamiltonian(const Utility& utility, double p) {
    if (!(p > 0.0)) {
        throw Error(ErrorKind::NonPositiveMarginal, fmt::format("marginal value {} is not positive", p));
    }
    const double c = utility.inverse_marginal(p);
    if (utility.is_log()) return {-std::log(p) - 1.0, c};
    const double g = utility.gamma();
    return {g / (1.0 - g) * std::pow(p, (g - 1.0) / g), c};
}

void HouseholdParams::validate(const IncomeChain& chain) const {
    std::vector<std::string> violations;
    require(violations, rho > 0.0, fmt::format("rho = {} must be positive", rho));
    require(violations, w > 0.0, fmt::format("w = {} must be positive", w));
    require(violations, tau < 1.0, fmt::format("tau = {} must be < 1", tau));
    require(violations, r < rho, fmt::format("r = {} must be < rho = {}", r, rho));
    require(violations, a_min <= 0.0, fmt::format("a_min = {} must be <= 0", a_min));
    if (r > 0.0) {
        require(violations, a_min > -chain.lowest() / r,
                fmt::format("a_min = {} must exceed -z_min/r = {}", a_min, -chain.lowest() / r));
    }
    require(violations, r * a_min + net_wage() * chain.lowest() > 0.0,
            "income at the borrowing limit must be positive");
    if (!violations.empty()) throw_violations(violations);
}

void FirmParams::validate() const {
    std::vector<std::string> violations;
    require(violations, alpha > 0.0 && alpha < 1.0, fmt::format("alpha = {} must lie in (0,1)", alpha));
    require(violations, delta > 0.0, fmt::format("delta = {} must be positive", delta));
    if (!violations.empty()) throw_violations(violations);
}

FirmSide firm_side(const FirmParams& firm, double r) {
    firm.validate();
    if (!(r > -firm.delta)) {
        throw Error(ErrorKind::RateBelowNegDepreciation,
                    fmt::format("r = {} must exceed -delta = {}", r, -firm.delta));
    }
    const double k = std::pow(firm.alpha / (r + firm.delta), 1.0 / (1.0 - firm.alpha));
    return {k, (1.0 - firm.alpha) * std::pow(k, firm.alpha)};
}

double lower_interest_bound(const IncomeChain& chain, const Utility& utility, const HouseholdParams& params) {
    if (params.a_min < 0.0) {
        throw Error(ErrorKind::UnsupportedBorrowingLimit,
                    "lower interest bound is only available for a zero borrowing limit");
    }
    const double y = params.net_wage();
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t z = 0; z < chain.size(); ++z) {
        double sum = 0.0;
        const double mz = utility.marginal(y * chain.state(z));
        for (std::size_t k = 0; k < chain.size(); ++k) {
            if (k == z) continue;
            sum += chain.rate(z, k) * (utility.marginal(y * chain.state(k)) / mz - 1.0);
        }
        worst = std::max(worst, sum);
    }
    return params.rho - worst;
}

WealthGrid WealthGrid::make(double a_min, double a_max, std::size_t n, double stretch) {
    if (n < 2) throw Error(ErrorKind::InvalidParameters, "wealth grid needs at least two nodes");
    if (!(a_max > a_min)) {
        throw Error(ErrorKind::InvalidParameters, fmt::format("a_max = {} must exceed a_min = {}", a_max, a_min));
    }
    if (!(stretch >= 1.0)) throw Error(ErrorKind::InvalidParameters, "grid stretch must be >= 1");

    WealthGrid grid;
    grid.stretch_ = stretch;
    grid.nodes_.resize(n);
    const double span = a_max - a_min;
    const double cells = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        double x = static_cast<double>(i) / cells;
        if (stretch != 1.0) x = std::expm1(static_cast<double>(i) * std::log(stretch)) / std::expm1(cells * std::log(stretch));
        grid.nodes_[i] = a_min + span * x;
    }
    grid.nodes_.front() = a_min;
    grid.nodes_.back() = a_max;
    return grid;
}

std::size_t WealthGrid::locate(double a) const {
    const std::size_t last_cell = nodes_.size() - 2;
    if (a <= nodes_.front()) return 0;
    if (a >= nodes_.back()) return last_cell;
    // Closed-form guess for the generating shape, then a local correction.
    const double cells = static_cast<double>(nodes_.size() - 1);
    const double x = (a - nodes_.front()) / (nodes_.back() - nodes_.front());
    double guess = x * cells;
    if (stretch_ != 1.0) {
        const double ls = std::log(stretch_);
        guess = std::log1p(x * std::expm1(cells * ls)) / ls;
    }
    auto i = static_cast<std::size_t>(std::clamp(guess, 0.0, static_cast<double>(last_cell)));
    while (i > 0 && nodes_[i] > a) --i;
    while (i < last_cell && nodes_[i + 1] <= a) ++i;
    return i;
}

double WealthGrid::interpolate(std::span<const double> values, double a) const {
    const std::size_t i = locate(a);
    const double t = std::clamp((a - nodes_[i]) / (nodes_[i + 1] - nodes_[i]), 0.0, 1.0);
    return values[i] + t * (values[i + 1] - values[i]);
}

WealthGrid WealthGrid::scaled(double factor) const {
    WealthGrid grid = *this;
    for (auto& a : grid.nodes_) a *= factor;
    return grid;
}

bool WealthGrid::same_as(const WealthGrid& other, double rel_tol) const {
    if (other.size() != size()) return false;
    const double scale = std::max(std::abs(back()), std::abs(front())) + 1.0;
    for (std::size_t i = 0; i < size(); ++i) {
        if (std::abs(nodes_[i] - other.nodes_[i]) > rel_tol * scale) return false;
    }
    return true;
}

}  // namespace ftpl

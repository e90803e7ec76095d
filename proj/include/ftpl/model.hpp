#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace ftpl {

// Finite-state continuous-time endowment chain. States are rescaled at
// construction so that the stationary mean is exactly one.
class IncomeChain {
public:
    std::size_t size() const noexcept { return states_.size(); }
    const std::vector<double>& states() const noexcept { return states_; }
    const std::vector<double>& stationary_law() const noexcept { return law_; }
    double state(std::size_t i) const { return states_[i]; }
    double rate(std::size_t from, std::size_t to) const { return rates_(from, to); }
    // Total jump intensity out of `from`.
    double exit_rate(std::size_t from) const;
    // Generator with rows summing to zero.
    Eigen::MatrixXd generator() const;
    double lowest() const { return states_.front(); }
    double highest() const { return states_.back(); }

    friend IncomeChain build_income_chain(std::span<const double> states,
                                          const std::vector<std::vector<double>>& rates);

private:
    std::vector<double> states_;
    Eigen::MatrixXd rates_;  // off-diagonal intensities, zero diagonal
    std::vector<double> law_;
};

// Validates the inputs, computes the stationary law from the balance equations
// and rescales the states by the inverse stationary mean.
IncomeChain build_income_chain(std::span<const double> states,
                               const std::vector<std::vector<double>>& rates);

// CRRA utility; gamma == 1 is the logarithmic branch.
class Utility {
public:
    explicit Utility(double gamma);

    double gamma() const noexcept { return gamma_; }
    bool is_log() const noexcept { return log_; }

    double value(double c) const;
    double marginal(double c) const;
    // (u')^{-1}
    double inverse_marginal(double p) const;

private:
    double gamma_;
    bool log_;
};

struct HamiltonianValue {
    double value;
    double maximizer;
};

// H(p) = sup_{c>0} u(c) - c p together with its maximizer (u')^{-1}(p).
HamiltonianValue hamiltonian(const Utility& utility, double p);

struct HouseholdParams {
    double rho = 0.05;
    double r = 0.0;
    double w = 1.0;
    double tau = 0.0;
    double a_min = 0.0;

    double net_wage() const noexcept { return w * (1.0 - tau); }
    // Throws InvalidParameters listing every violated constraint.
    void validate(const IncomeChain& chain) const;
};

struct FirmParams {
    double alpha = 0.3;
    double delta = 0.05;

    void validate() const;
};

struct FirmSide {
    double capital;
    double wage;
};

FirmSide firm_side(const FirmParams& firm, double r);

double lower_interest_bound(const IncomeChain& chain, const Utility& utility,
                            const HouseholdParams& params);

class WealthGrid {
public:
    // stretch == 1 gives uniform spacing; otherwise consecutive cell widths grow
    // by the factor `stretch`, concentrating nodes near the borrowing limit.
    static WealthGrid make(double a_min, double a_max, std::size_t n, double stretch = 1.0);

    std::size_t size() const noexcept { return nodes_.size(); }
    const std::vector<double>& nodes() const noexcept { return nodes_; }
    double operator[](std::size_t i) const { return nodes_[i]; }
    double front() const { return nodes_.front(); }
    double back() const { return nodes_.back(); }
    double stretch() const noexcept { return stretch_; }
    double width(std::size_t cell) const { return nodes_[cell + 1] - nodes_[cell]; }

    // Index of the cell [a_i, a_{i+1}] containing a (clamped to the grid).
    std::size_t locate(double a) const;
    // Linear interpolation of nodal values.
    double interpolate(std::span<const double> values, double a) const;
    WealthGrid scaled(double factor) const;

    bool same_as(const WealthGrid& other, double rel_tol = 1e-12) const;

private:
    std::vector<double> nodes_;
    double stretch_ = 1.0;
};

}  // namespace ftpl

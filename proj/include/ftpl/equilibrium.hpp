#pragma once

#include "ftpl/model.hpp"
#include "ftpl/stationary.hpp"

#include <map>
#include <optional>
#include <span>
#include <vector>

namespace ftpl {

enum class ModelKind { Huggett, Aiyagari };

std::string_view to_string(ModelKind kind);

struct Residuals {
    double asset = 0.0;
    double goods = 0.0;
    double budget = 0.0;
};

struct EquilibriumResult {
    ModelKind kind = ModelKind::Huggett;
    double tau = 0.0;
    double r = 0.0;
    double B = 0.0;
    double K = 0.0;  // zero for Huggett
    double w = 1.0;
    double A = 0.0;
    double C = 0.0;
    Residuals residuals;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

enum class Verdict { None, Unique, Two, Many, Tangent, Family };

std::string_view to_string(Verdict verdict);

struct ExcessPoint {
    double r;
    double excess;
    bool accepted;  // budget-feasible sign of tau / r
};

struct EquilibriumScan {
    ModelKind kind = ModelKind::Huggett;
    double tau = 0.0;
    std::vector<EquilibriumResult> roots;     // sorted by r
    std::vector<EquilibriumResult> rejected;  // Aiyagari intersections with B < 0
    std::vector<ExcessPoint> excess_curve;
    Verdict verdict = Verdict::None;
    // Family verdict: the non-monetary equilibria fill (-inf, family_upper).
    std::optional<double> family_upper;
    // Tangent verdict: scan node with the smallest |excess|.
    std::optional<double> tangent_r;
};

// Unset bounds default to (max(r_lower, -delta) + 1e-4, rho - 1e-4); an unset
// step selects 400 mixed linear / logarithmic nodes clustered at 0.
struct ScanSpec {
    std::optional<double> r_min;
    std::optional<double> r_max;
    std::optional<double> step;
};

// Scan nodes on [lo, hi], r = 0 excluded.
std::vector<double> scan_rates(const ScanSpec& spec, double lo, double hi);

// Stationary asset demand A(r, 1, 0) and consumption C(r, 1, 0) of one economy,
// memoized by rate so that scans, refinements and experiments share solves.
class AssetDemand {
public:
    explicit AssetDemand(Economy economy);

    const Economy& economy() const noexcept { return economy_; }

    // Lower interest bound of the economy (rho for a single income state).
    double lower_bound() const noexcept { return lower_bound_; }

    const SweepRow& at(double r);
    SweepTable table(std::span<const double> rates);
    std::size_t solves() const noexcept { return rows_.size(); }

private:
    Economy economy_;
    double lower_bound_;
    std::map<double, SweepRow> rows_;
};

// r A(r, 1, 0) - tau / (1 - tau), with A interpolated linearly between the
// converged rows of a base sweep at (w = 1, tau = 0).
double huggett_excess(double r, double tau, const SweepTable& base);

// S(r) = alpha / (1 - alpha) / (r + delta) + tau / r.
double aiyagari_supply(double r, double tau, const FirmParams& firm);

// (1 - tau) A(r, 1, 0) - S(r) on the same interpolated base sweep.
double aiyagari_excess(double r, double tau, const FirmParams& firm, const SweepTable& base);

// Scan nodes the finders use for one model.
std::vector<double> market_scan_rates(const AssetDemand& demand, ModelKind kind, const FirmParams& firm,
                                      const ScanSpec& scan = {});

EquilibriumScan find_huggett_equilibria(AssetDemand& demand, double tau, const ScanSpec& scan = {});
EquilibriumScan find_aiyagari_equilibria(AssetDemand& demand, double tau, const FirmParams& firm,
                                         const ScanSpec& scan = {});

// Market-clearing and budget residuals, each divided by 1 + |A|. The firm is
// only consulted for Aiyagari candidates.
Residuals walras_check(const EquilibriumResult& candidate, const FirmParams& firm = {});

struct FixedPointTrace {
    bool converged = false;
    double r_star = 0.0;
    std::vector<double> rates;  // r_0, r_1, ...
};

// Damped iteration r <- (1 - theta) r + theta tau / A(r, 1, tau) of the
// Huggett fixed-point map.
FixedPointTrace fixed_point_iteration(AssetDemand& demand, double tau, double r0, double theta, int max_iter);

struct LimitRow {
    double alpha;
    std::vector<double> r_star;  // tracked roots, ascending
    std::vector<double> gap;     // distance to the matched Huggett root
};

struct LimitExperiment {
    std::vector<double> huggett_r;
    std::vector<LimitRow> rows;
};

LimitExperiment huggett_limit_experiment(AssetDemand& demand, double tau, std::span<const double> alphas,
                                         double delta, const ScanSpec& scan = {});

// P_t = B_nominal_0 / B* exp((i - r*) t).
double price_level(double nominal_debt, double nominal_rate, const EquilibriumResult& result, double t);

}  // namespace ftpl

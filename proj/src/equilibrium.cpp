#include "ftpl/equilibrium.hpp"

#include "ftpl/errors.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ftpl {

namespace {

constexpr double kEdge = 1e-4;
constexpr std::size_t kDefaultNodes = 400;
constexpr double kExcessTol = 1e-10;
constexpr double kTangentTol = 1e-8;
constexpr double kZeroAssets = 1e-12;
constexpr int kSubScan = 4;

int sign(double x) { return (x > 0.0) - (x < 0.0); }

// Excess demand of one model at a given tau, as a function of r and the base
// asset demand A(r, 1, 0).
struct Market {
    ModelKind kind;
    double tau;
    FirmParams firm;

    double excess(double r, double base_assets) const {
        if (kind == ModelKind::Huggett) return r * base_assets - tau / (1.0 - tau);
        return (1.0 - tau) * base_assets - aiyagari_supply(r, tau, firm);
    }

    // tau / r jumps through infinity at 0; a sign change across it is no root.
    bool pole_between(double lo, double hi) const {
        return kind == ModelKind::Aiyagari && tau != 0.0 && lo < 0.0 && hi > 0.0;
    }

    bool accepted(double r) const {
        if (kind == ModelKind::Huggett || tau == 0.0) return true;
        return tau / r >= 0.0;
    }
};

double exact_excess(AssetDemand& demand, const Market& market, double r) {
    const SweepRow& row = demand.at(r);
    if (!row.converged) {
        throw Error(ErrorKind::NonConvergence, fmt::format("solve at r = {} failed: {}", r, row.diagnostic));
    }
    return market.excess(r, row.assets);
}

EquilibriumResult make_result(AssetDemand& demand, const Market& market, double r, double lo, double hi) {
    const SweepRow& row = demand.at(r);
    if (!row.converged) {
        throw Error(ErrorKind::NonConvergence, fmt::format("solve at r = {} failed: {}", r, row.diagnostic));
    }
    EquilibriumResult res;
    res.kind = market.kind;
    res.tau = market.tau;
    res.r = r;
    res.bracket_lo = lo;
    res.bracket_hi = hi;
    if (market.kind == ModelKind::Huggett) {
        res.w = 1.0;
        res.K = 0.0;
        res.A = (1.0 - market.tau) * row.assets;
        res.B = res.A;
        res.C = (1.0 - market.tau) * row.consumption;
    } else {
        const auto fs = firm_side(market.firm, r);
        res.w = fs.wage;
        res.K = fs.capital;
        res.A = fs.wage * (1.0 - market.tau) * row.assets;
        res.B = market.tau == 0.0 ? 0.0 : fs.wage * market.tau / r;
        res.C = fs.wage * (1.0 - market.tau) * row.consumption;
    }
    res.residuals = walras_check(res, market.firm);
    return res;
}

double bisect(AssetDemand& demand, const Market& market, double lo, double hi, double e_lo) {
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double e = exact_excess(demand, market, mid);
        if (std::abs(e) < kExcessTol) return mid;
        if (sign(e) == sign(e_lo)) {
            lo = mid;
            e_lo = e;
        } else {
            hi = mid;
        }
    }
    const double e_hi = exact_excess(demand, market, hi);
    return std::abs(e_lo) <= std::abs(e_hi) ? lo : hi;
}

// Counts sign changes of the exact excess on a uniform sub-partition of a
// bracket; more than one means the scan step is too coarse to separate roots.
void check_single_crossing(AssetDemand& demand, const Market& market, double lo, double hi, double e_lo,
                           double e_hi) {
    int changes = 0;
    double prev = e_lo;
    for (int k = 1; k <= kSubScan; ++k) {
        const double e = k == kSubScan ? e_hi : exact_excess(demand, market, lo + (hi - lo) * k / kSubScan);
        if (sign(e) != 0 && sign(prev) != 0 && sign(e) != sign(prev)) ++changes;
        if (sign(e) != 0) prev = e;
    }
    if (changes > 1) {
        throw Error(ErrorKind::ScanTooCoarse,
                    fmt::format("{} sign changes of the excess inside [{}, {}]", changes, lo, hi));
    }
}

void sort_by_rate(std::vector<EquilibriumResult>& v) {
    std::sort(v.begin(), v.end(), [](const auto& a, const auto& b) { return a.r < b.r; });
}

Verdict count_verdict(std::size_t n) {
    switch (n) {
        case 0: return Verdict::None;
        case 1: return Verdict::Unique;
        case 2: return Verdict::Two;
        default: return Verdict::Many;
    }
}

EquilibriumScan scan_market(AssetDemand& demand, const Market& market, const std::vector<double>& rates) {
    EquilibriumScan out;
    out.kind = market.kind;
    out.tau = market.tau;

    struct Node {
        double r;
        double e;
    };
    std::vector<Node> nodes;
    for (double r : rates) {
        const SweepRow& row = demand.at(r);
        if (!row.converged) continue;
        const double e = market.excess(r, row.assets);
        nodes.push_back({r, e});
        out.excess_curve.push_back({r, e, market.accepted(r)});
    }

    std::vector<EquilibriumResult> found;
    double best_tangent = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
        const auto [lo, e_lo] = nodes[k];
        const auto [hi, e_hi] = nodes[k + 1];
        if (market.pole_between(lo, hi)) continue;
        if (e_lo == 0.0) {
            found.push_back(make_result(demand, market, lo, lo, lo));
            continue;
        }
        if (sign(e_lo) * sign(e_hi) < 0) {
            check_single_crossing(demand, market, lo, hi, e_lo, e_hi);
            const double r = bisect(demand, market, lo, hi, e_lo);
            found.push_back(make_result(demand, market, r, lo, hi));
            continue;
        }
        // Same sign at both ends: look for a pair of crossings hiding around a
        // local extremum, using the parabola through three nodes as a probe.
        if (k == 0 || market.pole_between(nodes[k - 1].r, hi)) continue;
        const auto [r0, e0] = nodes[k - 1];
        if ((e_lo - e0) * (e_hi - e_lo) >= 0.0) continue;
        const double d1 = (e_lo - e0) / (lo - r0);
        const double d2 = (e_hi - e_lo) / (hi - lo);
        const double curv = (d2 - d1) / (hi - r0);
        if (curv == 0.0) continue;
        const double vertex = 0.5 * (r0 + lo) - d1 / (2.0 * curv);
        if (!(vertex > r0 && vertex < hi) || vertex == 0.0) continue;
        const double predicted = e_lo + (vertex - lo) * (d1 + curv * (vertex - r0));
        if (sign(predicted) == sign(e_lo) && std::abs(predicted) > kTangentTol) continue;
        const double e_vertex = exact_excess(demand, market, vertex);
        if (sign(e_vertex) != 0 && sign(e_vertex) != sign(e_lo)) {
            throw Error(ErrorKind::ScanTooCoarse,
                        fmt::format("two sign changes of the excess between {} and {}", r0, hi));
        }
        if (std::abs(e_vertex) < kTangentTol && std::abs(e_vertex) < best_tangent) {
            best_tangent = std::abs(e_vertex);
            out.tangent_r = std::abs(e_lo) <= std::min(std::abs(e0), std::abs(e_hi)) ? lo
                            : std::abs(e0) < std::abs(e_hi)                           ? r0
                                                                                      : hi;
        }
    }

    for (auto& res : found) {
        if (market.accepted(res.r) && res.B >= 0.0) {
            out.roots.push_back(res);
        } else {
            out.rejected.push_back(res);
        }
    }
    sort_by_rate(out.roots);
    sort_by_rate(out.rejected);
    out.verdict = count_verdict(out.roots.size());
    if (out.roots.empty() && out.tangent_r) out.verdict = Verdict::Tangent;
    return out;
}

std::pair<double, double> scan_bounds(const AssetDemand& demand, const ScanSpec& scan, double floor) {
    const double lo = scan.r_min.value_or(floor + kEdge);
    const double hi = scan.r_max.value_or(demand.economy().rho - kEdge);
    if (!std::isfinite(lo)) {
        throw Error(ErrorKind::InvalidParameters, "scan needs an explicit r_min when the lower interest bound is unknown");
    }
    if (!(hi < demand.economy().rho)) {
        throw Error(ErrorKind::InvalidRate, fmt::format("scan r_max = {} must be below rho", hi));
    }
    return {lo, hi};
}

// A(r, 1, 0), linear between the converged rows of a sweep.
double interpolated_assets(double r, const SweepTable& base) {
    const SweepRow* below = nullptr;
    const SweepRow* above = nullptr;
    for (const auto& row : base.rows) {
        if (!row.converged) continue;
        if (row.r <= r) below = &row;
        if (row.r >= r) {
            above = &row;
            break;
        }
    }
    if (!below || !above) {
        throw Error(ErrorKind::OutOfSweepRange, fmt::format("r = {} is outside the converged sweep rows", r));
    }
    double a = below->assets;
    if (above != below) a += (r - below->r) / (above->r - below->r) * (above->assets - below->assets);
    return a / (base.w * (1.0 - base.tau));
}

void validate_tau(double tau) {
    if (!(tau < 1.0)) throw Error(ErrorKind::InvalidParameters, fmt::format("tau = {} must be < 1", tau));
}

}  // namespace

std::string_view to_string(ModelKind kind) {
    return kind == ModelKind::Huggett ? "huggett" : "aiyagari";
}

std::string_view to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::None: return "None";
        case Verdict::Unique: return "Unique";
        case Verdict::Two: return "Two";
        case Verdict::Many: return "Many";
        case Verdict::Tangent: return "Tangent";
        case Verdict::Family: return "Family";
    }
    return "?";
}

std::vector<double> scan_rates(const ScanSpec& spec, double lo, double hi) {
    if (!(hi > lo)) throw Error(ErrorKind::InvalidParameters, fmt::format("empty scan range [{}, {}]", lo, hi));
    std::vector<double> rates;
    if (spec.step) {
        const double step = *spec.step;
        if (!(step > 0.0)) throw Error(ErrorKind::InvalidParameters, "scan step must be positive");
        const auto count = static_cast<std::size_t>(std::floor((hi - lo) / step * (1.0 + 1e-12)));
        for (std::size_t k = 0; k <= count; ++k) {
            const double r = lo + static_cast<double>(k) * step;
            if (std::abs(r) > 1e-9 * step) rates.push_back(r);
        }
        return rates;
    }

    // Logarithmic clusters towards 0 (where tau / r is singular) and towards
    // the lower end, topped up with linear nodes.
    std::vector<double> cluster;
    auto log_nodes = [&](double from, double to, std::size_t n, auto map) {
        if (!(to > from)) return;
        for (std::size_t k = 0; k < n; ++k) {
            const double x = std::log10(from) + (std::log10(to) - std::log10(from)) * static_cast<double>(k) /
                                                    static_cast<double>(n - 1);
            cluster.push_back(map(std::pow(10.0, x)));
        }
    };
    constexpr double kInner = 1e-5;
    if (lo < 0.0) log_nodes(kInner, std::min(-lo, 0.5), 80, [](double x) { return -x; });
    if (hi > 0.0) log_nodes(kInner, hi, 80, [](double x) { return x; });
    log_nodes(kEdge * 1e-2, 0.5 * (hi - lo), 40, [lo](double x) { return lo + x; });

    for (std::size_t n_lin = kDefaultNodes - std::min(kDefaultNodes - 2, cluster.size());; ++n_lin) {
        rates = cluster;
        for (std::size_t k = 0; k < n_lin; ++k) {
            rates.push_back(k + 1 == n_lin ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n_lin - 1));
        }
        std::erase_if(rates, [&](double r) { return r < lo || r > hi || r == 0.0; });
        std::sort(rates.begin(), rates.end());
        rates.erase(std::unique(rates.begin(), rates.end(),
                                [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)); }),
                    rates.end());
        if (rates.size() >= kDefaultNodes || n_lin > 4 * kDefaultNodes) break;
    }
    return rates;
}

AssetDemand::AssetDemand(Economy economy) : economy_(std::move(economy)) {
    lower_bound_ = economy_.a_min == 0.0
                       ? lower_interest_bound(economy_.chain, economy_.utility, economy_.params(0.0))
                       : -std::numeric_limits<double>::infinity();
}

const SweepRow& AssetDemand::at(double r) {
    auto it = rows_.find(r);
    if (it == rows_.end()) it = rows_.emplace(r, sweep_row(economy_, r)).first;
    return it->second;
}

SweepTable AssetDemand::table(std::span<const double> rates) {
    SweepTable t{1.0, 0.0, {}};
    std::vector<double> sorted(rates.begin(), rates.end());
    std::sort(sorted.begin(), sorted.end());
    for (double r : sorted) t.rows.push_back(at(r));
    return t;
}

double huggett_excess(double r, double tau, const SweepTable& base) {
    validate_tau(tau);
    return r * interpolated_assets(r, base) - tau / (1.0 - tau);
}

double aiyagari_supply(double r, double tau, const FirmParams& firm) {
    firm.validate();
    if (!(r > -firm.delta)) {
        throw Error(ErrorKind::RateBelowNegDepreciation, fmt::format("r = {} must exceed -delta = {}", r, -firm.delta));
    }
    if (r == 0.0 && tau != 0.0) throw Error(ErrorKind::InvalidRate, "tau / r is undefined at r = 0");
    const double capital = firm.alpha / (1.0 - firm.alpha) / (r + firm.delta);
    return tau == 0.0 ? capital : capital + tau / r;
}

double aiyagari_excess(double r, double tau, const FirmParams& firm, const SweepTable& base) {
    validate_tau(tau);
    const double supply = aiyagari_supply(r, tau, firm);
    return (1.0 - tau) * interpolated_assets(r, base) - supply;
}

std::vector<double> market_scan_rates(const AssetDemand& demand, ModelKind kind, const FirmParams& firm,
                                      const ScanSpec& scan) {
    const double floor =
        kind == ModelKind::Huggett ? demand.lower_bound() : std::max(demand.lower_bound(), -firm.delta);
    const auto [lo, hi] = scan_bounds(demand, scan, floor);
    if (!(lo < hi)) return {};
    return scan_rates(scan, lo, hi);
}

EquilibriumScan find_huggett_equilibria(AssetDemand& demand, double tau, const ScanSpec& scan) {
    validate_tau(tau);
    const Market market{ModelKind::Huggett, tau, {}};
    const auto [lo, hi] = scan_bounds(demand, scan, demand.lower_bound());
    if (tau == 0.0) {
        // r A(r) = 0 holds at r = 0 and wherever A vanishes, i.e. below the
        // lower interest bound; r = 0 stands in for the family.
        EquilibriumScan out;
        out.tau = 0.0;
        if (lo < hi) {
            for (double r : scan_rates(scan, lo, hi)) {
                const SweepRow& row = demand.at(r);
                if (row.converged) out.excess_curve.push_back({r, market.excess(r, row.assets), true});
            }
        }
        out.roots.push_back(make_result(demand, market, 0.0, 0.0, 0.0));
        out.family_upper = demand.lower_bound();
        out.verdict = Verdict::Family;
        return out;
    }
    if (!(lo < hi)) {
        EquilibriumScan out;
        out.tau = tau;
        return out;
    }
    return scan_market(demand, market, scan_rates(scan, lo, hi));
}

EquilibriumScan find_aiyagari_equilibria(AssetDemand& demand, double tau, const FirmParams& firm,
                                         const ScanSpec& scan) {
    validate_tau(tau);
    firm.validate();
    const Market market{ModelKind::Aiyagari, tau, firm};
    const auto [lo, hi] = scan_bounds(demand, scan, std::max(demand.lower_bound(), -firm.delta));
    if (!(lo > -firm.delta)) {
        throw Error(ErrorKind::RateBelowNegDepreciation, fmt::format("scan r_min = {} must exceed -delta", lo));
    }
    if (!(lo < hi)) {
        EquilibriumScan out;
        out.kind = ModelKind::Aiyagari;
        out.tau = tau;
        return out;
    }
    return scan_market(demand, market, scan_rates(scan, lo, hi));
}

Residuals walras_check(const EquilibriumResult& c, const FirmParams& firm) {
    const double scale = 1.0 + std::abs(c.A);
    const double output = c.kind == ModelKind::Huggett ? 1.0 : std::pow(c.K, firm.alpha);
    const double depreciation = c.kind == ModelKind::Huggett ? 0.0 : firm.delta * c.K;
    return {std::abs(c.A - c.B - c.K) / scale, std::abs(c.C + depreciation - output) / scale,
            std::abs(c.r * c.B - c.w * c.tau) / scale};
}

FixedPointTrace fixed_point_iteration(AssetDemand& demand, double tau, double r0, double theta, int max_iter) {
    validate_tau(tau);
    if (!(theta > 0.0 && theta <= 1.0)) throw Error(ErrorKind::InvalidParameters, "damping must lie in (0, 1]");
    if (!(r0 < demand.economy().rho)) throw Error(ErrorKind::InvalidRate, "r0 must be below rho");
    FixedPointTrace trace;
    trace.rates.push_back(r0);
    double r = r0;
    for (int k = 0; k < max_iter; ++k) {
        const SweepRow& row = demand.at(r);
        if (!row.converged) {
            throw Error(ErrorKind::NonConvergence, fmt::format("solve at r = {} failed: {}", r, row.diagnostic));
        }
        const double assets = (1.0 - tau) * row.assets;
        if (!(assets > kZeroAssets)) {
            throw Error(ErrorKind::ZeroAssetDemand, fmt::format("A({}) = {} leaves tau / A undefined", r, assets));
        }
        const double next = (1.0 - theta) * r + theta * tau / assets;
        trace.rates.push_back(next);
        if (std::abs(next - r) < 1e-9) {
            trace.converged = true;
            trace.r_star = next;
            return trace;
        }
        if (!std::isfinite(next) || !(next < demand.economy().rho)) break;
        r = next;
    }
    return trace;
}

LimitExperiment huggett_limit_experiment(AssetDemand& demand, double tau, std::span<const double> alphas,
                                         double delta, const ScanSpec& scan) {
    validate_tau(tau);
    LimitExperiment out;
    const auto huggett = find_huggett_equilibria(demand, tau, scan);
    if (huggett.verdict == Verdict::Family) {
        out.huggett_r.push_back(std::max(demand.lower_bound(), -delta));
    } else {
        for (const auto& root : huggett.roots) out.huggett_r.push_back(root.r);
    }

    std::size_t tracked = 0;
    double previous_alpha = 0.0;
    for (double alpha : alphas) {
        const FirmParams firm{alpha, delta};
        ScanSpec aiyagari_scan = scan;
        aiyagari_scan.r_min.reset();
        const auto result = find_aiyagari_equilibria(demand, tau, firm, aiyagari_scan);
        LimitRow row{alpha, {}, {}};
        for (const auto& root : result.roots) row.r_star.push_back(root.r);
        if (tracked > 0 && row.r_star.size() != tracked) {
            throw Error(ErrorKind::RootLost, fmt::format("{} roots at alpha = {} but {} at alpha = {}", tracked,
                                                         previous_alpha, row.r_star.size(), alpha));
        }
        if (!row.r_star.empty() && row.r_star.size() == out.huggett_r.size()) {
            tracked = row.r_star.size();
            for (std::size_t j = 0; j < tracked; ++j) row.gap.push_back(std::abs(row.r_star[j] - out.huggett_r[j]));
        } else if (!row.r_star.empty()) {
            tracked = row.r_star.size();
            for (double r : row.r_star) {
                double g = std::numeric_limits<double>::infinity();
                for (double h : out.huggett_r) g = std::min(g, std::abs(r - h));
                row.gap.push_back(g);
            }
        }
        previous_alpha = alpha;
        out.rows.push_back(std::move(row));
    }
    return out;
}

double price_level(double nominal_debt, double nominal_rate, const EquilibriumResult& result, double t) {
    if (!(result.B > 0.0)) {
        throw Error(ErrorKind::NonMonetary, "real debt is zero, so the price level is not pinned down");
    }
    return nominal_debt / result.B * std::exp((nominal_rate - result.r) * t);
}

}  // namespace ftpl

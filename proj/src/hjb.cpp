#include "ftpl/hjb.hpp"

#include "ftpl/errors.hpp"

#include <Eigen/SparseLU>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace ftpl {

namespace {

constexpr double kMarginalFloor = 1e-12;
constexpr double kConsumptionCap = 100.0;
constexpr int kMaxTruncationDoublings = 6;

enum class Branch : std::uint8_t { Backward, Still, Forward };

struct Policy {
    Eigen::MatrixXd c;
    Eigen::MatrixXd s;
    Eigen::MatrixXd utility;
    std::vector<Branch> branch;  // column-major, z * N + i
};

class Discretization {
public:
    Discretization(const IncomeChain& chain, const Utility& utility, const HouseholdParams& params,
                   const WealthGrid& grid)
        : chain_(chain), utility_(utility), params_(params), grid_(grid),
          n_(grid.size()), d_(chain.size()), income_(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(d_)) {
        for (std::size_t z = 0; z < d_; ++z) {
            for (std::size_t i = 0; i < n_; ++i) income_(idx(i), idx(z)) = params.r * grid[i] + params.net_wage() * chain.state(z);
        }
        // Marginal values below u'(c_cap) would select consumption so large that
        // the implied jump rate swamps double precision in policy evaluation.
        const double span = grid.back() - grid.front();
        const double resources = (params.rho + std::abs(params.r)) * span + std::abs(params.r * params.a_min) +
                                 params.net_wage() * chain.highest();
        floor_ = std::max(kMarginalFloor, utility.marginal(kConsumptionCap * resources));
    }

    static Eigen::Index idx(std::size_t i) { return static_cast<Eigen::Index>(i); }
    Eigen::Index flat(std::size_t i, std::size_t z) const { return static_cast<Eigen::Index>(z * n_ + i); }

    // Upwind policy improvement.
    Policy improve(const Eigen::MatrixXd& v) const {
        Policy p{Eigen::MatrixXd(idx(n_), idx(d_)), Eigen::MatrixXd(idx(n_), idx(d_)),
                 Eigen::MatrixXd(idx(n_), idx(d_)), std::vector<Branch>(n_ * d_)};
        for (std::size_t z = 0; z < d_; ++z) {
            for (std::size_t i = 0; i < n_; ++i) {
                const double inc = income_(idx(i), idx(z));
                double c_fwd = inc;
                double c_bwd = inc;
                double s_fwd = 0.0;  // state constraint at the top
                double s_bwd = 0.0;  // state constraint at the borrowing limit
                if (i + 1 < n_) {
                    const double va_fwd = std::max((v(idx(i + 1), idx(z)) - v(idx(i), idx(z))) / grid_.width(i), floor_);
                    c_fwd = utility_.inverse_marginal(va_fwd);
                    s_fwd = inc - c_fwd;
                }
                if (i > 0) {
                    const double va_bwd = std::max((v(idx(i), idx(z)) - v(idx(i - 1), idx(z))) / grid_.width(i - 1), floor_);
                    c_bwd = utility_.inverse_marginal(va_bwd);
                    s_bwd = inc - c_bwd;
                }
                Branch b = Branch::Still;
                double c = inc;
                if (s_fwd > 0.0 && s_bwd >= 0.0) {
                    b = Branch::Forward;
                    c = c_fwd;
                } else if (s_bwd < 0.0 && s_fwd <= 0.0) {
                    b = Branch::Backward;
                    c = c_bwd;
                }
                p.branch[z * n_ + i] = b;
                p.c(idx(i), idx(z)) = c;
                p.s(idx(i), idx(z)) = b == Branch::Still ? 0.0 : inc - c;
                p.utility(idx(i), idx(z)) = utility_.value(c);
            }
        }
        return p;
    }

    SparseMatrix generator(const Policy& p) const {
        std::vector<Eigen::Triplet<double>> entries;
        entries.reserve(n_ * d_ * (2 + d_));
        for (std::size_t z = 0; z < d_; ++z) {
            const double out = chain_.exit_rate(z);
            for (std::size_t i = 0; i < n_; ++i) {
                const auto row = flat(i, z);
                const double s = p.s(idx(i), idx(z));
                double diag = -out;
                switch (p.branch[z * n_ + i]) {
                    case Branch::Forward: {
                        const double rate = s / grid_.width(i);
                        entries.emplace_back(row, flat(i + 1, z), rate);
                        diag -= rate;
                        break;
                    }
                    case Branch::Backward: {
                        const double rate = -s / grid_.width(i - 1);
                        entries.emplace_back(row, flat(i - 1, z), rate);
                        diag -= rate;
                        break;
                    }
                    case Branch::Still: break;
                }
                for (std::size_t y = 0; y < d_; ++y) {
                    if (y != z && chain_.rate(z, y) > 0.0) entries.emplace_back(row, flat(i, y), chain_.rate(z, y));
                }
                entries.emplace_back(row, row, diag);
            }
        }
        SparseMatrix a(static_cast<Eigen::Index>(n_ * d_), static_cast<Eigen::Index>(n_ * d_));
        a.setFromTriplets(entries.begin(), entries.end());
        return a;
    }

    double residual(const Eigen::MatrixXd& v, const Policy& p, const SparseMatrix& a) const {
        const Eigen::VectorXd flat_v = v.reshaped();
        const Eigen::VectorXd r = params_.rho * flat_v - p.utility.reshaped() - a * flat_v;
        return r.lpNorm<Eigen::Infinity>();
    }

    Eigen::MatrixXd evaluate(const Policy& p, const SparseMatrix& a) const {
        const auto size = static_cast<Eigen::Index>(n_ * d_);
        SparseMatrix system(size, size);
        system.setIdentity();
        system *= params_.rho;
        system -= a;
        system.makeCompressed();
        Eigen::SparseLU<SparseMatrix> lu;
        lu.compute(system);
        if (lu.info() != Eigen::Success) throw Error(ErrorKind::NonConvergence, "policy evaluation matrix is singular");
        const Eigen::VectorXd rhs = p.utility.reshaped();
        Eigen::VectorXd sol = lu.solve(rhs);
        return sol.reshaped(idx(n_), idx(d_));
    }

    // Value of consuming the income flow; for r < 0 the slope is mirrored so
    // that the guess stays increasing in wealth.
    Eigen::MatrixXd initial_guess() const {
        Eigen::MatrixXd v(idx(n_), idx(d_));
        const double slope = std::abs(params_.r);
        for (std::size_t z = 0; z < d_; ++z) {
            for (std::size_t i = 0; i < n_; ++i) {
                const double flow = params_.r * params_.a_min + slope * (grid_[i] - params_.a_min) +
                                    params_.net_wage() * chain_.state(z);
                v(idx(i), idx(z)) = utility_.value(flow) / params_.rho;
            }
        }
        return v;
    }

private:
    const IncomeChain& chain_;
    const Utility& utility_;
    const HouseholdParams& params_;
    const WealthGrid& grid_;
    std::size_t n_;
    std::size_t d_;
    Eigen::MatrixXd income_;
    double floor_ = kMarginalFloor;
};

}  // namespace

void SolverSettings::validate() const {
    std::vector<std::string> violations;
    if (!(tol > 0.0)) violations.push_back(fmt::format("tol = {} must be positive", tol));
    if (n < 50) violations.push_back(fmt::format("n = {} must be at least 50", n));
    if (a_max && !(*a_max > 0.0)) violations.push_back(fmt::format("a_max = {} must be positive", *a_max));
    if (!(stretch >= 1.0)) violations.push_back(fmt::format("stretch = {} must be >= 1", stretch));
    if (max_iter < 0) violations.push_back("max_iter must be nonnegative");
    if (!violations.empty()) {
        std::string msg;
        for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v;
        throw Error(ErrorKind::InvalidParameters, msg);
    }
}

double initial_truncation(const IncomeChain& chain, const HouseholdParams& params) {
    return 4.0 * std::max(1.0, chain.highest() / (params.rho - params.r)) * params.net_wage();
}

HouseholdSolution solve_household_on_grid(const IncomeChain& chain, const Utility& utility,
                                          const HouseholdParams& params, const WealthGrid& grid,
                                          double tol, int max_iter) {
    if (!(params.r < params.rho)) {
        throw Error(ErrorKind::InvalidRate, fmt::format("r = {} must be below rho = {}", params.r, params.rho));
    }
    params.validate(chain);
    if (grid.front() != params.a_min) throw Error(ErrorKind::GridMismatch, "grid must start at the borrowing limit");

    const Discretization disc(chain, utility, params, grid);
    Eigen::MatrixXd v = disc.initial_guess();
    Policy policy = disc.improve(v);
    SparseMatrix a = disc.generator(policy);
    double res = disc.residual(v, policy, a);

    int it = 0;
    if (max_iter <= 0) throw NonConvergenceError(0, res);
    while (it < max_iter) {
        v = disc.evaluate(policy, a);
        ++it;
        policy = disc.improve(v);
        a = disc.generator(policy);
        res = disc.residual(v, policy, a);
        if (res <= tol) break;
    }
    if (!(res <= tol)) throw NonConvergenceError(it, res);

    HouseholdSolution sol{grid, chain, utility, params, v, Eigen::MatrixXd(), policy.c, policy.s, a, it, res};
    sol.v_a = policy.c.unaryExpr([&](double c) { return utility.marginal(c); });
    return sol;
}

HouseholdSolution solve_household(const IncomeChain& chain, const Utility& utility,
                                  const HouseholdParams& params, const SolverSettings& settings) {
    settings.validate();
    if (!(params.r < params.rho)) {
        throw Error(ErrorKind::InvalidRate, fmt::format("r = {} must be below rho = {}", params.r, params.rho));
    }
    params.validate(chain);
    if (settings.a_max) {
        const auto grid = WealthGrid::make(params.a_min, *settings.a_max, settings.n, settings.stretch);
        return solve_household_on_grid(chain, utility, params, grid, settings.tol, settings.max_iter);
    }
    double span = initial_truncation(chain, params);
    for (int k = 0; k <= kMaxTruncationDoublings; ++k, span *= 2.0) {
        const auto grid = WealthGrid::make(params.a_min, params.a_min + span, settings.n, settings.stretch);
        auto sol = solve_household_on_grid(chain, utility, params, grid, settings.tol, settings.max_iter);
        bool dissaves = true;
        for (std::size_t z = 0; z < chain.size(); ++z) {
            dissaves = dissaves && sol.s(static_cast<Eigen::Index>(grid.size() - 1), static_cast<Eigen::Index>(z)) < 0.0;
        }
        if (dissaves) return sol;
    }
    throw Error(ErrorKind::TruncationTooSmall,
                fmt::format("savings still nonnegative at a_max = {} after {} doublings", params.a_min + span / 2.0,
                            kMaxTruncationDoublings));
}

Eigen::MatrixXd euler_residual(const HouseholdSolution& sol) {
    const std::size_t n = sol.nodes();
    const std::size_t d = sol.states();
    const auto& p = sol.params;
    const double drift_tol = 1e-10 * (1.0 + std::abs(p.r) * sol.grid.back());
    Eigen::MatrixXd out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));

    auto second_difference = [&](std::size_t centre, std::size_t z) {
        const auto zi = static_cast<Eigen::Index>(z);
        const auto c = static_cast<Eigen::Index>(centre);
        const double hp = sol.grid.width(centre);
        const double hm = sol.grid.width(centre - 1);
        const double up = (sol.v(c + 1, zi) - sol.v(c, zi)) / hp;
        const double down = (sol.v(c, zi) - sol.v(c - 1, zi)) / hm;
        return 2.0 * (up - down) / (hp + hm);
    };

    for (std::size_t z = 0; z < d; ++z) {
        for (std::size_t i = 0; i < n; ++i) {
            const auto ii = static_cast<Eigen::Index>(i);
            const auto zi = static_cast<Eigen::Index>(z);
            double jump = 0.0;
            for (std::size_t y = 0; y < d; ++y) {
                if (y != z) jump += sol.chain.rate(z, y) * (sol.v_a(ii, static_cast<Eigen::Index>(y)) - sol.v_a(ii, zi));
            }
            double value = (p.rho - p.r) * sol.v_a(ii, zi) - jump;
            const double s = sol.s(ii, zi);
            if (std::abs(s) >= drift_tol) {
                const std::size_t centre = std::clamp<std::size_t>(i, 1, n - 2);
                value -= second_difference(centre, z) * s;
            }
            out(ii, zi) = value;
        }
    }
    return out;
}

double dissaving_threshold(const HouseholdSolution& sol) {
    const std::size_t n = sol.nodes();
    for (std::size_t i = n; i-- > 0;) {
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t z = 0; z < sol.states(); ++z) {
            best = std::max(best, sol.s(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(z)));
        }
        if (best >= 0.0) {
            if (i == n - 1) {
                throw Error(ErrorKind::TruncationTooSmall, "some income state saves at the truncation boundary");
            }
            return sol.grid[i];
        }
    }
    throw Error(ErrorKind::TruncationTooSmall, "no saving node found");
}

ScaledPolicy scaled_consumption(const HouseholdSolution& base, double w, double tau) {
    if (base.params.a_min != 0.0) {
        throw Error(ErrorKind::UnsupportedBorrowingLimit, "CRRA scaling requires a zero borrowing limit");
    }
    if (base.params.w != 1.0 || base.params.tau != 0.0) {
        throw Error(ErrorKind::InvalidParameters, "base solution must be computed at w = 1, tau = 0");
    }
    if (!(w > 0.0) || !(tau < 1.0)) throw Error(ErrorKind::InvalidParameters, "need w > 0 and tau < 1");
    const double k = w * (1.0 - tau);
    return {base.grid.scaled(k), base.c * k};
}

Occupancy::Occupancy(std::size_t nodes, std::size_t states)
    : time_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(nodes), static_cast<Eigen::Index>(states))),
      crossings_(states, std::vector<double>(2 * nodes - 1, 0.0)) {}

void Occupancy::add_crossings(std::size_t z, std::size_t first, std::size_t end) {
    if (first >= end) return;
    crossings_[z][first] += 1.0;
    crossings_[z][end] -= 1.0;
}

Eigen::MatrixXd Occupancy::times(const DriftField& field) const {
    Eigen::MatrixXd out = time_;
    for (std::size_t z = 0; z < crossings_.size(); ++z) {
        double count = 0.0;
        for (std::size_t k = 0; k < field.pieces(); ++k) {
            count += crossings_[z][k];
            if (count != 0.0) {
                out(static_cast<Eigen::Index>(DriftField::owner(k)), static_cast<Eigen::Index>(z)) +=
                    count * field.crossing_time(z, k);
            }
        }
    }
    return out;
}

DriftField::DriftField(const HouseholdSolution& sol)
    : grid_(sol.grid), drift_(sol.states()), slope_(sol.states()), points_(2 * sol.nodes() - 1),
      at_points_(sol.states()), cross_(sol.states()), elapsed_(sol.states()), up_stop_(sol.states()),
      down_stop_(sol.states()) {
    const std::size_t n = grid_.size();
    for (std::size_t i = 0; i < n; ++i) {
        points_[2 * i] = grid_[i];
        if (i + 1 < n) points_[2 * i + 1] = 0.5 * (grid_[i] + grid_[i + 1]);
    }
    const std::size_t m = pieces();
    constexpr double inf = std::numeric_limits<double>::infinity();
    for (std::size_t z = 0; z < sol.states(); ++z) {
        const auto col = sol.s.col(static_cast<Eigen::Index>(z));
        auto& s = drift_[z];
        s.assign(col.begin(), col.end());
        slope_[z].resize(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i) slope_[z][i] = (s[i + 1] - s[i]) / grid_.width(i);
        auto& sp = at_points_[z];
        sp.resize(points_.size());
        for (std::size_t i = 0; i < n; ++i) {
            sp[2 * i] = s[i];
            if (i + 1 < n) sp[2 * i + 1] = 0.5 * (s[i] + s[i + 1]);
        }
        auto& cross = cross_[z];
        auto& elapsed = elapsed_[z];
        cross.assign(m, inf);
        elapsed.assign(m + 1, 0.0);
        for (std::size_t k = 0; k < m; ++k) {
            const bool same_sign = (sp[k] > 0.0 && sp[k + 1] > 0.0) || (sp[k] < 0.0 && sp[k + 1] < 0.0);
            if (same_sign) {
                cross[k] = sp[k] > 0.0 ? time_between(z, k, points_[k], points_[k + 1])
                                       : time_between(z, k, points_[k + 1], points_[k]);
            }
            elapsed[k + 1] = elapsed[k] + (std::isfinite(cross[k]) ? cross[k] : 0.0);
        }
        auto& up = up_stop_[z];
        up.assign(m + 1, m);
        for (std::size_t k = m; k-- > 0;) up[k] = (sp[k] > 0.0 && sp[k + 1] > 0.0) ? up[k + 1] : k;
        auto& down = down_stop_[z];
        down.assign(m, -1);
        for (std::size_t k = 0; k < m; ++k) {
            const bool open = sp[k] < 0.0 && sp[k + 1] < 0.0;
            down[k] = open ? (k == 0 ? -1 : down[k - 1]) : static_cast<std::ptrdiff_t>(k);
        }
    }
    snap_ = 1e-9 * (grid_.back() - grid_.front());
}

double DriftField::drift(double a, std::size_t z) const {
    const double s = grid_.interpolate(drift_[z], a);
    if (a <= grid_.front() && s < 0.0) return 0.0;
    if (a >= grid_.back() && s > 0.0) return 0.0;
    return s;
}

std::size_t DriftField::piece_of(double a) const {
    const std::size_t i = grid_.locate(a);
    return a >= points_[2 * i + 1] ? 2 * i + 1 : 2 * i;
}

double DriftField::velocity(std::size_t z, std::size_t piece, double a) const {
    const std::size_t i = piece / 2;
    return drift_[z][i] + slope_[z][i] * (a - grid_[i]);
}

double DriftField::time_between(std::size_t z, std::size_t piece, double x, double y) const {
    const double vx = velocity(z, piece, x);
    const double q = (velocity(z, piece, y) - vx) / vx;
    return (y - x) / vx * (q == 0.0 ? 1.0 : std::log1p(q) / q);
}

double DriftField::move_for(std::size_t z, std::size_t piece, double x, double t) const {
    const double v = velocity(z, piece, x);
    const double m = slope(z, piece);
    return m == 0.0 ? x + v * t : x + v * std::expm1(m * t) / m;
}

double DriftField::advance(double a, std::size_t z, double duration, Occupancy* occupancy) const {
    const auto& sp = at_points_[z];
    const auto& elapsed = elapsed_[z];
    const double lo = grid_.front();
    const double hi = grid_.back();
    const std::size_t m = pieces();
    auto record = [&](std::size_t piece, double dt) {
        if (occupancy) occupancy->add(z, owner(piece), dt);
    };
    // Partial move inside one piece, kept within its bounds.
    auto settle = [&](std::size_t piece, double from, double dt) {
        record(piece, dt);
        return std::clamp(move_for(z, piece, from, dt), points_[piece], points_[piece + 1]);
    };

    a = std::clamp(a, lo, hi);
    const std::size_t k = piece_of(a);
    double rem = duration;
    const double v = velocity(z, k, a);
    if (!(rem > 0.0)) return a;
    if (v == 0.0 || (a <= lo && v < 0.0) || (a >= hi && v > 0.0)) {
        record(k, rem);
        return a;
    }

    if (v > 0.0) {
        const double top = points_[k + 1];
        if (!(sp[k + 1] > 0.0)) return settle(k, a, rem);
        const double t1 = time_between(z, k, a, top);
        if (t1 >= rem) return settle(k, a, rem);
        record(k, t1);
        rem -= t1;
        const std::size_t j0 = k + 1;
        if (j0 == m) {
            record(m - 1, rem);
            return hi;
        }
        const std::size_t stop = up_stop_[z][j0];
        const double avail = elapsed[stop] - elapsed[j0];
        if (rem >= avail) {
            if (occupancy) occupancy->add_crossings(z, j0, stop);
            rem -= avail;
            if (stop == m) {
                record(m - 1, rem);
                return hi;
            }
            return settle(stop, points_[stop], rem);
        }
        const auto it = std::upper_bound(elapsed.begin() + static_cast<std::ptrdiff_t>(j0),
                                         elapsed.begin() + static_cast<std::ptrdiff_t>(stop), elapsed[j0] + rem);
        const auto j = static_cast<std::size_t>(it - elapsed.begin()) - 1;
        if (occupancy) occupancy->add_crossings(z, j0, j);
        rem -= elapsed[j] - elapsed[j0];
        return settle(j, points_[j], std::max(rem, 0.0));
    }

    const double bottom = points_[k];
    if (!(sp[k] < 0.0)) return settle(k, a, rem);
    const double t1 = time_between(z, k, a, bottom);
    if (t1 >= rem) return settle(k, a, rem);
    record(k, t1);
    rem -= t1;
    if (k == 0) {
        record(0, rem);
        return lo;
    }
    const std::ptrdiff_t stop = down_stop_[z][k - 1];
    const auto first_open = static_cast<std::size_t>(stop + 1);
    const double avail = elapsed[k] - elapsed[first_open];
    if (rem >= avail) {
        if (occupancy) occupancy->add_crossings(z, first_open, k);
        rem -= avail;
        if (stop < 0) {
            record(0, rem);
            return lo;
        }
        const auto piece = static_cast<std::size_t>(stop);
        return settle(piece, points_[piece + 1], rem);
    }
    const auto it = std::lower_bound(elapsed.begin() + static_cast<std::ptrdiff_t>(first_open),
                                     elapsed.begin() + static_cast<std::ptrdiff_t>(k) + 1, elapsed[k] - rem);
    const auto j = std::max(static_cast<std::size_t>(it - elapsed.begin()), first_open + 1);
    if (occupancy) occupancy->add_crossings(z, j, k);
    rem -= elapsed[k] - elapsed[j];
    return settle(j - 1, points_[j], std::max(rem, 0.0));
}

double DriftField::trace(double a, std::size_t z, double duration, const StepObserver& on_step) const {
    const auto& s = drift_[z];
    const double lo = grid_.front();
    const double hi = grid_.back();
    const std::size_t last_cell = grid_.size() - 2;
    a = std::clamp(a, lo, hi);
    std::size_t i = grid_.locate(a);
    double t = 0.0;
    while (t < duration) {
        const double rem = duration - t;
        const double slope = (s[i + 1] - s[i]) / grid_.width(i);
        const double v = s[i] + slope * (a - grid_[i]);
        if (v == 0.0 || (a <= lo && v < 0.0) || (a >= hi && v > 0.0)) {
            if (on_step) on_step(t, a, duration, a);
            return a;
        }
        if (v < 0.0 && a - lo <= snap_ && a > lo) {
            a = lo;
            i = 0;
            continue;
        }
        const bool up = v > 0.0;
        if (!up && a <= grid_[i] && i > 0) {
            --i;
            continue;
        }
        // Next breakpoint in the direction of motion: a node or a midpoint.
        const double mid = 0.5 * (grid_[i] + grid_[i + 1]);
        double b = up ? (a < mid ? mid : grid_[i + 1]) : (a > mid ? mid : grid_[i]);
        double vb = s[i] + slope * (b - grid_[i]);
        if (!up && i == 0 && b == lo && vb >= 0.0 && a - lo > snap_) {
            // Approach to the limit is exponential; stop one snap distance short.
            const double near = s[0] + slope * snap_;
            if (near < 0.0) {
                b = lo + snap_;
                vb = near;
            }
        }
        double tau = std::numeric_limits<double>::infinity();
        if (up ? vb > 0.0 : vb < 0.0) tau = slope == 0.0 ? (b - a) / v : std::log(vb / v) / slope;
        if (tau >= rem) {
            double end = slope == 0.0 ? a + v * rem : a + v * std::expm1(slope * rem) / slope;
            end = std::clamp(end, std::min(a, b), std::max(a, b));
            if (on_step) on_step(t, a, duration, end);
            return end;
        }
        if (on_step) on_step(t, a, t + tau, b);
        t += tau;
        a = b;
        if (up && b == grid_[i + 1] && i < last_cell) ++i;
    }
    return a;
}

IncomeJumps::IncomeJumps(const IncomeChain& chain) : exit_(chain.size()), cumulative_(chain.size()) {
    for (std::size_t z = 0; z < chain.size(); ++z) {
        exit_[z] = chain.exit_rate(z);
        double acc = 0.0;
        cumulative_[z].resize(chain.size());
        for (std::size_t y = 0; y < chain.size(); ++y) {
            if (y != z) acc += chain.rate(z, y);
            cumulative_[z][y] = acc;
        }
    }
}

std::vector<PathPoint> simulate_path(const HouseholdSolution& sol, double a0, std::size_t z0, double horizon,
                                     std::uint64_t seed) {
    if (a0 < sol.params.a_min) throw Error(ErrorKind::InvalidParameters, "initial wealth below the borrowing limit");
    if (!(horizon > 0.0)) throw Error(ErrorKind::InvalidParameters, "horizon must be positive");
    if (z0 >= sol.states()) throw Error(ErrorKind::InvalidParameters, "initial income state out of range");

    const DriftField field(sol);
    const IncomeJumps jumps(sol.chain);
    std::mt19937_64 rng(seed);
    std::vector<std::vector<double>> consumption(sol.states());
    for (std::size_t z = 0; z < sol.states(); ++z) {
        const auto col = sol.c.col(static_cast<Eigen::Index>(z));
        consumption[z].assign(col.begin(), col.end());
    }
    auto c_at = [&](double a, std::size_t z) { return sol.grid.interpolate(consumption[z], a); };

    std::vector<PathPoint> path;
    double a = std::clamp(a0, field.lower(), field.upper());
    std::size_t z = z0;
    double t = 0.0;
    path.push_back({t, a, z, c_at(a, z)});
    while (t < horizon) {
        const double hold = jumps.holding_time(z, rng);
        const double segment = std::min(hold, horizon - t);
        const double start = t;
        a = field.trace(a, z, segment, [&](double, double, double t1, double a1) {
            path.push_back({start + t1, a1, z, c_at(a1, z)});
        });
        t = start + segment;
        if (hold <= segment && t < horizon) {
            z = jumps.next_state(z, rng);
            path.push_back({t, a, z, c_at(a, z)});
        }
    }
    return path;
}

}  // namespace ftpl

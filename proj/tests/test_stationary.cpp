#include "support.hpp"

#include "ftpl/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace ftpl;
using doctest::Approx;

namespace {

ErrorKind kind_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an error");
    return ErrorKind::InvalidParameters;
}

const StationaryDistribution& e0_distribution() {
    static const StationaryDistribution dist = stationary_kfe(testing::e0_solution());
    return dist;
}

// Wealth CDF of a distribution evaluated at a.
double cdf(const StationaryDistribution& dist, double a) {
    const Eigen::VectorXd m = dist.wealth_marginal();
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.grid.size() && dist.grid[i] <= a; ++i) acc += m(static_cast<Eigen::Index>(i));
    return acc;
}

// Kantorovich distance of the wealth marginals (bounded-Lipschitz upper bound).
double wasserstein(const StationaryDistribution& p, const StationaryDistribution& q) {
    const double hi = std::max(p.grid.back(), q.grid.back());
    constexpr int kPoints = 20000;
    const double h = hi / kPoints;
    double sum = 0.0;
    for (int k = 0; k < kPoints; ++k) sum += std::abs(cdf(p, (k + 0.5) * h) - cdf(q, (k + 0.5) * h)) * h;
    return sum;
}

}  // namespace

TEST_CASE("stationary: E0 distribution at r = 0.03") {
    const auto& sol = testing::e0_solution();
    const auto& dist = e0_distribution();
    CHECK(dist.g.minCoeff() >= 0.0);
    CHECK(dist.g.sum() == Approx(1.0).epsilon(1e-12));
    const Eigen::VectorXd income = dist.income_marginal();
    CHECK(income(0) == Approx(0.5).epsilon(1e-9));
    CHECK(income(1) == Approx(0.5).epsilon(1e-9));
    CHECK(dist.boundary_mass > 0.0);
    CHECK(dist.boundary_mass < 1.0);
    CHECK(dist.g(0, 1) < 1e-3 * dist.g(0, 0));
    CHECK(dist.support_upper <= dissaving_threshold(sol) + 1e-12);

    const auto agg = aggregates(dist, sol);
    CHECK(agg.assets > 0.0);
    CHECK(std::abs(agg.consumption - 0.03 * agg.assets - 1.0) < 1e-8);
}

TEST_CASE("stationary: point masses") {
    const auto poor = solve_household(testing::e0_chain(), Utility(1.0), testing::e0_params(-0.8), testing::e0_settings());
    const auto dist = stationary_kfe(poor);
    CHECK(dist.boundary_mass == Approx(1.0).epsilon(1e-9));
    const auto agg = aggregates(dist, poor);
    CHECK(agg.assets == Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(agg.consumption == Approx(1.0).epsilon(1e-9));

    const auto single =
        solve_household(testing::single_state_chain(), Utility(1.0), testing::e0_params(0.02), testing::coarse_settings());
    const auto point = stationary_kfe(single);
    CHECK(point.boundary_mass == Approx(1.0).epsilon(1e-12));
    CHECK(point.support_upper == 0.0);
    CHECK(aggregates(point, single).assets == Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("stationary: goods market identity at r = 0") {
    const auto sol = solve_household(testing::e0_chain(), Utility(1.0), testing::e0_params(0.0), testing::e0_settings());
    const auto agg = aggregates(stationary_kfe(sol), sol);
    CHECK(agg.consumption == Approx(1.0).epsilon(1e-9));
}

TEST_CASE("stationary: grid mismatch and histogram errors") {
    const auto other = solve_household(testing::e0_chain(), Utility(1.0), testing::e0_params(0.03), testing::coarse_settings());
    CHECK(kind_of([&] { aggregates(e0_distribution(), other); }) == ErrorKind::GridMismatch);
    CHECK(kind_of([&] { wealth_histogram(e0_distribution(), 0, 0.0, 1.0); }) == ErrorKind::InvalidParameters);
    CHECK(kind_of([&] { total_variation(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(4)); }) ==
          ErrorKind::GridMismatch);
    const Eigen::VectorXd h = wealth_histogram(e0_distribution(), 50, 0.0, e0_distribution().support_upper);
    CHECK(h.sum() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("stationary: Monte Carlo occupation measure") {
    const auto& sol = testing::e0_solution();
    const auto one = stationary_montecarlo(sol, 1, 50.0, 50.0, 1);
    CHECK(one.g.sum() == Approx(1.0).epsilon(1e-12));
    CHECK(one.g.minCoeff() >= -1e-12);
    const auto other = stationary_montecarlo(sol, 1, 50.0, 50.0, 2);
    CHECK((one.g - other.g).cwiseAbs().maxCoeff() > 0.0);
    const auto again = stationary_montecarlo(sol, 1, 50.0, 50.0, 1);
    CHECK((one.g - again.g).cwiseAbs().maxCoeff() == 0.0);

    const auto& kfe = e0_distribution();
    const auto mc = stationary_montecarlo(sol, 5000, 200.0, 100.0, 42);
    const double hi = kfe.support_upper;
    CHECK(total_variation(wealth_histogram(kfe, 50, 0.0, hi), wealth_histogram(mc, 50, 0.0, hi)) < 0.05);
    CHECK(mc.boundary_mass == Approx(kfe.boundary_mass).epsilon(0.1));

    CHECK(kind_of([&] { stationary_montecarlo(sol, 0, 1.0, 1.0, 1); }) == ErrorKind::InvalidParameters);
    CHECK(kind_of([&] { stationary_montecarlo(sol, 1, 0.0, 1.0, 1); }) == ErrorKind::InvalidParameters);
}

TEST_CASE("stationary: laws started away from equilibrium approach the stationary one") {
    const auto& sol = testing::e0_solution();
    const auto& kfe = e0_distribution();
    const double hi = kfe.support_upper;
    const Eigen::VectorXd target = wealth_histogram(kfe, 50, 0.0, hi);
    std::vector<double> tv;
    for (double t : {2.0, 10.0, 200.0}) {
        const auto law = empirical_law_at(sol, 20000, t, 0.0, 0, 3);
        tv.push_back(total_variation(wealth_histogram(law, 50, 0.0, hi), target));
    }
    CHECK(tv[0] > tv[1]);
    CHECK(tv[1] > tv[2]);
    CHECK(tv[2] < 0.05);
}

TEST_CASE("stationary: sweep of asset demand") {
    const auto economy = testing::e0_economy();
    std::vector<double> rates;
    for (int k = 0; k < 50; ++k) rates.push_back(-0.5 + (0.045 + 0.5) * k / 49.0);
    const auto table = sweep_A(economy, rates, 1.0, 0.0);
    REQUIRE(table.rows.size() == 50);
    for (std::size_t k = 0; k < table.rows.size(); ++k) {
        const auto& row = table.rows[k];
        CHECK(row.converged);
        CHECK(std::abs(row.consumption - row.r * row.assets - 1.0) < 1e-8);
        if (k > 0) CHECK(row.assets > table.rows[k - 1].assets);
    }

    // Rescaling to another net wage multiplies the aggregates.
    const std::vector<double> two{0.0, 0.03};
    const auto scaled = sweep_A(economy, two, 2.0, -0.2);
    const auto base = sweep_A(economy, two, 1.0, 0.0);
    for (std::size_t k = 0; k < 2; ++k) {
        CHECK(scaled.rows[k].assets == Approx(2.4 * base.rows[k].assets).epsilon(1e-14));
        CHECK(scaled.rows[k].consumption == Approx(2.4 * base.rows[k].consumption).epsilon(1e-14));
    }

    // Demand explodes as r approaches rho.
    const double near = sweep_row(economy, 0.0495).assets;
    const double nearer = sweep_row(economy, 0.0499).assets;
    CHECK(near > table.rows.back().assets);
    CHECK(nearer > 2.0 * near);

    // Below the lower interest bound everybody sits at the constraint.
    CHECK(sweep_row(economy, -0.76).assets == Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(sweep_row(economy, -0.74).assets > 0.0);

    const std::vector<double> bad{0.06};
    CHECK(kind_of([&] { sweep_A(economy, bad, 1.0, 0.0); }) == ErrorKind::InvalidRate);
    CHECK(kind_of([&] { sweep_A(economy, two, 1.0, 1.0); }) == ErrorKind::InvalidParameters);
}

TEST_CASE("stationary: weak continuity in r") {
    const auto economy = testing::e0_economy();
    const auto base = solve_stationary(economy, 0.02);
    double prev = std::numeric_limits<double>::infinity();
    for (double dr : {1e-2, 1e-3, 1e-4}) {
        const auto moved = solve_stationary(economy, 0.02 + dr);
        const double d = wasserstein(base.distribution, moved.distribution);
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 1e-2);
}

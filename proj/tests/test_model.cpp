#include "support.hpp"

#include "ftpl/errors.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

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

// Independent two-state oracle: rho - lambda(h -> l) * ((z_h / z_l)^gamma - 1)
// when leaving the high state is the binding term.
double two_state_bound(double rho, double rate_high_to_low, double ratio, double gamma) {
    return rho - rate_high_to_low * (std::pow(ratio, gamma) - 1.0);
}

}  // namespace

TEST_CASE("income chain: symmetric two states keep their levels") {
    const auto chain = testing::e0_chain();
    CHECK(chain.stationary_law()[0] == Approx(0.5).epsilon(1e-14));
    CHECK(chain.stationary_law()[1] == Approx(0.5).epsilon(1e-14));
    CHECK(chain.state(0) == Approx(0.5).epsilon(1e-14));
    CHECK(chain.state(1) == Approx(1.5).epsilon(1e-14));
}

TEST_CASE("income chain: asymmetric rates are normalized to mean one") {
    const std::vector<double> states{1.0, 2.0};
    const auto chain = build_income_chain(states, {{0.0, 0.2}, {0.4, 0.0}});
    CHECK(chain.stationary_law()[0] == Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(chain.stationary_law()[1] == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(chain.state(0) == Approx(0.75).epsilon(1e-14));
    CHECK(chain.state(1) == Approx(1.5).epsilon(1e-14));
}

TEST_CASE("income chain: single state") {
    const auto chain = testing::single_state_chain();
    CHECK(chain.size() == 1);
    CHECK(chain.stationary_law()[0] == 1.0);
    CHECK(chain.state(0) == 1.0);
}

TEST_CASE("income chain: invalid inputs") {
    const std::vector<double> states{0.5, 1.5};
    CHECK(kind_of([&] { build_income_chain(states, {{0.0, 0.4}, {0.0, 0.0}}); }) == ErrorKind::ReducibleChain);
    const std::vector<double> bad{0.0, 1.0};
    CHECK(kind_of([&] { build_income_chain(bad, {{0.0, 0.4}, {0.4, 0.0}}); }) == ErrorKind::NonPositiveState);
    const std::vector<double> three{1.0, 2.0, 3.0};
    // 0 <-> 1 communicate, 2 is reachable but never left.
    CHECK(kind_of([&] { build_income_chain(three, {{0, 1, 1}, {1, 0, 0}, {0, 0, 0}}); }) == ErrorKind::ReducibleChain);
}

TEST_CASE("income chain: balance law matches the long-run transition matrix") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rate(0.05, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t d = 2 + static_cast<std::size_t>(trial % 3);
        std::vector<double> states(d);
        std::vector<std::vector<double>> rates(d, std::vector<double>(d, 0.0));
        for (std::size_t i = 0; i < d; ++i) {
            states[i] = 0.3 + static_cast<double>(i);
            for (std::size_t j = 0; j < d; ++j) {
                if (i != j) rates[i][j] = rate(rng);
            }
        }
        const auto chain = build_income_chain(states, rates);
        const Eigen::MatrixXd p = (chain.generator() * 500.0).exp();
        double mean = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            mean += chain.stationary_law()[i] * chain.state(i);
            for (std::size_t j = 0; j < d; ++j) {
                CHECK(std::abs(p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) -
                               chain.stationary_law()[j]) < 1e-8);
            }
        }
        CHECK(mean == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("hamiltonian: closed-form examples") {
    auto h = hamiltonian(Utility(1.0), 1.0);
    CHECK(h.value == Approx(-1.0).epsilon(1e-14));
    CHECK(h.maximizer == Approx(1.0).epsilon(1e-14));
    h = hamiltonian(Utility(2.0), 4.0);
    CHECK(h.value == Approx(-4.0).epsilon(1e-14));
    CHECK(h.maximizer == Approx(0.5).epsilon(1e-14));
    h = hamiltonian(Utility(0.5), 1.0);
    CHECK(h.value == Approx(1.0).epsilon(1e-14));
    CHECK(h.maximizer == Approx(1.0).epsilon(1e-14));
    CHECK(kind_of([] { hamiltonian(Utility(1.0), 0.0); }) == ErrorKind::NonPositiveMarginal);
    CHECK(kind_of([] { hamiltonian(Utility(2.0), -1.0); }) == ErrorKind::NonPositiveMarginal);
}

TEST_CASE("hamiltonian: envelope identity, monotonicity and convexity") {
    for (double gamma : {0.3, 0.5, 1.0, 2.0, 5.0}) {
        const Utility u(gamma);
        double prev = std::numeric_limits<double>::infinity();
        double prev_slope = -std::numeric_limits<double>::infinity();
        double prev_p = 0.0;
        for (int k = -30; k <= 30; ++k) {
            const double p = std::pow(10.0, k / 10.0);
            const auto h = hamiltonian(u, p);
            const double lhs = h.value + p * h.maximizer;
            CHECK(std::abs(lhs - u.value(h.maximizer)) <= 1e-10 * std::max(1.0, std::abs(lhs)));
            CHECK(u.inverse_marginal(u.marginal(h.maximizer)) == Approx(h.maximizer).epsilon(1e-12));
            CHECK(h.value < prev);
            if (k > -30) {
                const double slope = (h.value - prev) / (p - prev_p);
                CHECK(slope > prev_slope);
                prev_slope = slope;
            }
            prev = h.value;
            prev_p = p;
        }
    }
}

TEST_CASE("utility: shape") {
    for (double gamma : {0.5, 1.0, 3.0}) {
        const Utility u(gamma);
        CHECK(u.is_log() == (gamma == 1.0));
        CHECK(u.marginal(1e-8) > 1e3);
        CHECK(u.marginal(1e8) < 1e-3);
        CHECK(u.value(2.0) > u.value(1.0));
        CHECK(u.value(1.5) > 0.5 * (u.value(1.0) + u.value(2.0)));
    }
}

TEST_CASE("lower interest bound") {
    const auto e0 = testing::e0_chain();
    const Utility log_u(1.0);
    CHECK(lower_interest_bound(e0, log_u, testing::e0_params(0.0)) == Approx(-0.75).epsilon(1e-12));
    // Independent of the wage and the tax rate.
    CHECK(lower_interest_bound(e0, log_u, testing::e0_params(0.0, 2.5, -0.3)) == Approx(-0.75).epsilon(1e-12));
    CHECK(lower_interest_bound(testing::single_state_chain(), log_u, testing::e0_params(0.0)) == 0.05);

    for (double gamma : {0.5, 1.0, 2.0}) {
        const Utility u(gamma);
        CHECK(lower_interest_bound(e0, u, testing::e0_params(0.0)) ==
              Approx(two_state_bound(0.05, 0.4, 3.0, gamma)).epsilon(1e-12));
        const std::vector<double> states{1.0, 2.0};
        const auto asym = build_income_chain(states, {{0.0, 0.2}, {0.4, 0.0}});
        CHECK(lower_interest_bound(asym, u, testing::e0_params(0.0)) ==
              Approx(two_state_bound(0.05, 0.4, 2.0, gamma)).epsilon(1e-12));
    }

    HouseholdParams borrowing = testing::e0_params(0.0);
    borrowing.a_min = -0.1;
    CHECK(kind_of([&] { lower_interest_bound(e0, log_u, borrowing); }) == ErrorKind::UnsupportedBorrowingLimit);
}

TEST_CASE("firm side: closed forms") {
    auto fs = firm_side({0.3, 0.05}, 0.02);
    CHECK(fs.capital == Approx(7.9966).epsilon(1e-4));
    CHECK(fs.wage == Approx(1.3061).epsilon(1e-4));
    fs = firm_side({0.5, 0.1}, 0.15);
    CHECK(fs.capital == Approx(4.0).epsilon(1e-13));
    CHECK(fs.wage == Approx(1.0).epsilon(1e-13));
    for (double r : {-0.04, 0.0, 0.04}) CHECK(firm_side({1e-7, 0.05}, r).wage == Approx(1.0).epsilon(1e-5));
    CHECK(kind_of([] { firm_side({0.3, 0.05}, -0.05); }) == ErrorKind::RateBelowNegDepreciation);
    CHECK(kind_of([] { firm_side({1.2, 0.05}, 0.01); }) == ErrorKind::InvalidParameters);
}

TEST_CASE("firm side: profit maximization and monotonicity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> alpha(0.01, 0.95), delta(0.01, 0.2), unit(0.0, 1.0);
    for (int k = 0; k < 200; ++k) {
        const FirmParams firm{alpha(rng), delta(rng)};
        const double r = -firm.delta + 1e-3 + unit(rng) * 0.2;
        const auto fs = firm_side(firm, r);
        CHECK(fs.capital > 0.0);
        CHECK(fs.wage > 0.0);
        CHECK(firm.alpha * std::pow(fs.capital, firm.alpha - 1.0) - firm.delta == Approx(r).epsilon(1e-12).scale(1.0));
        CHECK((1.0 - firm.alpha) * std::pow(fs.capital, firm.alpha) == Approx(fs.wage).epsilon(1e-12));
        CHECK(firm_side(firm, r + 1e-3).capital < fs.capital);
    }
}

TEST_CASE("household parameters report every violation") {
    const auto chain = testing::e0_chain();
    HouseholdParams p{0.05, 0.1, -1.0, 2.0, 0.0};
    try {
        p.validate(chain);
        FAIL("expected InvalidParameters");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidParameters);
        const std::string msg = e.what();
        CHECK(msg.find("w = -1") != std::string::npos);
        CHECK(msg.find("tau = 2") != std::string::npos);
        CHECK(msg.find("r = 0.1") != std::string::npos);
    }
    HouseholdParams tight{0.05, 0.03, 1.0, 0.0, -20.0};
    CHECK(kind_of([&] { tight.validate(chain); }) == ErrorKind::InvalidParameters);
    CHECK_NOTHROW(testing::e0_params(0.03).validate(chain));
}

TEST_CASE("wealth grid") {
    const auto uniform = WealthGrid::make(0.0, 10.0, 101);
    CHECK(uniform.size() == 101);
    CHECK(uniform.front() == 0.0);
    CHECK(uniform.back() == 10.0);
    CHECK(uniform.width(50) == Approx(0.1).epsilon(1e-12));

    const auto stretched = WealthGrid::make(0.0, 100.0, 500, 1.01);
    CHECK(stretched.back() == Approx(100.0).epsilon(1e-14));
    for (std::size_t i = 1; i + 1 < stretched.size(); ++i) {
        CHECK(stretched.width(i) / stretched.width(i - 1) == Approx(1.01).epsilon(1e-9));
    }
    for (double a : {0.0, 1e-3, 0.37, 5.0, 99.99, 100.0}) {
        const std::size_t i = stretched.locate(a);
        CHECK(stretched[i] <= a);
        CHECK((a <= stretched[i + 1] || i + 2 == stretched.size()));
    }
    std::vector<double> values(stretched.size());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] = 3.0 * stretched[i] - 1.0;
    CHECK(stretched.interpolate(values, 42.5) == Approx(126.5).epsilon(1e-12));

    const auto scaled = stretched.scaled(2.0);
    CHECK(scaled.back() == Approx(200.0).epsilon(1e-14));
    CHECK_FALSE(scaled.same_as(stretched));
    CHECK(stretched.same_as(WealthGrid::make(0.0, 100.0, 500, 1.01)));
    CHECK(kind_of([] { WealthGrid::make(1.0, 0.5, 100); }) == ErrorKind::InvalidParameters);
    CHECK(kind_of([] { WealthGrid::make(0.0, 1.0, 100, 0.9); }) == ErrorKind::InvalidParameters);
}

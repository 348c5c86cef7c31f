#include <gtest/gtest.h>

#include <random>

#include "htopt/no_arbitrage.hpp"
#include "htopt/pricing.hpp"
#include "support/oracles.hpp"

using namespace htopt;

namespace {

const PricingConfig base{};

double call_at(const DensityGrid& grid, double strike) {
    return price_call(grid, {strike, grid.horizon_days(), OptionKind::call}, base).price;
}

}  // namespace

TEST(Pricing, TableOneCells) {
    struct Case { double x_max, strike; int days; double expected, tol; };
    const Case cases[] = {
        {1, 0.9, 1, 0.100, 1e-3},  {2, 0.9, 1, 0.100, 1e-3},  {5, 0.9, 1, 0.100, 1e-3},
        {2, 0.9, 8, 0.102, 1e-3},  {2, 0.9, 64, 0.125, 2e-3}, {5, 0.9, 64, 0.125, 2e-3},
        {1, 1.1, 8, 0.002, 1e-3},  {2, 1.1, 64, 0.029, 2e-3}, {1, 1.1, 64, 0.028, 2e-3},
    };
    SpectralOptions loose;
    loose.edge_ratio_limit = 1e-2;
    for (const auto& c : cases) {
        const auto grid = build_density(ReturnModel::from_half_width(0.02, c.x_max), c.days, loose);
        EXPECT_NEAR(call_at(grid, c.strike), c.expected, c.tol)
            << c.x_max << " " << c.strike << " " << c.days;
    }
}

TEST(Pricing, OneDayCallMatchesQuadratureOnClosedForm) {
    const double g = 0.02, x_max = 2.0, strike = 1.01;
    const auto grid = build_density(ReturnModel::from_multiple(g, 100), 1);
    const double mu = base.daily_rate() - 0.5 * g * g;
    const double x_low = std::log(strike) - mu;
    const auto p = [&](double x) { return oracle::periodized_t3(x, g, x_max); };
    double mass = 0.0;
    for (int i = 0; i < 100; ++i) {
        mass += 2.0 * oracle::integrate(p, x_max * i / 100, x_max * (i + 1) / 100);
    }
    double payoff = 0.0;
    const double span = x_max - x_low;
    for (int i = 0; i < 200; ++i) {
        payoff += oracle::integrate(
            [&](double x) { return (std::exp(mu + x) - strike) * p(x); },
            x_low + span * i / 200, x_low + span * (i + 1) / 200);
    }
    const double expected = base.discount(1) * payoff / mass;
    EXPECT_NEAR(call_at(grid, strike), expected, 1e-7);
}

TEST(Pricing, GaussianGridReproducesBlackScholes) {
    for (double sigma : {0.1, 0.3}) {
        for (int days : {5, 63, 252}) {
            for (double k : {0.8, 1.0, 1.25}) {
                const double tau = days / 252.0;
                const double closed = bsm_call(1.0, k, tau, sigma, 0.02);
                const double integral = bsm_call_integral(1.0, k, days, sigma, 0.02);
                EXPECT_NEAR(integral, closed, 2e-7) << sigma << " " << days << " " << k;
            }
        }
    }
}

TEST(Pricing, BlackScholesLimitsAndParity) {
    EXPECT_NEAR(bsm_call(1.0, 0.9, 1.0, 0.0, 0.02), 1.0 - 0.9 * std::exp(-0.02), 1e-15);
    EXPECT_DOUBLE_EQ(bsm_call(1.0, 1.2, 1.0, 0.0, 0.0), 0.0);
    const double c = bsm_call(1.0, 1.1, 0.5, 0.25, 0.03);
    const double p = bsm_put(1.0, 1.1, 0.5, 0.25, 0.03);
    EXPECT_NEAR(c - p, 1.0 - 1.1 * std::exp(-0.015), 1e-14);
    EXPECT_THROW(bsm_call(0.0, 1.0, 1.0, 0.2, 0.0), DomainError);
    EXPECT_THROW(bsm_call(1.0, 1.0, 1.0, -0.2, 0.0), DomainError);
}

TEST(Pricing, ImpliedVolRoundTrip) {
    for (double sigma : {0.05, 0.2, 0.8, 2.0}) {
        const double price = bsm_call(100.0, 105.0, 0.25, sigma, 0.02);
        const auto iv = implied_vol_bsm(price, 100.0, 105.0, 0.25, 0.02);
        ASSERT_TRUE(iv.has_value());
        EXPECT_NEAR(iv.sigma, sigma, 1e-6);
    }
    const auto below = implied_vol_bsm(0.01, 100.0, 50.0, 0.25, 0.02);
    EXPECT_EQ(below.status, ImpliedVol::Status::below_zero_vol_bound);
    const auto above = implied_vol_bsm(99.99, 100.0, 105.0, 0.25, 0.02);
    EXPECT_EQ(above.status, ImpliedVol::Status::bracket_exhausted);
    EXPECT_THROW(implied_vol_bsm(0.0, 100.0, 100.0, 0.25, 0.02), DomainError);
    EXPECT_THROW(implied_vol_bsm(100.0, 100.0, 100.0, 0.25, 0.02), DomainError);
}

TEST(Pricing, ContractChecks) {
    const auto grid = build_density(ReturnModel::from_multiple(0.02, 100), 8);
    EXPECT_THROW(price_call(grid, {1.0, 7, OptionKind::call}, base), ContractError);
    EXPECT_THROW(price_call(grid, {0.0, 8, OptionKind::call}, base), ContractError);
    EXPECT_THROW(price_call(grid, {1.0, 8, OptionKind::put}, base), ContractError);
    EXPECT_THROW(price_put(grid, {1.0, 8, OptionKind::call}, base), ContractError);
    PricingConfig odd;
    odd.trading_days_per_year = 365;
    EXPECT_THROW(price_call(grid, {1.0, 8, OptionKind::call}, odd), DomainError);
    const auto r = price(grid, {1.0, 8, OptionKind::put}, base);
    EXPECT_GT(r.price, 0.0);
    EXPECT_GT(r.quadrature_nodes, 0);
}

TEST(Pricing, StrikesOutsideTheWindow) {
    const auto grid = build_density(ReturnModel::from_multiple(0.02, 100), 1);
    // exp(2) ~ 7.39: calls beyond have no payoff mass, puts below have none either.
    EXPECT_EQ(call_at(grid, 8.0), 0.0);
    EXPECT_EQ(price_put(grid, {0.13, 1, OptionKind::put}, base).price, 0.0);
    EXPECT_DOUBLE_EQ(price_put(grid, {0.13, 1, OptionKind::put}, base).intrinsic, 0.0);
    EXPECT_DOUBLE_EQ(price_call(grid, {0.9, 1, OptionKind::call}, base).intrinsic, 0.1);
}

TEST(Pricing, CallShapeInStrike) {
    // Nonnegative, non-increasing and convex in K; bounded above by the spot.
    const auto grid = build_density(ReturnModel::from_multiple(0.02, 100), 16);
    std::vector<double> ks, cs;
    for (double k = 0.5; k <= 1.6; k += 0.01) {
        ks.push_back(k);
        cs.push_back(call_at(grid, k));
    }
    for (std::size_t i = 0; i < cs.size(); ++i) {
        EXPECT_GE(cs[i], 0.0);
        EXPECT_LE(cs[i], 1.0);
        if (i > 0) {
            EXPECT_LE(cs[i], cs[i - 1] + 1e-15);
        }
        if (i > 0 && i + 1 < cs.size()) {
            EXPECT_GE(cs[i - 1] - 2.0 * cs[i] + cs[i + 1], -1e-12);
        }
    }
}

TEST(Pricing, LowerNoArbitrageBoundUpToMartingaleDefect) {
    // C >= S - K e^{-r tau} holds up to the drift defect e^{-r tau} E[S_T] - S.
    const auto model = ReturnModel::from_multiple(0.02, 100);
    for (int days : {1, 8, 64}) {
        const auto grid = build_density(model, days);
        const double defect = std::abs(discounted_expectation_ratio(grid, base) - 1.0);
        for (double k : {0.5, 0.8, 0.9, 1.0, 1.1}) {
            const double lower = 1.0 - k * base.discount(days);
            EXPECT_GE(call_at(grid, k), lower - defect - 1e-9) << days << " " << k;
        }
    }
}

TEST(Pricing, ParityResidualSmall) {
    const auto model = ReturnModel::from_multiple(0.02, 100);
    const auto grid1 = build_density(model, 1);
    for (double k : {0.8, 0.9, 1.0, 1.1, 1.2}) {
        EXPECT_LE(std::abs(parity_residual(grid1, k, base)), 1e-5) << k;
    }
    const auto grid64 = build_density(model, 64);
    for (double k : {0.8, 1.0, 1.2}) {
        EXPECT_LE(std::abs(parity_residual(grid64, k, base)), 5e-3) << k;
    }
}

TEST(Pricing, ExplicitDriftShiftsPrice) {
    const auto grid = build_density(ReturnModel::from_multiple(0.02, 100), 8);
    PricingConfig up = base, down = base;
    up.drift = DriftMode::fixed(0.001);
    down.drift = DriftMode::fixed(-0.001);
    const OptionContract c{1.0, 8, OptionKind::call};
    EXPECT_GT(price_call(grid, c, up).price, price_call(grid, c, down).price);
    EXPECT_EQ(up.drift.describe(), "explicit:0.001");
    EXPECT_EQ(base.drift.describe(), "risk_neutral_quadratic");
}

TEST(Pricing, ParityPropertyRandomContracts) {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> strike(0.8, 1.2);
    const auto model = ReturnModel::from_multiple(0.02, 100);
    for (int days : {1, 4, 8}) {
        const auto grid = build_density(model, days);
        for (int i = 0; i < 20; ++i) {
            EXPECT_LE(std::abs(parity_residual(grid, strike(gen), base)), 1e-4);
        }
    }
}

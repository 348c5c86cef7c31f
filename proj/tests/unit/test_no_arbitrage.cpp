#include <gtest/gtest.h>

#include "htopt/no_arbitrage.hpp"
#include "support/oracles.hpp"

using namespace htopt;

TEST(NoArbitrage, RiskNeutralDrift) {
    EXPECT_NEAR(risk_neutral_drift(0.02, 0.02, 252), 0.02 / 252 - 0.0002, 1e-18);
    EXPECT_THROW(risk_neutral_drift(-0.1, 0.02, 252), DomainError);
    EXPECT_THROW(risk_neutral_drift(0.02, 0.02, 0), DomainError);
}

TEST(NoArbitrage, OneDayMgfMatchesQuadrature) {
    const double g = 0.02, x_max = 2.0;
    const auto p = [&](double x) { return oracle::periodized_t3(x, g, x_max); };
    double mass = 0.0, mgf = 0.0;
    for (int i = 0; i < 400; ++i) {
        const double a = -x_max + 2.0 * x_max * i / 400, b = a + 2.0 * x_max / 400;
        mass += oracle::integrate(p, a, b);
        mgf += oracle::integrate([&](double x) { return std::exp(x) * p(x); }, a, b);
    }
    const auto r = mgf_residual(ReturnModel::from_multiple(g, 100), 1);
    EXPECT_NEAR(r.mgf, mgf / mass, 1e-9);
    EXPECT_NEAR(r.quadratic_approx, std::exp(0.5 * g * g), 1e-15);
}

TEST(NoArbitrage, DefectGrowsWithHorizon) {
    const auto model = ReturnModel::from_multiple(0.02, 100);
    double prev_rel = 0.0, prev_exp = 0.0;
    for (int n : {1, 8, 16, 32, 64}) {
        const auto r = mgf_residual(model, n);
        EXPECT_GE(std::abs(r.relative_defect), prev_rel) << n;
        EXPECT_GE(std::abs(r.exponent_defect), prev_exp - 1e-12) << n;
        prev_rel = std::abs(r.relative_defect);
        prev_exp = std::abs(r.exponent_defect);
    }
    // The drift correction gamma^2/2 is off by a fraction of a percent.
    EXPECT_GT(prev_exp, 0.003);
    EXPECT_LT(prev_exp, 0.007);
}

TEST(NoArbitrage, DefectVanishesForSmallGamma) {
    const auto r = mgf_residual(ReturnModel::from_multiple(1e-4, 100), 64);
    EXPECT_LT(std::abs(r.relative_defect), 1e-8);
}

TEST(NoArbitrage, DiscountedExpectationNearOne) {
    const auto model = ReturnModel::from_multiple(0.02, 100);
    const PricingConfig cfg;
    for (int n : {1, 8, 64}) {
        const double ratio = discounted_expectation_ratio(build_density(model, n), cfg);
        EXPECT_NEAR(ratio, 1.0, 1e-3) << n;
    }
    PricingConfig drifted;
    drifted.drift = DriftMode::fixed(0.0);
    const auto grid = build_density(model, 8);
    EXPECT_NEAR(discounted_expectation_ratio(grid, drifted),
                std::exp(-drifted.daily_rate() * 8) * moment_generating(grid), 1e-15);
}

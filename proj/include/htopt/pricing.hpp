#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "htopt/errors.hpp"
#include "htopt/grid.hpp"
#include "htopt/spectral_engine.hpp"

namespace htopt {

enum class OptionKind { call, put };

inline const char* to_string(OptionKind kind) {
    return kind == OptionKind::call ? "call" : "put";
}

struct OptionContract {
    double strike = 0.0;
    int days_to_maturity = 0;
    OptionKind kind = OptionKind::call;

    void validate() const {
        if (!(strike > 0.0)) throw ContractError("strike must be positive");
        if (days_to_maturity < 1) throw ContractError("maturity must be at least one day");
    }
};

/// Per-day drift mu of the log price.
class DriftMode {
public:
    enum class Kind { risk_neutral_quadratic, explicit_rate };

    /// mu = r_daily - unit_variance / 2.
    static DriftMode risk_neutral() { return DriftMode(Kind::risk_neutral_quadratic, 0.0); }
    static DriftMode fixed(double mu_daily) { return DriftMode(Kind::explicit_rate, mu_daily); }

    Kind kind() const noexcept { return kind_; }
    double mu() const noexcept { return mu_; }

    std::string describe() const {
        return kind_ == Kind::risk_neutral_quadratic ? "risk_neutral_quadratic"
                                                     : "explicit:" + format_full(mu_);
    }

private:
    DriftMode(Kind kind, double mu) : kind_(kind), mu_(mu) {}
    Kind kind_;
    double mu_;
};

struct PricingConfig {
    double spot = 1.0;
    double annual_rate = 0.02;
    int trading_days_per_year = 252;
    DriftMode drift = DriftMode::risk_neutral();

    void validate() const {
        if (!(spot > 0.0)) throw DomainError("spot must be positive");
        if (trading_days_per_year < 200 || trading_days_per_year > 260) {
            throw DomainError("trading days per year must lie in [200, 260]");
        }
    }

    double daily_rate() const { return annual_rate / trading_days_per_year; }

    double drift_per_day(double unit_variance) const {
        return drift.kind() == DriftMode::Kind::risk_neutral_quadratic
                   ? daily_rate() - 0.5 * unit_variance
                   : drift.mu();
    }

    double discount(int days) const { return std::exp(-daily_rate() * days); }
};

struct PriceResult {
    double price = 0.0;
    int quadrature_nodes = 0;
    double intrinsic = 0.0;
};

namespace detail {

inline void check_horizon(const DensityGrid& grid, const OptionContract& contract) {
    contract.validate();
    if (grid.horizon_days() != contract.days_to_maturity) {
        throw ContractError("grid horizon " + std::to_string(grid.horizon_days()) +
                            " does not match maturity " +
                            std::to_string(contract.days_to_maturity));
    }
}

// Exercise boundary in x: S exp(mu*tau + x) = K.
inline double exercise_boundary(const OptionContract& c, const PricingConfig& cfg, double mu) {
    return std::log(c.strike / cfg.spot) - mu * c.days_to_maturity;
}

}  // namespace detail

/// Discounted call value  e^{-r tau} int_{x_l}^{x_max} (S e^{mu tau + x} - K) p(x) dx.
inline PriceResult price_call(const DensityGrid& grid, const OptionContract& contract,
                              const PricingConfig& config) {
    if (contract.kind != OptionKind::call) throw ContractError("contract is not a call");
    detail::check_horizon(grid, contract);
    config.validate();

    const int days = contract.days_to_maturity;
    const double mu = config.drift_per_day(grid.unit_variance());
    const double x_low = detail::exercise_boundary(contract, config, mu);
    const double growth = config.spot * std::exp(mu * days);
    const double strike = contract.strike;

    PriceResult r;
    r.intrinsic = std::max(0.0, config.spot - strike);
    if (x_low >= grid.spec().x_max) return r;

    const auto q = integrate(
        grid, [&](double x) { return std::max(0.0, growth * std::exp(x) - strike); }, x_low,
        grid.spec().x_max);
    r.price = std::max(0.0, config.discount(days) * q.value);
    r.quadrature_nodes = q.nodes;
    return r;
}

/// Discounted put value over the truncated support (-x_max, x_l).
inline PriceResult price_put(const DensityGrid& grid, const OptionContract& contract,
                             const PricingConfig& config) {
    if (contract.kind != OptionKind::put) throw ContractError("contract is not a put");
    detail::check_horizon(grid, contract);
    config.validate();

    const int days = contract.days_to_maturity;
    const double mu = config.drift_per_day(grid.unit_variance());
    const double x_low = detail::exercise_boundary(contract, config, mu);
    const double growth = config.spot * std::exp(mu * days);
    const double strike = contract.strike;

    PriceResult r;
    r.intrinsic = std::max(0.0, strike - config.spot);
    if (x_low <= -grid.spec().x_max) return r;

    const auto q = integrate(
        grid, [&](double x) { return std::max(0.0, strike - growth * std::exp(x)); },
        -grid.spec().x_max, x_low);
    r.price = std::max(0.0, config.discount(days) * q.value);
    r.quadrature_nodes = q.nodes;
    return r;
}

inline PriceResult price(const DensityGrid& grid, const OptionContract& contract,
                         const PricingConfig& config) {
    return contract.kind == OptionKind::call ? price_call(grid, contract, config)
                                             : price_put(grid, contract, config);
}

/// (C - P) - (S - K e^{-r tau}) at the grid's horizon.
inline double parity_residual(const DensityGrid& grid, double strike,
                              const PricingConfig& config) {
    const int days = grid.horizon_days();
    const double call = price_call(grid, {strike, days, OptionKind::call}, config).price;
    const double put = price_put(grid, {strike, days, OptionKind::put}, config).price;
    return (call - put) - (config.spot - strike * config.discount(days));
}

// ---------------------------------------------------------------------------
// Black-Scholes-Merton reference

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

inline double bsm_call(double spot, double strike, double tau_years, double sigma_annual,
                       double rate_annual) {
    if (!(spot > 0.0) || !(strike > 0.0) || !(tau_years > 0.0)) {
        throw DomainError("bsm_call needs positive spot, strike and maturity");
    }
    if (sigma_annual < 0.0) throw DomainError("volatility must be nonnegative");
    const double df = std::exp(-rate_annual * tau_years);
    const double vol = sigma_annual * std::sqrt(tau_years);
    if (vol <= 0.0) return std::max(0.0, spot - strike * df);
    const double d1 =
        (std::log(spot / strike) + rate_annual * tau_years) / vol + 0.5 * vol;
    const double d2 = d1 - vol;
    return spot * normal_cdf(d1) - strike * df * normal_cdf(d2);
}

inline double bsm_put(double spot, double strike, double tau_years, double sigma_annual,
                      double rate_annual) {
    return bsm_call(spot, strike, tau_years, sigma_annual, rate_annual) - spot +
           strike * std::exp(-rate_annual * tau_years);
}

/// Gaussian horizon density for annual volatility sigma, built through the
/// same spectral path as the Student grids. Window is 16 horizon deviations.
inline DensityGrid gaussian_grid(double sigma_annual, int days, int trading_days_per_year,
                                 std::size_t n_samples = std::size_t{1} << 16) {
    if (!(sigma_annual > 0.0)) throw DomainError("gaussian grid needs positive volatility");
    const double sigma_daily = sigma_annual / std::sqrt(double(trading_days_per_year));
    const double sigma_h = sigma_daily * std::sqrt(double(days));
    const auto spec = GridSpec::make(16.0 * sigma_h, n_samples);
    SpectralOptions options;
    options.n_samples = n_samples;
    return build_density_from_spectrum(
        [sigma_h](double omega) { return gaussian_spectrum(omega, sigma_h); }, spec, days,
        sigma_daily * sigma_daily, options);
}

/// Call priced as the Gaussian quadrature integral with mu = r - sigma^2/2;
/// an independent route to bsm_call.
inline double bsm_call_integral(double spot, double strike, int days, double sigma_annual,
                                double rate_annual, int trading_days_per_year = 252,
                                std::size_t n_samples = std::size_t{1} << 16) {
    const auto grid = gaussian_grid(sigma_annual, days, trading_days_per_year, n_samples);
    PricingConfig cfg;
    cfg.spot = spot;
    cfg.annual_rate = rate_annual;
    cfg.trading_days_per_year = trading_days_per_year;
    cfg.drift = DriftMode::risk_neutral();
    return price_call(grid, {strike, days, OptionKind::call}, cfg).price;
}

struct ImpliedVol {
    enum class Status {
        ok,
        below_zero_vol_bound,  // no volatility reproduces the price
        bracket_exhausted,     // price above the value at the upper bracket
    };
    Status status = Status::ok;
    double sigma = 0.0;
    int iterations = 0;

    bool has_value() const noexcept { return status == Status::ok; }
};

/// Bisection of bsm_call(sigma) = market_price on sigma in (1e-6, 5).
inline ImpliedVol implied_vol_bsm(double market_price, double spot, double strike,
                                  double tau_years, double rate_annual) {
    if (!(market_price > 0.0)) throw DomainError("market price must be positive");
    if (market_price >= spot) throw DomainError("call price cannot reach the spot");

    constexpr double lo_bracket = 1e-6;
    constexpr double hi_bracket = 5.0;
    constexpr double price_tol = 1e-8;

    auto f = [&](double s) { return bsm_call(spot, strike, tau_years, s, rate_annual); };
    ImpliedVol result;
    const double f_lo = f(lo_bracket);
    if (market_price < f_lo - price_tol) {
        result.status = ImpliedVol::Status::below_zero_vol_bound;
        return result;
    }
    const double f_hi = f(hi_bracket);
    if (market_price > f_hi + price_tol) {
        result.status = ImpliedVol::Status::bracket_exhausted;
        result.sigma = hi_bracket;
        return result;
    }

    double lo = lo_bracket;
    double hi = hi_bracket;
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 200; ++it) {
        mid = 0.5 * (lo + hi);
        const double diff = f(mid) - market_price;
        result.iterations = it + 1;
        if (std::abs(diff) <= price_tol && hi - lo < 1e-7) break;
        if (diff > 0.0) hi = mid; else lo = mid;
        if (hi - lo < 1e-15) break;
    }
    result.sigma = mid;
    return result;
}

}  // namespace htopt

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "htopt/errors.hpp"
#include "htopt/market_data.hpp"
#include "htopt/parallel.hpp"
#include "htopt/pricing.hpp"
#include "htopt/returns_model.hpp"
#include "htopt/spectral_engine.hpp"

namespace htopt {

struct CalibrationConfig {
    PricingConfig pricing;
    /// Window is m_mult * gamma for every candidate gamma.
    double m_mult = ReturnModel::default_multiple;
    SpectralOptions spectral;
    double bracket_lo = 0.001;
    double bracket_hi = 0.1;
    int coarse_points = 20;
    double tolerance = 1e-5;
};

struct ObjectiveValue {
    double value = 0.0;
    int included = 0;
    int excluded = 0;  // strikes whose model price is zero
};

/// Model call prices for every strike of a chain under one gamma.
inline std::vector<double> model_call_prices(double gamma, std::span<const double> strikes,
                                             int days, const CalibrationConfig& cfg) {
    const auto model = ReturnModel::from_multiple(gamma, cfg.m_mult);
    const auto grid = build_density(model, days, cfg.spectral);
    std::vector<double> out;
    out.reserve(strikes.size());
    for (double k : strikes) {
        out.push_back(price_call(grid, {k, days, OptionKind::call}, cfg.pricing).price);
    }
    return out;
}

inline std::vector<double> chain_strikes(const Chain& chain) {
    std::vector<double> out;
    for (const auto& q : chain.quotes) out.push_back(q.strike);
    return out;
}

namespace detail {

inline void require_calls(const Chain& chain) {
    if (chain.kind != OptionKind::call) throw DomainError("calibration uses call chains only");
    for (const auto& q : chain.quotes) {
        if (!(q.mid > 0.0)) throw DomainError("calibration needs positive mid prices");
    }
}

inline ObjectiveValue log_mse(std::span<const double> model, const Chain& chain) {
    ObjectiveValue out;
    double sum = 0.0;
    for (std::size_t i = 0; i < model.size(); ++i) {
        if (!(model[i] > 0.0)) {
            ++out.excluded;
            continue;
        }
        const double d = std::log(model[i]) - std::log(chain.quotes[i].mid);
        sum += d * d;
        ++out.included;
    }
    if (out.included == 0) throw EmptyObjective("every strike has zero model price");
    out.value = sum / out.included;
    return out;
}

}  // namespace detail

/// Mean squared difference of log model and log market call prices.
inline ObjectiveValue objective(double gamma, const Chain& chain, const CalibrationConfig& cfg) {
    detail::require_calls(chain);
    if (chain.quotes.empty()) throw EmptyObjective("chain has no quotes");
    const auto strikes = chain_strikes(chain);
    const auto model = model_call_prices(gamma, strikes, chain.days_to_maturity, cfg);
    return detail::log_mse(model, chain);
}

struct CalibrationResult {
    std::string symbol;
    Date quote_date;
    Date expiry_used;
    int days_to_maturity = 0;
    double gamma_hat = 0.0;
    double objective_value = 0.0;
    int n_strikes = 0;
    int excluded = 0;
    bool at_boundary = false;
    bool flat_objective = false;
    std::string drift_mode;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
};

namespace detail {

// Golden section on a unimodal f over [a, b] to width tol.
template <class F>
double golden_section(F&& f, double a, double b, double tol) {
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? c : d;
}

}  // namespace detail

/// Coarse log-spaced scan of the bracket, then golden section around the best point.
inline CalibrationResult fit_gamma(const Chain& chain, const CalibrationConfig& cfg) {
    detail::require_calls(chain);
    if (chain.quotes.size() < 3) throw DomainError("calibration needs at least three strikes");
    if (!(cfg.bracket_lo > 0.0) || !(cfg.bracket_hi > cfg.bracket_lo)) {
        throw DomainError("gamma bracket must satisfy 0 < lo < hi");
    }
    if (cfg.coarse_points < 3) throw DomainError("coarse grid needs at least three points");

    const auto strikes = chain_strikes(chain);
    auto eval = [&](double g) {
        try {
            return detail::log_mse(
                       model_call_prices(g, strikes, chain.days_to_maturity, cfg), chain)
                .value;
        } catch (const EmptyObjective&) {
            return std::numeric_limits<double>::infinity();
        }
    };

    const int n = cfg.coarse_points;
    std::vector<double> grid(n), values(n);
    const double ratio = std::log(cfg.bracket_hi / cfg.bracket_lo) / (n - 1);
    for (int i = 0; i < n; ++i) grid[i] = cfg.bracket_lo * std::exp(ratio * i);
    grid.back() = cfg.bracket_hi;
    parallel_for(n, [&](std::size_t i) { values[i] = eval(grid[i]); });

    const auto best = static_cast<int>(std::min_element(values.begin(), values.end()) -
                                       values.begin());
    if (!std::isfinite(values[best])) {
        throw EmptyObjective("every strike has zero model price across the bracket");
    }
    const double lo = grid[std::max(best - 1, 0)];
    const double hi = grid[std::min(best + 1, n - 1)];
    const double gamma_hat = detail::golden_section(eval, lo, hi, cfg.tolerance);

    CalibrationResult r;
    r.symbol = chain.symbol;
    r.quote_date = chain.quote_date;
    r.expiry_used = chain.expiry_date;
    r.days_to_maturity = chain.days_to_maturity;
    r.gamma_hat = gamma_hat;
    const auto obj = objective(gamma_hat, chain, cfg);
    r.objective_value = obj.value;
    r.n_strikes = obj.included;
    r.excluded = obj.excluded;
    r.at_boundary = gamma_hat - cfg.bracket_lo <= cfg.tolerance ||
                    cfg.bracket_hi - gamma_hat <= cfg.tolerance;
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    r.flat_objective = std::isfinite(*mx) && (*mx - *mn) <= 1e-12 * (1.0 + *mn);
    r.drift_mode = cfg.pricing.drift.describe();
    r.bracket_lo = cfg.bracket_lo;
    r.bracket_hi = cfg.bracket_hi;
    return r;
}

/// Nearest-expiry call chain with at least `min_strikes` quotes.
inline std::optional<std::size_t> select_nearest_expiry(const std::vector<Chain>& chains,
                                                        std::size_t min_strikes = 3) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < chains.size(); ++i) {
        const auto& c = chains[i];
        if (c.kind != OptionKind::call || c.quotes.size() < min_strikes) continue;
        if (!best || c.days_to_maturity < chains[*best].days_to_maturity) best = i;
    }
    return best;
}

/// Annual BSM volatility minimizing the same log-price MSE on one chain.
inline double fit_bsm_sigma(const Chain& chain, const PricingConfig& pricing,
                            double lo = 0.01, double hi = 3.0, double tol = 1e-6) {
    detail::require_calls(chain);
    const double tau = double(chain.days_to_maturity) / pricing.trading_days_per_year;
    auto eval = [&](double sigma) {
        double sum = 0.0;
        int n = 0;
        for (const auto& q : chain.quotes) {
            const double p = bsm_call(pricing.spot, q.strike, tau, sigma, pricing.annual_rate);
            if (!(p > 0.0)) continue;
            const double d = std::log(p) - std::log(q.mid);
            sum += d * d;
            ++n;
        }
        return n ? sum / n : std::numeric_limits<double>::infinity();
    };
    return detail::golden_section(eval, lo, hi, tol);
}

struct PanelRow {
    std::string symbol;
    Date expiry_date;
    int days_to_maturity = 0;
    int n_strikes = 0;
    std::optional<double> model_mse;  // empty when the horizon is unavailable
    std::optional<double> reference_mse;
    std::string note;
};

struct ErrorPanel {
    double gamma_hat = 0.0;
    std::optional<double> reference_sigma;
    std::vector<PanelRow> rows;

    /// Squared log error pooled over every available row.
    std::optional<double> pooled_mse() const {
        double sum = 0.0;
        int n = 0;
        for (const auto& r : rows) {
            if (!r.model_mse) continue;
            sum += *r.model_mse * r.n_strikes;
            n += r.n_strikes;
        }
        if (n == 0) return std::nullopt;
        return sum / n;
    }
};

/// Out-of-sample log-price MSE per expiry under one fitted gamma.
inline ErrorPanel evaluate_panel(double gamma_hat, const std::vector<Chain>& chains,
                                 const CalibrationConfig& cfg,
                                 std::optional<double> reference_sigma = std::nullopt) {
    ErrorPanel panel;
    panel.gamma_hat = gamma_hat;
    panel.reference_sigma = reference_sigma;
    panel.rows.resize(chains.size());
    parallel_for(chains.size(), [&](std::size_t i) {
        const auto& c = chains[i];
        auto& row = panel.rows[i];
        row.symbol = c.symbol;
        row.expiry_date = c.expiry_date;
        row.days_to_maturity = c.days_to_maturity;
        try {
            const auto obj = objective(gamma_hat, c, cfg);
            row.model_mse = obj.value;
            row.n_strikes = obj.included;
            if (obj.excluded > 0) {
                row.note = std::to_string(obj.excluded) + " strikes with zero model price";
            }
        } catch (const HorizonUnavailable& e) {
            row.n_strikes = static_cast<int>(c.quotes.size());
            row.note = "unavailable: " + e.reason();
        } catch (const EmptyObjective& e) {
            row.note = e.what();
        }
        if (reference_sigma) {
            const double tau = double(c.days_to_maturity) / cfg.pricing.trading_days_per_year;
            double sum = 0.0;
            int n = 0;
            for (const auto& q : c.quotes) {
                const double p = bsm_call(cfg.pricing.spot, q.strike, tau, *reference_sigma,
                                          cfg.pricing.annual_rate);
                if (!(p > 0.0)) continue;
                const double d = std::log(p) - std::log(q.mid);
                sum += d * d;
                ++n;
            }
            if (n > 0) row.reference_mse = sum / n;
        }
    });
    return panel;
}

// ---------------------------------------------------------------------------
// Synthetic chains priced by the model itself

struct SyntheticChainSpec {
    std::string symbol = "SYN";
    Date quote_date{std::chrono::year{2018}, std::chrono::month{2}, std::chrono::day{28}};
    double gamma = 0.015;
    std::vector<double> strikes;
    int days_to_maturity = 8;
    double noise_sigma = 0.0;  // mid multiplied by exp(noise_sigma * z)
    std::uint64_t seed = 1;
    double half_spread = 0.01;  // bid/ask = mid * (1 -+ half_spread)
};

/// n evenly spaced strikes over [lo, hi] times spot, rounded to 1e-6.
inline std::vector<double> strike_ladder(double spot, double lo, double hi, int n) {
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
        const double k = spot * (n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        out.push_back(std::round(k * 1e6) / 1e6);
    }
    return out;
}

/// Expiry date that sits `days` trading days (plain weekdays) after `from`.
inline Date add_trading_days(const Date& from, int days) {
    std::chrono::sys_days d{from};
    const Calendar cal;
    while (days > 0) {
        d += std::chrono::days{1};
        if (cal.is_trading_day(d)) --days;
    }
    return Date{d};
}

inline Chain make_synthetic_chain(const SyntheticChainSpec& spec, const CalibrationConfig& cfg) {
    const auto prices = model_call_prices(spec.gamma, spec.strikes, spec.days_to_maturity, cfg);
    std::mt19937_64 gen(spec.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    Chain c;
    c.symbol = spec.symbol;
    c.quote_date = spec.quote_date;
    c.expiry_date = add_trading_days(spec.quote_date, spec.days_to_maturity);
    c.days_to_maturity = spec.days_to_maturity;
    c.kind = OptionKind::call;
    for (std::size_t i = 0; i < spec.strikes.size(); ++i) {
        if (!(prices[i] > 0.0)) continue;
        const double z = normal(gen);
        const double mid = prices[i] * std::exp(spec.noise_sigma * z);
        QuoteRecord q;
        q.symbol = spec.symbol;
        q.quote_date = c.quote_date;
        q.expiry_date = c.expiry_date;
        q.strike = spec.strikes[i];
        q.kind = OptionKind::call;
        q.bid = mid * (1.0 - spec.half_spread);
        q.ask = mid * (1.0 + spec.half_spread);
        q.mid = mid;
        q.volume = 100;
        q.open_interest = 1000;
        c.quotes.push_back(q);
    }
    return c;
}

}  // namespace htopt

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "htopt/errors.hpp"
#include "htopt/parallel.hpp"
#include "htopt/pricing.hpp"
#include "htopt/returns_model.hpp"
#include "htopt/spectral_engine.hpp"

namespace htopt {

struct PlateauOptions {
    std::size_t n_samples = std::size_t{1} << 18;
    /// Scans probe windows far narrower than pricing would accept, so the
    /// edge guard is looser than the engine default.
    double edge_ratio_limit = 1e-2;
};

struct PlateauCell {
    std::optional<double> price;
    std::string failure;  // set when price is empty
};

struct PlateauScan {
    double strike_ratio = 0.0;
    std::vector<int> horizons;
    std::vector<double> x_max_values;
    std::vector<std::vector<PlateauCell>> cells;  // [horizon][x_max]

    std::optional<double> price(int horizon, double x_max) const {
        const auto h = std::find(horizons.begin(), horizons.end(), horizon);
        const auto x = std::find(x_max_values.begin(), x_max_values.end(), x_max);
        if (h == horizons.end() || x == x_max_values.end()) return std::nullopt;
        return cells[h - horizons.begin()][x - x_max_values.begin()].price;
    }
};

/// n log-spaced points over [lo, hi], endpoints included.
inline std::vector<double> log_spaced(double lo, double hi, int n) {
    if (!(lo > 0.0) || !(hi > lo) || n < 2) {
        if (n == 1 && lo > 0.0) return {lo};
        throw DomainError("log_spaced needs 0 < lo < hi and n >= 2");
    }
    std::vector<double> out(static_cast<std::size_t>(n));
    const double step = std::log(hi / lo) / (n - 1);
    for (int i = 0; i < n; ++i) out[i] = lo * std::exp(step * i);
    out.front() = lo;
    out.back() = hi;
    return out;
}

/// Call price over a horizon x truncation-width grid; one fresh density per cell.
inline PlateauScan plateau_scan(double gamma, double strike_ratio, std::span<const int> horizons,
                                std::span<const double> x_max_list, const PricingConfig& config,
                                const PlateauOptions& options = {}) {
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    if (!(strike_ratio > 0.0)) throw DomainError("strike ratio must be positive");
    if (horizons.empty()) throw DomainError("plateau scan needs at least one horizon");
    if (x_max_list.empty()) throw DomainError("plateau scan needs at least one x_max");
    for (std::size_t i = 0; i < x_max_list.size(); ++i) {
        if (!(x_max_list[i] > 0.0)) throw DomainError("x_max values must be positive");
        if (i > 0 && !(x_max_list[i] > x_max_list[i - 1])) {
            throw DomainError("x_max values must be strictly increasing");
        }
    }
    for (int h : horizons) {
        if (h < 1) throw DomainError("horizons must be positive");
    }
    config.validate();

    PlateauScan scan;
    scan.strike_ratio = strike_ratio;
    scan.horizons.assign(horizons.begin(), horizons.end());
    scan.x_max_values.assign(x_max_list.begin(), x_max_list.end());
    scan.cells.assign(horizons.size(), std::vector<PlateauCell>(x_max_list.size()));

    SpectralOptions spectral;
    spectral.n_samples = options.n_samples;
    spectral.edge_ratio_limit = options.edge_ratio_limit;
    const double strike = strike_ratio * config.spot;

    const std::size_t n_cells = horizons.size() * x_max_list.size();
    parallel_for(n_cells, [&](std::size_t idx) {
        const std::size_t h = idx / x_max_list.size();
        const std::size_t x = idx % x_max_list.size();
        auto& cell = scan.cells[h][x];
        try {
            const auto model = ReturnModel::from_half_width(gamma, x_max_list[x]);
            const auto grid = build_density(model, horizons[h], spectral);
            cell.price =
                price_call(grid, {strike, horizons[h], OptionKind::call}, config).price;
        } catch (const HorizonUnavailable& e) {
            cell.failure = e.reason();
        }
    });
    return scan;
}

enum class DeltaConvention {
    by_moneyness,  // relative for out-of-the-money rows, absolute otherwise
    relative,
    absolute,
};

struct InclinationRow {
    int horizon = 0;
    std::optional<double> c_left, c_mid, c_right;
    std::optional<double> delta_left, delta_right;
    bool relative = false;
};

/// Table of C_left, C_mid, C_right and Delta C = C_side - C_mid per horizon.
inline std::vector<InclinationRow> plateau_inclination(
    const PlateauScan& scan, double left_x, double mid_x, double right_x,
    DeltaConvention convention = DeltaConvention::by_moneyness) {
    auto has = [&](double x) {
        return std::find(scan.x_max_values.begin(), scan.x_max_values.end(), x) !=
               scan.x_max_values.end();
    };
    if (!has(left_x) || !has(mid_x) || !has(right_x)) {
        throw DomainError("inclination points must be members of the scan");
    }
    const bool relative = convention == DeltaConvention::relative ||
                          (convention == DeltaConvention::by_moneyness && scan.strike_ratio > 1.0);

    std::vector<InclinationRow> rows;
    for (int h : scan.horizons) {
        InclinationRow row;
        row.horizon = h;
        row.relative = relative;
        row.c_left = scan.price(h, left_x);
        row.c_mid = scan.price(h, mid_x);
        row.c_right = scan.price(h, right_x);
        auto delta = [&](const std::optional<double>& side) -> std::optional<double> {
            if (!side || !row.c_mid) return std::nullopt;
            const double d = *side - *row.c_mid;
            if (!relative) return d;
            if (*row.c_mid == 0.0) return d == 0.0 ? std::optional<double>(0.0) : std::nullopt;
            return d / *row.c_mid;
        };
        row.delta_left = delta(row.c_left);
        row.delta_right = delta(row.c_right);
        rows.push_back(row);
    }
    return rows;
}

// ---------------------------------------------------------------------------
// Ordering error between truncated convolutions and convolutions of
// truncated laws, bounded with Hoelder (p -> infinity, q = 1).

/// sup_{x > M gamma} p_S(x) < 2 / (pi gamma M^4).
inline double holder_first_factor(double gamma, double m_mult) {
    return 2.0 / (std::numbers::pi * gamma * std::pow(m_mult, 4));
}

inline double holder_bound_pairwise(double gamma, double m_mult, double y) {
    if (!(gamma > 0.0) || !(m_mult > 0.0)) throw DomainError("gamma and M must be positive");
    const double x_max = m_mult * gamma;
    if (y < 0.0 || y > x_max * (1.0 + 1e-12)) {
        throw DomainError("holder bound needs 0 <= y <= M gamma");
    }
    return 2.0 * holder_first_factor(gamma, m_mult) * student_tail(x_max - y, gamma);
}

struct ConvErrorBound {
    int n_convolutions = 0;
    std::vector<double> y_points;
    std::vector<double> absolute_bound;  // bound on eps_n(y)
    std::vector<double> relative_bound;  // eps_n(y) / p_S^{(n)}(y)
};

/// Bound on eps_n(y) using (n-1)-fold samples inside the window only.
inline ConvErrorBound holder_bound_nfold(double gamma, double m_mult, int n,
                                         std::span<const double> y_grid,
                                         const SpectralOptions& options = {}) {
    if (n < 2) throw DomainError("n-fold bound needs n >= 2");
    const auto model = ReturnModel::from_multiple(gamma, m_mult);
    const double x_max = model.x_max();
    for (double y : y_grid) {
        if (y < 0.0 || y > x_max) throw DomainError("bound points must lie in [0, x_max]");
    }
    const auto previous = build_density(model, n - 1, options);
    const auto current = build_density(model, n, options);
    const double first = holder_first_factor(gamma, m_mult);

    ConvErrorBound out;
    out.n_convolutions = n;
    out.y_points.assign(y_grid.begin(), y_grid.end());
    for (double y : y_grid) {
        const double tail =
            integrate(previous, [](double) { return 1.0; }, x_max - y, x_max).value;
        const double bound = 2.0 * first * tail;
        out.absolute_bound.push_back(bound);
        out.relative_bound.push_back(bound / current.at(y));
    }
    return out;
}

/// Payoff-weighted integral of the n-fold ordering bound over the window;
/// an allowance for the gap between the spectral pricing law and the law of
/// a sum of truncated daily returns.
inline double ordering_error_budget(const ReturnModel& model, const OptionContract& contract,
                                    const PricingConfig& config,
                                    const SpectralOptions& options = {}) {
    const int n = contract.days_to_maturity;
    if (n < 2) return 0.0;
    const double x_max = model.x_max();
    const double gamma = model.gamma();
    const auto previous = build_density(model, n - 1, options);
    const double first = holder_first_factor(gamma, model.m_mult());
    const double mu = config.drift_per_day(gamma * gamma);
    const double growth = config.spot * std::exp(mu * n);

    // The bound depends on |y| by symmetry; integrate on a coarse grid.
    constexpr int steps = 400;
    const double h = 2.0 * x_max / steps;
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double y = -x_max + i * h;
        const double tail =
            integrate(previous, [](double) { return 1.0; }, x_max - std::abs(y), x_max).value;
        const double payoff = contract.kind == OptionKind::call
                                  ? std::max(0.0, growth * std::exp(y) - contract.strike)
                                  : std::max(0.0, contract.strike - growth * std::exp(y));
        const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        sum += w * payoff * 2.0 * first * tail;
    }
    return config.discount(n) * sum * h;
}

}  // namespace htopt

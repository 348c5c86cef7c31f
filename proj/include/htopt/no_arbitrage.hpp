#pragma once

#include <cmath>

#include "htopt/errors.hpp"
#include "htopt/pricing.hpp"
#include "htopt/returns_model.hpp"
#include "htopt/spectral_engine.hpp"

namespace htopt {

/// How far the truncated horizon law is from the quadratic MGF e^{T gamma^2/2}.
struct MartingaleReport {
    int horizon_days = 0;
    double mgf = 0.0;               // integral e^x p_T(x) dx over the window
    double quadratic_approx = 0.0;  // e^{T gamma^2 / 2}
    double relative_defect = 0.0;   // (mgf - quadratic_approx) / mgf
    /// (log mgf - T gamma^2/2) / (T gamma^2/2): relative error of the
    /// quadratic drift correction, i.e. of gamma^2/2 against the exact
    /// f(gamma^2, T) with mgf = e^{T f}.
    double exponent_defect = 0.0;
};

inline double risk_neutral_drift(double gamma, double annual_rate, int trading_days) {
    if (gamma < 0.0) throw DomainError("gamma must be nonnegative");
    if (trading_days <= 0) throw DomainError("trading days must be positive");
    return annual_rate / trading_days - 0.5 * gamma * gamma;
}

inline double moment_generating(const DensityGrid& grid) {
    return integrate(grid, [](double x) { return std::exp(x); }, -grid.spec().x_max,
                     grid.spec().x_max)
        .value;
}

inline MartingaleReport martingale_report(const DensityGrid& grid) {
    MartingaleReport r;
    r.horizon_days = grid.horizon_days();
    r.mgf = moment_generating(grid);
    const double exponent = 0.5 * grid.horizon_days() * grid.unit_variance();
    r.quadratic_approx = std::exp(exponent);
    r.relative_defect = (r.mgf - r.quadratic_approx) / r.mgf;
    r.exponent_defect = exponent > 0.0 ? (std::log(r.mgf) - exponent) / exponent : 0.0;
    return r;
}

inline MartingaleReport mgf_residual(const ReturnModel& model, int horizon_days,
                                     const SpectralOptions& options = {}) {
    return martingale_report(build_density(model, horizon_days, options));
}

/// e^{-r tau} E[S_T] / S_t under the grid law and the config's drift.
inline double discounted_expectation_ratio(const DensityGrid& grid, const PricingConfig& config) {
    const int days = grid.horizon_days();
    const double mu = config.drift_per_day(grid.unit_variance());
    return std::exp((mu - config.daily_rate()) * days) * moment_generating(grid);
}

}  // namespace htopt

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <ostream>
#include <vector>

#include "htopt/errors.hpp"
#include "htopt/fft.hpp"
#include "htopt/format.hpp"
#include "htopt/grid.hpp"
#include "htopt/returns_model.hpp"

namespace htopt {

struct SpectralOptions {
    std::size_t n_samples = std::size_t{1} << 18;
    /// Reject the horizon when p(-x_max) reaches this fraction of the peak.
    double edge_ratio_limit = 1e-4;
    /// Ringing below -negative_ratio_limit * peak is a failure; above it is clamped.
    double negative_ratio_limit = 1e-6;
};

inline constexpr std::size_t min_engine_samples = std::size_t{1} << 10;

inline double gaussian_density(double x, double sigma) {
    return std::exp(-0.5 * x * x / (sigma * sigma)) /
           (sigma * std::sqrt(2.0 * std::numbers::pi));
}

/// Spectrum of gaussian_density in the same 1/sqrt(2*pi) convention.
inline double gaussian_spectrum(double omega, double sigma) {
    return std::exp(-0.5 * sigma * sigma * omega * omega) / std::sqrt(2.0 * std::numbers::pi);
}

/// Samples of the window-periodic density whose symmetric transform is
/// `spectrum` (a real, even function of angular frequency), on the nodes of
/// `spec`. One inverse DFT; no guard and no renormalization.
template <class Spectrum>
std::vector<double> reconstruct_samples(const Spectrum& spectrum, const GridSpec& spec) {
    const std::size_t n = spec.n_samples;
    const double d_omega = std::numbers::pi / spec.x_max;
    const double scale = d_omega / std::sqrt(2.0 * std::numbers::pi);

    InverseRealFft fft(n);
    auto coeffs = fft.spectrum();
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        // (-1)^k moves the origin of the node index to -x_max.
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        coeffs[k] = {sign * scale * spectrum(d_omega * static_cast<double>(k)), 0.0};
    }
    auto out = fft.execute();
    return {out.begin(), out.end()};
}

/// Reconstruct, guard against aliasing, clamp ringing and renormalize.
template <class Spectrum>
DensityGrid build_density_from_spectrum(const Spectrum& spectrum, const GridSpec& spec,
                                        int horizon_days, double unit_variance,
                                        const SpectralOptions& options) {
    auto values = reconstruct_samples(spectrum, spec);

    double peak = 0.0;
    double lowest = 0.0;
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw HorizonUnavailable(horizon_days, "non-finite reconstruction");
        }
        peak = std::max(peak, v);
        lowest = std::min(lowest, v);
    }
    if (!(peak > 0.0)) {
        throw HorizonUnavailable(horizon_days, "reconstruction has no positive mass");
    }
    if (lowest < -options.negative_ratio_limit * peak) {
        throw HorizonUnavailable(horizon_days, "negative excursion in reconstruction");
    }
    if (values.front() >= options.edge_ratio_limit * peak) {
        throw HorizonUnavailable(horizon_days, "density at window edge too large (aliasing)");
    }
    for (double& v : values) v = std::max(v, 0.0);

    return truncate_and_renormalize(
        DensityGrid(spec, horizon_days, unit_variance, std::move(values)));
}

/// Truncated, renormalized density of the horizon_days-day log return.
inline DensityGrid build_density(const ReturnModel& model, int horizon_days,
                                 const SpectralOptions& options = {}) {
    if (horizon_days < 1) throw DomainError("horizon must be at least one day");
    if (options.n_samples < min_engine_samples) {
        throw DomainError("spectral engine needs at least 2^10 samples");
    }
    const auto spec = GridSpec::make(model.x_max(), options.n_samples);
    const double gamma = model.gamma();
    return build_density_from_spectrum(
        [gamma, horizon_days](double omega) {
            return convolution_spectrum(omega, gamma, horizon_days);
        },
        spec, horizon_days, gamma * gamma, options);
}

inline DensityGrid build_density(const ReturnModel& model, int horizon_days,
                                 std::size_t n_samples) {
    SpectralOptions options;
    options.n_samples = n_samples;
    return build_density(model, horizon_days, options);
}

/// Trapezoidal moment  integral x^order p(x) dx  over the closed window.
inline double density_moment(const DensityGrid& grid, unsigned order) {
    if (order > 8) throw DomainError("moment order above 8 not supported");
    const auto& spec = grid.spec();
    double sum = 0.0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        // Node 0 stands for both endpoints; x^order differs only in sign there.
        const double x = spec.x(j);
        double w = std::pow(x, static_cast<int>(order));
        if (j == 0 && order % 2 == 1) w = 0.0;
        sum += w * grid.node(j);
    }
    return sum * spec.spacing;
}

/// Two-column (x, density) CSV for plotting.
inline void write_density_csv(std::ostream& os, const DensityGrid& grid) {
    os << "x,density\n";
    for (std::size_t j = 0; j <= grid.size(); ++j) {
        const double x = j == grid.size() ? grid.spec().x_max : grid.x(j);
        os << format_full(x) << ',' << format_full(grid.node(j)) << '\n';
    }
}

}  // namespace htopt

#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "htopt/errors.hpp"
#include "htopt/grid.hpp"

namespace htopt {

/// One-period Student-t(3) law truncated to (-x_max, x_max).
///
/// gamma is both the width parameter and the standard deviation of the
/// untruncated law; x_max = m_mult * gamma.
class ReturnModel {
public:
    static ReturnModel from_multiple(double gamma, double m_mult) {
        check_gamma(gamma);
        if (!(m_mult > 0.0) || !std::isfinite(m_mult)) {
            throw DomainError("truncation multiple must be positive");
        }
        return ReturnModel(gamma, m_mult * gamma, m_mult);
    }

    static ReturnModel from_half_width(double gamma, double x_max) {
        check_gamma(gamma);
        if (!(x_max > 0.0) || !std::isfinite(x_max)) {
            throw DomainError("truncation half-width must be positive");
        }
        return ReturnModel(gamma, x_max, x_max / gamma);
    }

    double gamma() const noexcept { return gamma_; }
    double x_max() const noexcept { return x_max_; }
    double m_mult() const noexcept { return m_mult_; }

    static constexpr double default_multiple = 100.0;

private:
    ReturnModel(double gamma, double x_max, double m_mult)
        : gamma_(gamma), x_max_(x_max), m_mult_(m_mult) {}

    static void check_gamma(double gamma) {
        if (!(gamma > 0.0) || !std::isfinite(gamma)) {
            throw DomainError("gamma must be positive");
        }
    }

    double gamma_;
    double x_max_;
    double m_mult_;
};

namespace detail {

inline void require_positive_gamma(double gamma) {
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
}

// (1/pi) * [atan(1/u) - u/(1+u^2)] for u >= 0, the one-sided tail of the
// standardized law. The bracket cancels to O(u^-3); switch to its series
// sum_k (-1)^(k+1) 2k/(2k+1) v^(2k+1), v = 1/u, once v is small.
inline double standard_tail(double u) {
    using std::numbers::pi;
    if (u < 10.0) {
        return (std::atan2(1.0, u) - u / (1.0 + u * u)) / pi;
    }
    const double v = 1.0 / u;
    const double v2 = v * v;
    double term = v * v2;
    double sum = 0.0;
    for (int k = 1; k <= 12; ++k) {
        const double c = 2.0 * k / (2.0 * k + 1.0);
        sum += (k % 2 == 1 ? c : -c) * term;
        term *= v2;
    }
    return sum / pi;
}

}  // namespace detail

inline double student_density(double x, double gamma) {
    detail::require_positive_gamma(gamma);
    const double s = gamma * gamma + x * x;
    return 2.0 * gamma * gamma * gamma / (std::numbers::pi * s * s);
}

/// P(X > x) for the untruncated law.
inline double student_tail(double x, double gamma) {
    detail::require_positive_gamma(gamma);
    const double u = x / gamma;
    return u >= 0.0 ? detail::standard_tail(u) : 1.0 - detail::standard_tail(-u);
}

inline double student_cdf(double x, double gamma) {
    return 1.0 - student_tail(x, gamma);
}

/// Symmetric 1/sqrt(2*pi)-normalized Fourier transform of student_density.
inline double student_spectrum(double omega, double gamma) {
    detail::require_positive_gamma(gamma);
    const double a = gamma * std::abs(omega);
    return (1.0 + a) * std::exp(-a) / std::sqrt(2.0 * std::numbers::pi);
}

/// Spectrum of the n_days-fold convolution: student_spectrum^N * (2*pi)^((N-1)/2).
/// Evaluated in log space; the literal power overflows for large N*gamma*|omega|.
inline double convolution_spectrum(double omega, double gamma, int n_days) {
    detail::require_positive_gamma(gamma);
    if (n_days < 1) throw DomainError("convolution order must be at least one");
    const double a = gamma * std::abs(omega);
    return std::exp(n_days * (std::log1p(a) - a)) / std::sqrt(2.0 * std::numbers::pi);
}

/// Upper bound 4/(3*pi*M^3) on the two-sided mass beyond M standard deviations.
inline double tail_mass_bound(double m_mult) {
    if (!(m_mult >= 1.0)) throw DomainError("tail bound needs M >= 1");
    return 4.0 / (3.0 * std::numbers::pi * m_mult * m_mult * m_mult);
}

/// Closed-form two-sided mass beyond M standard deviations.
inline double exact_tail_mass(double m_mult) {
    if (!(m_mult >= 0.0)) throw DomainError("tail mass needs M >= 0");
    return 2.0 * detail::standard_tail(m_mult);
}

/// Scale a grid to unit trapezoidal mass. Negative samples are rejected.
inline DensityGrid truncate_and_renormalize(const DensityGrid& grid) {
    for (double v : grid.values()) {
        if (v < 0.0 || !std::isfinite(v)) {
            throw DomainError("density samples must be finite and nonnegative");
        }
    }
    const double mass = total_mass(grid);
    if (!(mass > 0.0)) {
        throw DegenerateDistribution("density has no mass inside the window");
    }
    std::vector<double> scaled(grid.values().begin(), grid.values().end());
    const double factor = 1.0 / mass;
    for (double& v : scaled) v *= factor;
    return DensityGrid(grid.spec(), grid.horizon_days(), grid.unit_variance(),
                       std::move(scaled));
}

/// Sample the closed-form one-period density on the model's window
/// (no renormalization).
inline DensityGrid sample_student_density(const ReturnModel& model, std::size_t n_samples) {
    const auto spec = GridSpec::make(model.x_max(), n_samples);
    std::vector<double> values(n_samples);
    for (std::size_t j = 0; j < n_samples; ++j) {
        values[j] = student_density(spec.x(j), model.gamma());
    }
    return DensityGrid(spec, 1, model.gamma() * model.gamma(), std::move(values));
}

}  // namespace htopt

#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "htopt/errors.hpp"

namespace htopt {

/// Uniform sampling of the window (-x_max, x_max).
///
/// Node j sits at -x_max + j*spacing for j in [0, n_samples). The grid is
/// periodic: node n_samples is the closed right endpoint +x_max and carries
/// the value of node 0 (every law handled here is even).
struct GridSpec {
    std::size_t n_samples = 0;
    double x_max = 0.0;
    double spacing = 0.0;
    double f_max = 0.0;  // cycles per unit x, 1/(2*spacing)

    static GridSpec make(double x_max, std::size_t n_samples) {
        if (!(x_max > 0.0) || !std::isfinite(x_max)) {
            throw DomainError("grid half-width must be positive and finite");
        }
        if (n_samples < 2 || !std::has_single_bit(n_samples)) {
            throw DomainError("grid sample count must be a power of two");
        }
        GridSpec spec;
        spec.n_samples = n_samples;
        spec.x_max = x_max;
        spec.spacing = 2.0 * x_max / static_cast<double>(n_samples);
        spec.f_max = 1.0 / (2.0 * spec.spacing);
        return spec;
    }

    double x(std::size_t j) const {
        return -x_max + static_cast<double>(j) * spacing;
    }
};

/// Sampled probability density of an N-day log return on a GridSpec window.
class DensityGrid {
public:
    DensityGrid(GridSpec spec, int horizon_days, double unit_variance,
                std::vector<double> values)
        : spec_(spec), horizon_days_(horizon_days), unit_variance_(unit_variance),
          values_(std::move(values)) {
        if (values_.size() != spec_.n_samples) {
            throw DomainError("density sample count does not match grid");
        }
        if (horizon_days_ < 1) {
            throw DomainError("horizon must be at least one day");
        }
    }

    const GridSpec& spec() const noexcept { return spec_; }
    int horizon_days() const noexcept { return horizon_days_; }

    /// Variance of the one-period law the grid was built from; drives the
    /// quadratic risk-neutral drift.
    double unit_variance() const noexcept { return unit_variance_; }

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    double x(std::size_t j) const { return spec_.x(j); }

    /// Node value for j in [0, n_samples]; j == n_samples is +x_max.
    double node(std::size_t j) const {
        return values_[j == values_.size() ? 0 : j];
    }

    double peak() const { return *std::max_element(values_.begin(), values_.end()); }

    /// Linear interpolation; zero outside the closed window.
    double at(double x) const {
        const double u = (x + spec_.x_max) / spec_.spacing;
        if (u < 0.0 || u > static_cast<double>(values_.size())) return 0.0;
        const auto j = std::min(static_cast<std::size_t>(u), values_.size() - 1);
        const double t = u - static_cast<double>(j);
        return (1.0 - t) * node(j) + t * node(j + 1);
    }

private:
    GridSpec spec_;
    int horizon_days_;
    double unit_variance_;
    std::vector<double> values_;
};

/// Result of a trapezoidal integral over part of a grid.
struct Quadrature {
    double value = 0.0;
    int nodes = 0;
};

/// Trapezoidal integral of weight(x) * p(x) over [lo, hi] intersected with
/// the closed window. End cells cut by lo or hi use the weight evaluated
/// exactly at the cut and the density interpolated linearly there.
template <class Weight>
Quadrature integrate(const DensityGrid& grid, Weight&& weight, double lo, double hi) {
    const auto& spec = grid.spec();
    lo = std::max(lo, -spec.x_max);
    hi = std::min(hi, spec.x_max);
    Quadrature q;
    if (!(hi > lo)) return q;

    const auto n = static_cast<double>(spec.n_samples);
    const double ulo = (lo + spec.x_max) / spec.spacing;
    const double uhi = (hi + spec.x_max) / spec.spacing;
    // First and last interior nodes.
    auto first = static_cast<std::size_t>(std::ceil(ulo));
    auto last = static_cast<std::size_t>(std::floor(std::min(uhi, n)));

    auto f = [&](std::size_t j) { return weight(grid.x(j)) * grid.node(j); };

    if (first > last) {
        // Both cuts inside one cell.
        const double flo = weight(lo) * grid.at(lo);
        const double fhi = weight(hi) * grid.at(hi);
        q.value = 0.5 * (hi - lo) * (flo + fhi);
        return q;
    }

    double sum = 0.0;
    double prev = f(first);
    for (std::size_t j = first + 1; j <= last; ++j) {
        const double cur = f(j);
        sum += 0.5 * (prev + cur);
        prev = cur;
    }
    sum *= spec.spacing;

    const double x_first = grid.x(first);
    if (x_first > lo) {
        sum += 0.5 * (x_first - lo) * (weight(lo) * grid.at(lo) + f(first));
    }
    const double x_last = grid.x(last);
    if (hi > x_last) {
        sum += 0.5 * (hi - x_last) * (f(last) + weight(hi) * grid.at(hi));
    }
    q.value = sum;
    q.nodes = static_cast<int>(last - first + 1);
    return q;
}

/// Trapezoidal mass of the whole closed window.
inline double total_mass(const DensityGrid& grid) {
    double sum = 0.0;
    for (double v : grid.values()) sum += v;
    // Periodic trapezoid: the two half-weight endpoints share one value.
    return sum * grid.spec().spacing;
}

}  // namespace htopt

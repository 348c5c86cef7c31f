#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "htopt/errors.hpp"
#include "htopt/parallel.hpp"
#include "htopt/pricing.hpp"
#include "htopt/returns_model.hpp"

namespace htopt {

/// Inverse-CDF sampler of the truncated, renormalized t(3) law.
///
/// Works in tail form: a uniform u maps to the standardized point t with
/// tail(t) = L + min(u, 1-u) * (1 - 2L), L = tail(M), and the sign of u - 1/2.
/// Keeps full relative precision deep in the tails.
class TruncatedTSampler {
public:
    explicit TruncatedTSampler(const ReturnModel& model)
        : gamma_(model.gamma()), m_(model.m_mult()),
          edge_tail_(detail::standard_tail(model.m_mult())),
          inner_mass_(1.0 - 2.0 * edge_tail_) {}

    /// Uniform u in (0, 1) to a draw in (-x_max, x_max).
    double operator()(double u) const {
        const double q = edge_tail_ + std::min(u, 1.0 - u) * inner_mass_;
        const double t = solve_tail(q);
        return (u < 0.5 ? -t : t) * gamma_;
    }

    /// Standardized t >= 0 with standard_tail(t) = q, q in [tail(M), 1/2].
    double solve_tail(double q) const {
        if (q >= 0.5) return 0.0;
        double lo = 0.0;
        double hi = m_;
        double t = q > 0.25 ? (0.5 - q) * std::numbers::pi / 2.0
                            : std::cbrt(2.0 / (3.0 * std::numbers::pi * q));
        t = std::clamp(t, lo, hi);
        for (int it = 0; it < 100; ++it) {
            const double g = detail::standard_tail(t) - q;  // decreasing in t
            if (g > 0.0) lo = t; else hi = t;
            const double dens = 2.0 / (std::numbers::pi * (1.0 + t * t) * (1.0 + t * t));
            double next = t + g / dens;
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            const double step = std::abs(next - t);
            t = next;
            if (step <= 1e-12 * std::max(1.0, t) || hi - lo <= 1e-12 * std::max(1.0, t)) break;
        }
        // Rounding may land on the edge; the support is open.
        return std::min(t, std::nextafter(m_, 0.0));
    }

private:
    double gamma_;
    double m_;
    double edge_tail_;
    double inner_mass_;
};

namespace detail {

// 53 random bits to the open interval (0, 1).
inline double open_uniform(std::mt19937_64& gen) {
    return (static_cast<double>(gen() >> 11) + 0.5) * 0x1.0p-53;
}

inline std::mt19937_64 batch_generator(std::uint64_t seed, std::uint64_t batch) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(batch),
                      static_cast<std::uint32_t>(batch >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace detail

/// n i.i.d. draws; the sequence depends only on (model, n, seed).
inline std::vector<double> sample_truncated_t(const ReturnModel& model, std::size_t n,
                                              std::uint64_t seed) {
    if (n < 1) throw DomainError("sample count must be positive");
    TruncatedTSampler sampler(model);
    auto gen = detail::batch_generator(seed, 0);
    std::vector<double> out(n);
    for (auto& x : out) x = sampler(detail::open_uniform(gen));
    return out;
}

struct McEstimate {
    double price = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    std::string generator = "mt19937_64";
};

inline constexpr std::size_t mc_batch_paths = 1 << 14;
inline constexpr std::size_t mc_min_paths = 10000;

/// Discounted mean payoff for several strikes of one kind and horizon;
/// every strike sees the same paths. Paths are sums of N daily draws.
/// Batches have a fixed size and their own seed, so the result does not
/// depend on the worker count.
inline std::vector<McEstimate> mc_price_panel(const ReturnModel& model,
                                              std::span<const double> strikes, int days,
                                              OptionKind kind, const PricingConfig& config,
                                              std::size_t n_paths, std::uint64_t seed) {
    if (n_paths < mc_min_paths) throw DomainError("Monte Carlo needs at least 10^4 paths");
    if (days < 1) throw DomainError("horizon must be at least one day");
    for (double k : strikes) {
        if (!(k >= 0.0)) throw DomainError("strikes must be nonnegative");
    }
    config.validate();

    const TruncatedTSampler sampler(model);
    const double mu = config.drift_per_day(model.gamma() * model.gamma());
    const double growth = config.spot * std::exp(mu * days);
    const std::size_t n_strikes = strikes.size();
    const std::size_t n_batches = (n_paths + mc_batch_paths - 1) / mc_batch_paths;

    // Per batch and strike: sum and sum of squares of the payoff.
    std::vector<double> sums(n_batches * n_strikes * 2, 0.0);
    parallel_for(n_batches, [&](std::size_t b) {
        auto gen = detail::batch_generator(seed, b);
        const std::size_t begin = b * mc_batch_paths;
        const std::size_t end = std::min(n_paths, begin + mc_batch_paths);
        double* acc = &sums[b * n_strikes * 2];
        for (std::size_t p = begin; p < end; ++p) {
            double x = 0.0;
            for (int d = 0; d < days; ++d) x += sampler(detail::open_uniform(gen));
            const double s_t = growth * std::exp(x);
            for (std::size_t k = 0; k < n_strikes; ++k) {
                const double pay = kind == OptionKind::call ? std::max(0.0, s_t - strikes[k])
                                                            : std::max(0.0, strikes[k] - s_t);
                acc[2 * k] += pay;
                acc[2 * k + 1] += pay * pay;
            }
        }
    });

    const double df = config.discount(days);
    const double n = static_cast<double>(n_paths);
    std::vector<McEstimate> out(n_strikes);
    for (std::size_t k = 0; k < n_strikes; ++k) {
        double s = 0.0, s2 = 0.0;
        for (std::size_t b = 0; b < n_batches; ++b) {
            s += sums[(b * n_strikes + k) * 2];
            s2 += sums[(b * n_strikes + k) * 2 + 1];
        }
        const double mean = s / n;
        const double var = std::max(0.0, (s2 - n * mean * mean) / (n - 1.0));
        out[k].price = df * mean;
        out[k].std_error = df * std::sqrt(var / n);
        out[k].n_paths = n_paths;
        out[k].seed = seed;
    }
    return out;
}

inline McEstimate mc_price(const ReturnModel& model, const OptionContract& contract,
                           const PricingConfig& config, std::size_t n_paths,
                           std::uint64_t seed) {
    if (!(contract.strike >= 0.0)) throw ContractError("strike must be nonnegative");
    if (contract.days_to_maturity < 1) throw ContractError("maturity must be at least one day");
    const double k = contract.strike;
    return mc_price_panel(model, std::span<const double>(&k, 1), contract.days_to_maturity,
                          contract.kind, config, n_paths, seed)
        .front();
}

}  // namespace htopt

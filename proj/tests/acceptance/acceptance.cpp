// One PASS/FAIL line per acceptance criterion. Exit status is the number of
// failed criteria (0 when all pass).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "htopt/htopt.hpp"
#include "support/oracles.hpp"

using namespace htopt;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& title, const std::string& detail) {
    std::printf("[%s] criterion %d: %s | %s\n", ok ? "PASS" : "FAIL", id, title.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

void info(const std::string& text) {
    std::printf("       %s\n", text.c_str());
    std::fflush(stdout);
}

std::string fmt(double v) { return format_short(v); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Reference call prices at x_max in {1, 2, 5}.
void table_one() {
    const auto t0 = std::chrono::steady_clock::now();
    struct Row { double ratio; int days; double expected[3]; double tol; };
    const Row rows[] = {
        {0.9, 1, {0.100, 0.100, 0.100}, 0.001},
        {0.9, 8, {0.101, 0.102, 0.102}, 0.001},
        {0.9, 64, {0.124, 0.125, 0.125}, 0.002},
        {1.1, 8, {0.002, 0.002, 0.002}, 0.001},
        {1.1, 64, {0.028, 0.029, 0.029}, 0.002},
    };
    const std::vector<double> xs{1.0, 2.0, 5.0};
    const PricingConfig cfg;  // S = 1, r = 2%, 252 days, risk-neutral quadratic drift
    bool ok = true;
    double worst = 0.0;
    for (const auto& r : rows) {
        const std::vector<int> h{r.days};
        const auto scan = plateau_scan(0.02, r.ratio, h, xs, cfg);
        std::ostringstream line;
        line << "K/S=" << r.ratio << " N=" << r.days << ":";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            const auto p = scan.cells[0][i].price;
            const bool cell_ok = p && std::abs(*p - r.expected[i]) <= r.tol;
            ok = ok && cell_ok;
            if (p) worst = std::max(worst, std::abs(*p - r.expected[i]) / r.tol);
            line << ' ' << (p ? fmt(*p) : "--") << " (" << r.expected[i] << ")";
        }
        info(line.str());
    }
    const double elapsed = seconds_since(t0);
    ok = ok && elapsed <= 60.0;
    report(1, ok, "Reference price grid",
           "drift_mode=" + cfg.drift.describe() + ", worst |err|/tol=" + fmt(worst) +
               ", runtime " + fmt(elapsed) + " s");
}

// 2. Relative MGF defect at T=64 and its growth.
void mgf_defect() {
    const auto model = ReturnModel::from_multiple(0.02, 100);
    double prev = 0.0;
    bool monotone = true;
    MartingaleReport last;
    for (int n : {1, 8, 16, 32, 64}) {
        last = mgf_residual(model, n);
        const double d = std::abs(last.relative_defect);
        monotone = monotone && d >= prev;
        prev = d;
        info("N=" + std::to_string(n) + " (mgf - e^{T g^2/2})/mgf=" + fmt(last.relative_defect) +
             "  (log mgf - T g^2/2)/(T g^2/2)=" + fmt(last.exponent_defect));
    }
    const double pct = 100.0 * std::abs(last.relative_defect);
    const bool ok = std::abs(pct - 0.5) <= 0.2 && monotone;
    report(2, ok, "No-arbitrage defect",
           "T=64 relative defect " + fmt(pct) + "% (target 0.5 +- 0.2), monotone=" +
               (monotone ? "yes" : "no") + "; exponent defect " +
               fmt(100.0 * std::abs(last.exponent_defect)) + "%");
}

// 3. Tail mass bound.
void tail_bound() {
    bool ok = true;
    std::ostringstream d;
    for (double m : {10.0, 30.0, 100.0, 300.0}) {
        const double quad = 2.0 * oracle::integrate_to_inf(
                                      [](double t) { return oracle::t3_density(t, 1.0); }, m);
        ok = ok && quad <= tail_mass_bound(m);
        d << "M=" << m << ": " << fmt(quad) << "<=" << fmt(tail_mass_bound(m)) << "; ";
    }
    const double b30 = tail_mass_bound(30.0);
    ok = ok && std::abs(b30 - 1.572e-5) <= 1e-8;
    d << "bound(30)=" << format_full(b30);
    report(3, ok, "Tail-bound dominance", d.str());
}

// 4. Spectral fidelity.
void spectral_fidelity() {
    const double sigma = 0.1;
    const auto gspec = GridSpec::make(2.0, std::size_t{1} << 16);
    const auto gv = reconstruct_samples([&](double w) { return gaussian_spectrum(w, sigma); },
                                        gspec);
    double gauss_err = 0.0;
    for (std::size_t j = 0; j < gv.size(); ++j) {
        gauss_err = std::max(gauss_err, std::abs(gv[j] - gaussian_density(gspec.x(j), sigma)));
    }

    const double g = 0.02;
    const std::size_t n = 1 << 12;
    const auto spec = GridSpec::make(2.0, n);
    const auto one = oracle::periodized_samples(g, 2.0, n);
    const auto direct = oracle::circular_convolve(one, one, spec.spacing);
    const auto fft =
        reconstruct_samples([g](double w) { return convolution_spectrum(w, g, 2); }, spec);
    double conv_err = 0.0;
    for (std::size_t j = 0; j < n; ++j) conv_err = std::max(conv_err, std::abs(fft[j] - direct[j]));

    const auto model = ReturnModel::from_multiple(g, 100);
    double var_worst = 0.0;
    for (int days : {1, 2, 4, 8, 16, 32, 64}) {
        const double v = density_moment(build_density(model, days), 2);
        const double rel = v / (days * g * g) - 1.0;
        info("N=" + std::to_string(days) + " var/(N g^2)-1=" + fmt(rel));
        var_worst = std::max(var_worst, std::abs(rel));
    }
    const bool ok = gauss_err <= 1e-8 && conv_err <= 1e-6 && var_worst <= 0.01;
    report(4, ok, "Spectral fidelity",
           "gaussian max err " + fmt(gauss_err) + " (<=1e-8), N=2 vs direct " + fmt(conv_err) +
               " (<=1e-6), worst variance deviation " + fmt(100 * var_worst) + "% (<=1%)");
}

// 5. Put-call parity.
void parity() {
    const auto model = ReturnModel::from_multiple(0.02, 100);
    const PricingConfig cfg;
    double worst_short = 0.0, worst_all = 0.0;
    for (int days : {1, 2, 4, 8, 16, 32, 64}) {
        const auto grid = build_density(model, days);
        for (int i = 0; i <= 40; ++i) {
            const double k = 0.8 + 0.01 * i;
            const double r = std::abs(parity_residual(grid, k, cfg)) / cfg.spot;
            worst_all = std::max(worst_all, r);
            if (days <= 8) worst_short = std::max(worst_short, r);
        }
    }
    report(5, worst_all <= 0.005 && worst_short <= 1e-4, "Parity",
           "max |residual|/S N<=64: " + fmt(worst_all) + " (<=0.005), N<=8: " +
               fmt(worst_short) + " (<=1e-4)");
}

// 6. Quadrature versus Monte Carlo.
void oracle_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto model = ReturnModel::from_multiple(0.02, 100);
    const PricingConfig cfg;
    const std::vector<double> strikes{0.9, 1.0, 1.1};
    bool ok = true;
    double worst = 0.0;
    for (int days : {1, 8, 32}) {
        const auto grid = build_density(model, days);
        const auto mc = mc_price_panel(model, strikes, days, OptionKind::call, cfg, 1000000,
                                       2018 + static_cast<std::uint64_t>(days));
        for (std::size_t i = 0; i < strikes.size(); ++i) {
            const OptionContract c{strikes[i], days, OptionKind::call};
            const double quad = price_call(grid, c, cfg).price;
            const double budget = ordering_error_budget(model, c, cfg);
            const double margin = 3.0 * mc[i].std_error + budget;
            const double diff = std::abs(mc[i].price - quad);
            ok = ok && diff <= margin;
            worst = std::max(worst, diff / margin);
            info("N=" + std::to_string(days) + " K=" + fmt(strikes[i]) + " quad=" + fmt(quad) +
                 " mc=" + fmt(mc[i].price) + " se=" + fmt(mc[i].std_error) +
                 " budget=" + fmt(budget));
        }
    }
    report(6, ok, "Oracle equivalence",
           "worst |mc-quad|/(3se+budget)=" + fmt(worst) + ", 10^6 paths, " +
               fmt(seconds_since(t0)) + " s");
}

// 7. Calibration round trip and noise floor.
void calibration() {
    CalibrationConfig cfg;
    SyntheticChainSpec spec;
    spec.gamma = 0.015;
    spec.days_to_maturity = 5;
    spec.strikes = strike_ladder(1.0, 0.9, 1.1, 9);
    const auto clean = make_synthetic_chain(spec, cfg);
    const auto fit = fit_gamma(clean, cfg);
    const double err = std::abs(fit.gamma_hat - 0.015);

    spec.noise_sigma = 0.05;
    spec.seed = 100;
    const auto noisy_fit_chain = make_synthetic_chain(spec, cfg);
    const auto noisy_fit = fit_gamma(noisy_fit_chain, cfg);
    std::vector<Chain> chains;
    for (int days : {10, 20, 40, 60}) {
        SyntheticChainSpec s = spec;
        s.days_to_maturity = days;
        s.strikes = strike_ladder(1.0, 0.9, 1.1, 21);
        s.seed = 200 + static_cast<std::uint64_t>(days);
        chains.push_back(make_synthetic_chain(s, cfg));
    }
    const auto panel = evaluate_panel(noisy_fit.gamma_hat, chains, cfg);
    const double mse = panel.pooled_mse().value_or(-1.0);
    for (const auto& r : panel.rows) {
        info("N=" + std::to_string(r.days_to_maturity) + " mse=" +
             (r.model_mse ? fmt(*r.model_mse) : std::string("--")));
    }
    const bool ok = err <= 1e-4 && std::abs(mse - 0.0025) <= 0.5 * 0.0025;
    report(7, ok, "Calibration round trip",
           "gamma_hat=" + format_full(fit.gamma_hat) + " (|err| " + fmt(err) +
               " <= 1e-4), noisy gamma_hat=" + fmt(noisy_fit.gamma_hat) + ", pooled MSE " +
               fmt(mse) + " (0.0025 +- 50%)");
}

// 8. Hoelder bound.
void holder() {
    const double g = 0.02, m = 100, x_max = 2.0;
    bool dominated = true;
    double tightest = 0.0;
    for (int i = 0; i < 20; ++i) {
        const double y = x_max * i / 19.0;
        const auto f = [&](double x) {
            return oracle::t3_density(x, g) * oracle::t3_density(y - x, g);
        };
        const auto h = [&](double x) {
            return oracle::t3_density(-x, g) * oracle::t3_density(y + x, g);
        };
        const double eps = 2.0 * oracle::integrate_to_inf(f, x_max) +
                           oracle::integrate_to_inf(h, x_max) -
                           oracle::integrate_to_inf(f, x_max + y);
        const double bound = holder_bound_pairwise(g, m, y);
        dominated = dominated && eps <= bound;
        tightest = std::max(tightest, eps / bound);
    }
    std::vector<double> ys;
    for (int i = 0; i <= 20; ++i) ys.push_back(x_max * i / 20.0);
    const auto nfold = holder_bound_nfold(g, m, 2, ys);
    const double scale = 2.0 * holder_first_factor(g, m);
    double mismatch = 0.0;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        mismatch = std::max(mismatch, std::abs(nfold.absolute_bound[i] -
                                               holder_bound_pairwise(g, m, ys[i])) / scale);
    }
    report(8, dominated && mismatch <= 1e-6, "Hoelder bound validity",
           "max eps2/bound=" + fmt(tightest) + " over 20 points, n=2 tail-factor mismatch " +
               fmt(mismatch) + " (<=1e-6)");
}

// 9. Ingestion properties on the bundled fixtures.
void ingestion() {
    const std::string dir = HTOPT_FIXTURES_DIR;
    bool ok = true;
    std::ostringstream d;

    std::ifstream in(dir + "/synthetic_chain.csv");
    const auto parsed = parse_chain_csv(in);
    std::ostringstream a;
    serialize_chain_csv(a, parsed.records);
    std::istringstream again(a.str());
    const auto reparsed = parse_chain_csv(again);
    std::ostringstream b;
    serialize_chain_csv(b, reparsed.records);
    const bool round_trip = a.str() == b.str() && !parsed.records.empty();
    bool zero_bid_logged = false;
    for (const auto& r : parsed.rejections) zero_bid_logged |= r.reason == "zero bid";
    bool invariants = true;
    for (const auto& q : parsed.records) {
        invariants = invariants && q.bid > 0 && q.ask >= q.bid && q.mid == 0.5 * (q.bid + q.ask);
    }
    ok = round_trip && zero_bid_logged && invariants;
    d << "round trip " << (round_trip ? "ok" : "broken") << ", zero-bid row "
      << (zero_bid_logged ? "rejected" : "kept") << ", invariants "
      << (invariants ? "hold" : "violated");

    std::ifstream zin(dir + "/all_zero_bid.csv");
    const auto zero = parse_chain_csv(zin);
    ok = ok && zero.records.empty() && zero.rejections.size() == 3;
    d << ", all-zero-bid file -> " << zero.records.size() << " records";
    info("market error tables are not reproducible (source quotes unpublished);"
         " covered by criteria 6, 7 and these ingestion checks");
    report(9, ok, "Ingestion substitutes", d.str());
}

}  // namespace

int main() {
    const auto t0 = std::chrono::steady_clock::now();
    table_one();
    mgf_defect();
    tail_bound();
    spectral_fidelity();
    parity();
    oracle_equivalence();
    calibration();
    holder();
    ingestion();
    std::printf("%d of 9 criteria failed (%.1f s)\n", failures, seconds_since(t0));
    return failures;
}

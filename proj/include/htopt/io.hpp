#pragma once

#include <ostream>

#include <json.hpp>

#include "htopt/calibration.hpp"
#include "htopt/format.hpp"
#include "htopt/market_data.hpp"
#include "htopt/no_arbitrage.hpp"
#include "htopt/oracle.hpp"
#include "htopt/truncation_analysis.hpp"

namespace htopt {

using json = nlohmann::ordered_json;

namespace detail {
inline json optional_number(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}
}  // namespace detail

inline json to_json(const QuoteRecord& q) {
    return {{"strike", q.strike},  {"bid", q.bid},
            {"ask", q.ask},        {"mid", q.mid},
            {"volume", q.volume},  {"open_interest", q.open_interest}};
}

inline json to_json(const Chain& c) {
    json quotes = json::array();
    for (const auto& q : c.quotes) quotes.push_back(to_json(q));
    return {{"symbol", c.symbol},
            {"quote_date", format_date(c.quote_date)},
            {"expiry_date", format_date(c.expiry_date)},
            {"days_to_maturity", c.days_to_maturity},
            {"kind", to_string(c.kind)},
            {"quotes", quotes}};
}

inline json to_json(const CalibrationResult& r) {
    return {{"symbol", r.symbol},
            {"quote_date", format_date(r.quote_date)},
            {"expiry_used", format_date(r.expiry_used)},
            {"days_to_maturity", r.days_to_maturity},
            {"gamma_hat", r.gamma_hat},
            {"objective_value", r.objective_value},
            {"n_strikes", r.n_strikes},
            {"excluded_strikes", r.excluded},
            {"at_boundary", r.at_boundary},
            {"flat_objective", r.flat_objective},
            {"drift_mode", r.drift_mode},
            {"bracket", {r.bracket_lo, r.bracket_hi}}};
}

inline json to_json(const ErrorPanel& p) {
    json rows = json::array();
    for (const auto& r : p.rows) {
        rows.push_back({{"symbol", r.symbol},
                        {"expiry_date", format_date(r.expiry_date)},
                        {"days_to_maturity", r.days_to_maturity},
                        {"n_strikes", r.n_strikes},
                        {"model_mse", detail::optional_number(r.model_mse)},
                        {"reference_mse", detail::optional_number(r.reference_mse)},
                        {"note", r.note}});
    }
    return {{"gamma_hat", p.gamma_hat},
            {"reference_sigma", detail::optional_number(p.reference_sigma)},
            {"rows", rows}};
}

inline json to_json(const MartingaleReport& r) {
    return {{"horizon_days", r.horizon_days},
            {"mgf", r.mgf},
            {"quadratic_approx", r.quadratic_approx},
            {"relative_defect", r.relative_defect},
            {"exponent_defect", r.exponent_defect}};
}

inline json to_json(const McEstimate& m) {
    return {{"price", m.price},
            {"std_error", m.std_error},
            {"n_paths", m.n_paths},
            {"seed", m.seed},
            {"generator", m.generator}};
}

/// x_max, horizon, price rows; unavailable cells carry an empty price and a reason.
inline void write_plateau_csv(std::ostream& os, const PlateauScan& scan) {
    os << "x_max,horizon,price,status\n";
    for (std::size_t h = 0; h < scan.horizons.size(); ++h) {
        for (std::size_t x = 0; x < scan.x_max_values.size(); ++x) {
            const auto& cell = scan.cells[h][x];
            os << format_full(scan.x_max_values[x]) << ',' << scan.horizons[h] << ',';
            if (cell.price) {
                os << format_full(*cell.price) << ",ok\n";
            } else {
                os << ",\"unavailable: " << cell.failure << "\"\n";
            }
        }
    }
}

inline void write_bound_csv(std::ostream& os, const ConvErrorBound& b) {
    os << "y,absolute_bound,relative_bound\n";
    for (std::size_t i = 0; i < b.y_points.size(); ++i) {
        os << format_full(b.y_points[i]) << ',' << format_full(b.absolute_bound[i]) << ','
           << format_full(b.relative_bound[i]) << '\n';
    }
}

inline void write_panel_csv(std::ostream& os, const ErrorPanel& p) {
    os << "symbol,expiry_date,days_to_maturity,n_strikes,model_mse,reference_mse,note\n";
    for (const auto& r : p.rows) {
        os << r.symbol << ',' << format_date(r.expiry_date) << ',' << r.days_to_maturity << ','
           << r.n_strikes << ',' << (r.model_mse ? format_full(*r.model_mse) : "") << ','
           << (r.reference_mse ? format_full(*r.reference_mse) : "") << ",\"" << r.note
           << "\"\n";
    }
}

}  // namespace htopt

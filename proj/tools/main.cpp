// htopt: price, scan, calibrate and validate the truncated t(3) option model.

#include <CLI11.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "htopt/htopt.hpp"
#include "htopt/io.hpp"

namespace {

using namespace htopt;

constexpr int exit_ok = 0;
constexpr int exit_horizon = 2;
constexpr int exit_no_data = 3;
constexpr int exit_usage = 64;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NoData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        throw UsageError("bad number for " + what + ": '" + s + "'");
    }
    if (used != s.size()) throw UsageError("bad number for " + what + ": '" + s + "'");
    return v;
}

std::vector<int> parse_int_list(const std::string& s, const std::string& what) {
    std::vector<int> out;
    for (const auto& item : split(s, ',')) {
        const double v = to_double(item, what);
        if (v != std::floor(v) || v < 1) throw UsageError(what + " must be positive integers");
        out.push_back(static_cast<int>(v));
    }
    if (out.empty()) throw UsageError(what + " must not be empty");
    return out;
}

std::vector<double> parse_double_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    for (const auto& item : split(s, ',')) out.push_back(to_double(item, what));
    if (out.empty()) throw UsageError(what + " must not be empty");
    return out;
}

// "log:lo:hi:n" or a comma list.
std::vector<double> parse_xmax_grid(const std::string& s) {
    if (s.rfind("log:", 0) == 0) {
        const auto parts = split(s.substr(4), ':');
        if (parts.size() != 3) throw UsageError("x_max grid must be log:lo:hi:n");
        const double n = to_double(parts[2], "x_max grid count");
        if (n != std::floor(n) || n < 1) throw UsageError("x_max grid count must be >= 1");
        try {
            return log_spaced(to_double(parts[0], "x_max grid"), to_double(parts[1], "x_max grid"),
                              static_cast<int>(n));
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
    }
    return parse_double_list(s, "x_max grid");
}

DriftMode parse_drift(const std::string& s) {
    if (s == "rn") return DriftMode::risk_neutral();
    if (s.rfind("explicit:", 0) == 0) return DriftMode::fixed(to_double(s.substr(9), "drift"));
    throw UsageError("drift must be 'rn' or 'explicit:<mu>'");
}

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw NoData("cannot read " + path);
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    std::ostringstream hex;
    for (unsigned i = 0; i < len; ++i) {
        hex << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
    }
    return hex.str();
}

// UTC now, or SOURCE_DATE_EPOCH when set.
std::string timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) t = std::strtoll(env, nullptr, 10);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct Manifest {
    std::string command;
    json config = json::object();
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
};

void write_manifest(const Manifest& m, const std::string& out_path) {
    json inputs = json::array();
    for (const auto& p : m.inputs) inputs.push_back({{"path", p}, {"sha256", sha256_file(p)}});
    json doc = {{"command", m.command},
                {"tool_version", HTOPT_VERSION},
                {"schema_version", 1},
                {"config", m.config},
                {"inputs", inputs},
                {"outputs", m.outputs},
                {"timestamp", timestamp()}};
    std::ofstream os(out_path + ".manifest.json");
    os << doc.dump(2) << '\n';
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw UsageError("cannot write " + path);
    return os;
}

Calendar make_calendar(const std::vector<std::string>& holidays) {
    Calendar cal;
    for (const auto& h : holidays) {
        const auto d = parse_date(h);
        if (!d) throw UsageError("bad holiday date '" + h + "'");
        cal.holidays.insert(std::chrono::sys_days{*d});
    }
    return cal;
}

json calendar_json(const std::vector<std::string>& holidays) {
    return {{"rule", "weekdays"}, {"holidays", holidays}};
}

// ---------------------------------------------------------------------------

struct PriceArgs {
    double spot = 1.0;
    double strike = 0.0;
    int days = 0;
    std::string kind = "call";
    double gamma = 0.02;
    double x_max = 0.0;
    double rate = 0.02;
    std::size_t samples = std::size_t{1} << 18;
    std::string drift = "rn";
    int trading_days = 252;
    std::string out;
};

int run_price(const PriceArgs& a) {
    const auto kind = detail::parse_kind(a.kind);
    if (!kind) throw UsageError("kind must be call or put");
    const auto model = a.x_max > 0.0 ? ReturnModel::from_half_width(a.gamma, a.x_max)
                                     : ReturnModel::from_multiple(a.gamma, 100.0);
    PricingConfig cfg{a.spot, a.rate, a.trading_days, parse_drift(a.drift)};
    cfg.validate();
    const OptionContract contract{a.strike, a.days, *kind};
    contract.validate();

    SpectralOptions options;
    options.n_samples = a.samples;
    const auto grid = build_density(model, a.days, options);
    const auto result = price(grid, contract, cfg);
    const OptionContract other{a.strike, a.days,
                               *kind == OptionKind::call ? OptionKind::put : OptionKind::call};
    const auto counterpart = price(grid, other, cfg);
    const double residual = parity_residual(grid, a.strike, cfg);
    const auto mgf = martingale_report(grid);

    auto line = [](const std::string& key, const std::string& value) {
        std::cout << std::left << std::setw(19) << key << value << '\n';
    };
    line("kind", to_string(*kind));
    line("strike", format_short(a.strike));
    line("days", std::to_string(a.days));
    line("gamma", format_short(model.gamma()));
    line("x_max", format_short(model.x_max()));
    line("drift_mode", cfg.drift.describe());
    line("price", format_short(result.price));
    line("intrinsic", format_short(result.intrinsic));
    line(std::string(to_string(other.kind)) + "_counterpart", format_short(counterpart.price));
    line("parity_residual", format_short(residual));
    line("mgf_defect", format_short(mgf.relative_defect));
    line("exponent_defect", format_short(mgf.exponent_defect));

    if (!a.out.empty()) {
        json doc = {{"kind", to_string(*kind)},
                    {"strike", a.strike},
                    {"days", a.days},
                    {"price", result.price},
                    {"intrinsic", result.intrinsic},
                    {"counterpart", counterpart.price},
                    {"parity_residual", residual},
                    {"martingale", to_json(mgf)},
                    {"manifest", a.out + ".manifest.json"}};
        open_out(a.out) << doc.dump(2) << '\n';
        Manifest m{"price",
                   {{"gamma", model.gamma()},
                    {"m_mult", model.m_mult()},
                    {"x_max", model.x_max()},
                    {"n_samples", a.samples},
                    {"rate", a.rate},
                    {"trading_days_per_year", a.trading_days},
                    {"drift_mode", cfg.drift.describe()},
                    {"spot", a.spot}},
                   {},
                   {a.out}};
        write_manifest(m, a.out);
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct PlateauArgs {
    double gamma = 0.02;
    double strike_ratio = 0.0;
    std::string horizons = "1,8,64";
    std::string xmax_grid = "log:0.1:20:40";
    std::string inclination;
    std::string delta = "by-moneyness";
    double rate = 0.02;
    double spot = 1.0;
    std::size_t samples = std::size_t{1} << 18;
    double edge_limit = 1e-2;
    std::string drift = "rn";
    std::string out;
};

int run_plateau(const PlateauArgs& a) {
    const auto horizons = parse_int_list(a.horizons, "horizons");
    const auto xs = parse_xmax_grid(a.xmax_grid);
    for (std::size_t i = 1; i < xs.size(); ++i) {
        if (!(xs[i] > xs[i - 1])) throw UsageError("x_max grid must be strictly increasing");
    }
    DeltaConvention convention = DeltaConvention::by_moneyness;
    if (a.delta == "relative") convention = DeltaConvention::relative;
    else if (a.delta == "absolute") convention = DeltaConvention::absolute;
    else if (a.delta != "by-moneyness") throw UsageError("delta must be by-moneyness, relative or absolute");

    double left = xs.front(), mid = xs[xs.size() / 2], right = xs.back();
    if (!a.inclination.empty()) {
        const auto pts = parse_double_list(a.inclination, "inclination points");
        if (pts.size() != 3) throw UsageError("inclination needs left,mid,right");
        left = pts[0];
        mid = pts[1];
        right = pts[2];
    }

    PricingConfig cfg{a.spot, a.rate, 252, parse_drift(a.drift)};
    PlateauOptions options{a.samples, a.edge_limit};
    const auto scan = plateau_scan(a.gamma, a.strike_ratio, horizons, xs, cfg, options);
    std::vector<InclinationRow> rows;
    try {
        rows = plateau_inclination(scan, left, mid, right, convention);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }

    std::ostringstream summary;
    const bool relative = !rows.empty() && rows.front().relative;
    summary << "# inclination K/S=" << format_short(a.strike_ratio) << " x_max=("
            << format_short(left) << ", " << format_short(mid) << ", " << format_short(right)
            << ") delta=" << (relative ? "relative" : "absolute") << '\n';
    summary << "# horizon  C_left  C_mid  C_right  dC_left  dC_right\n";
    auto cell = [](const std::optional<double>& v) {
        return v ? format_short(*v) : std::string("--");
    };
    for (const auto& r : rows) {
        summary << "# " << r.horizon << "  " << cell(r.c_left) << "  " << cell(r.c_mid) << "  "
                << cell(r.c_right) << "  " << cell(r.delta_left) << "  " << cell(r.delta_right)
                << '\n';
    }

    if (a.out.empty()) {
        write_plateau_csv(std::cout, scan);
        std::cerr << summary.str();
    } else {
        auto os = open_out(a.out);
        write_plateau_csv(os, scan);
        std::cout << summary.str();
        Manifest m{"plateau",
                   {{"gamma", a.gamma},
                    {"strike_ratio", a.strike_ratio},
                    {"horizons", horizons},
                    {"x_max_grid", a.xmax_grid},
                    {"n_samples", a.samples},
                    {"edge_ratio_limit", a.edge_limit},
                    {"rate", a.rate},
                    {"drift_mode", cfg.drift.describe()},
                    {"delta_convention", relative ? "relative" : "absolute"}},
                   {},
                   {a.out}};
        write_manifest(m, a.out);
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct CalibrateArgs {
    std::string chains;
    std::string symbol;
    std::string quote_date;
    double spot = 0.0;
    double rate = 0.02;
    double m_mult = 100.0;
    std::size_t samples = std::size_t{1} << 18;
    std::string drift = "rn";
    std::vector<std::string> holidays;
    bool no_reference = false;
    std::string out;
    std::string panel_csv;
};

int run_calibrate(const CalibrateArgs& a) {
    std::ifstream in(a.chains);
    if (!in) throw NoData("cannot read " + a.chains);
    ParsedChainFile parsed;
    try {
        parsed = parse_chain_csv(in);
    } catch (const ParseError& e) {
        throw NoData(e.what());
    }
    for (const auto& r : parsed.rejections) {
        std::cerr << a.chains << ":" << r.line << ": rejected: " << r.reason << '\n';
    }

    std::optional<Date> quote_date;
    if (!a.quote_date.empty()) {
        quote_date = parse_date(a.quote_date);
        if (!quote_date) throw UsageError("bad quote date '" + a.quote_date + "'");
    }
    std::vector<QuoteRecord> selected;
    for (const auto& r : parsed.records) {
        if (r.symbol != a.symbol) continue;
        if (quote_date && r.quote_date != *quote_date) continue;
        selected.push_back(r);
    }
    if (selected.empty()) throw NoData("no usable quotes for symbol " + a.symbol);
    if (!quote_date) {
        for (const auto& r : selected) {
            if (r.quote_date != selected.front().quote_date) {
                throw UsageError("several quote dates present; pass --quote-date");
            }
        }
    }

    const auto calendar = make_calendar(a.holidays);
    std::vector<std::string> skipped;
    auto chains = group_chains(selected, calendar, &skipped);
    for (const auto& s : skipped) std::cerr << "skipped chain " << s << '\n';
    std::vector<Chain> calls;
    for (auto& c : chains) {
        if (c.kind == OptionKind::call) calls.push_back(std::move(c));
    }
    const auto nearest = select_nearest_expiry(calls);
    if (!nearest) throw NoData("no call chain with at least three strikes");

    CalibrationConfig cfg;
    cfg.pricing = PricingConfig{a.spot, a.rate, 252, parse_drift(a.drift)};
    cfg.pricing.validate();
    cfg.m_mult = a.m_mult;
    cfg.spectral.n_samples = a.samples;

    CalibrationResult result;
    try {
        result = fit_gamma(calls[*nearest], cfg);
    } catch (const EmptyObjective& e) {
        throw NoData(e.what());
    }
    std::vector<Chain> rest;
    for (std::size_t i = 0; i < calls.size(); ++i) {
        if (i != *nearest) rest.push_back(calls[i]);
    }
    std::optional<double> sigma;
    if (!a.no_reference) sigma = fit_bsm_sigma(calls[*nearest], cfg.pricing);
    const auto panel = evaluate_panel(result.gamma_hat, rest, cfg, sigma);

    if (result.at_boundary) std::cerr << "warning: gamma_hat on the search bracket boundary\n";
    if (result.flat_objective) std::cerr << "warning: objective is flat over the bracket\n";
    if (result.gamma_hat < 0.01 || result.gamma_hat > 0.03) {
        std::cerr << "note: gamma_hat outside the 0.01..0.03 range typical of equity chains\n";
    }

    json doc = {{"result", to_json(result)},
                {"panel", to_json(panel)},
                {"rejected_rows", parsed.rejections.size()}};
    if (!a.out.empty()) doc["manifest"] = a.out + ".manifest.json";
    if (a.out.empty()) {
        std::cout << doc.dump(2) << '\n';
    } else {
        open_out(a.out) << doc.dump(2) << '\n';
        std::cout << "gamma_hat " << format_short(result.gamma_hat) << "  objective "
                  << format_short(result.objective_value) << "  strikes " << result.n_strikes
                  << "  expiry " << format_date(result.expiry_used) << '\n';
    }
    if (!a.panel_csv.empty()) {
        auto os = open_out(a.panel_csv);
        write_panel_csv(os, panel);
    }
    if (!a.out.empty()) {
        std::vector<std::string> outputs{a.out};
        if (!a.panel_csv.empty()) outputs.push_back(a.panel_csv);
        Manifest m{"calibrate",
                   {{"symbol", a.symbol},
                    {"quote_date", format_date(result.quote_date)},
                    {"spot", a.spot},
                    {"m_mult", a.m_mult},
                    {"n_samples", a.samples},
                    {"rate", a.rate},
                    {"drift_mode", cfg.pricing.drift.describe()},
                    {"calendar", calendar_json(a.holidays)}},
                   {a.chains},
                   outputs};
        write_manifest(m, a.out);
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct ValidateArgs {
    double gamma = 0.02;
    double m_mult = 100.0;
    std::string horizons = "1,8,16,32,64";
    std::string strikes = "0.9,1,1.1";
    std::size_t paths = 100000;
    std::uint64_t seed = 20180228;
    double rate = 0.02;
    std::size_t samples = std::size_t{1} << 18;
    std::string out;
};

int run_validate(const ValidateArgs& a) {
    const auto horizons = parse_int_list(a.horizons, "horizons");
    const auto strikes = parse_double_list(a.strikes, "strikes");
    const auto model = ReturnModel::from_multiple(a.gamma, a.m_mult);
    PricingConfig cfg;
    cfg.annual_rate = a.rate;
    SpectralOptions options;
    options.n_samples = a.samples;

    json rows = json::array();
    std::cout << "horizon  mgf_defect  exponent_defect  max|parity|/S  strike  quad  mc  "
                 "delta  margin  status\n";
    int failures = 0;
    for (int n : horizons) {
        json row = {{"horizon_days", n}};
        std::optional<DensityGrid> built;
        try {
            built.emplace(build_density(model, n, options));
        } catch (const HorizonUnavailable& e) {
            std::cout << n << "  unavailable: " << e.reason() << '\n';
            row["unavailable"] = e.reason();
            rows.push_back(row);
            continue;
        }
        const DensityGrid& grid = *built;
        const auto report = martingale_report(grid);
        double parity = 0.0;
        for (double k : strikes) {
            parity = std::max(parity, std::abs(parity_residual(grid, k, cfg)) / cfg.spot);
        }
        row["martingale"] = to_json(report);
        row["max_parity_residual"] = parity;

        json mc_rows = json::array();
        if (a.paths > 0) {
            const auto mc = mc_price_panel(model, strikes, n, OptionKind::call, cfg, a.paths,
                                           a.seed + static_cast<std::uint64_t>(n));
            for (std::size_t i = 0; i < strikes.size(); ++i) {
                const OptionContract c{strikes[i], n, OptionKind::call};
                const double quad = price_call(grid, c, cfg).price;
                const double budget = ordering_error_budget(model, c, cfg, options);
                const double margin = 3.0 * mc[i].std_error + budget;
                const double delta = mc[i].price - quad;
                const bool ok = std::abs(delta) <= margin;
                failures += ok ? 0 : 1;
                std::cout << n << "  " << format_short(report.relative_defect) << "  "
                          << format_short(report.exponent_defect) << "  "
                          << format_short(parity) << "  " << format_short(strikes[i]) << "  "
                          << format_short(quad) << "  " << format_short(mc[i].price) << "  "
                          << format_short(delta) << "  " << format_short(margin) << "  "
                          << (ok ? "ok" : "FAIL") << '\n';
                json e = to_json(mc[i]);
                e["strike"] = strikes[i];
                e["quadrature"] = quad;
                e["margin"] = margin;
                e["within_margin"] = ok;
                mc_rows.push_back(e);
            }
        } else {
            std::cout << n << "  " << format_short(report.relative_defect) << "  "
                      << format_short(report.exponent_defect) << "  " << format_short(parity)
                      << '\n';
        }
        row["monte_carlo"] = mc_rows;
        rows.push_back(row);
    }
    std::cout << "mc_failures " << failures << '\n';
    if (!a.out.empty()) {
        json doc = {{"gamma", a.gamma}, {"rows", rows}, {"manifest", a.out + ".manifest.json"}};
        open_out(a.out) << doc.dump(2) << '\n';
        Manifest m{"validate",
                   {{"gamma", a.gamma},
                    {"m_mult", a.m_mult},
                    {"n_samples", a.samples},
                    {"rate", a.rate},
                    {"drift_mode", cfg.drift.describe()},
                    {"paths", a.paths},
                    {"seed", a.seed},
                    {"generator", "mt19937_64"}},
                   {},
                   {a.out}};
        write_manifest(m, a.out);
    }
    return exit_ok;
}

// ---------------------------------------------------------------------------

struct IngestArgs {
    std::string chains;
    std::vector<std::string> holidays;
    std::string out;
};

int run_ingest(const IngestArgs& a) {
    std::ifstream in(a.chains);
    if (!in) throw NoData("cannot read " + a.chains);
    ParsedChainFile parsed;
    try {
        parsed = parse_chain_csv(in);
    } catch (const ParseError& e) {
        throw NoData(e.what());
    }
    const auto calendar = make_calendar(a.holidays);
    std::vector<std::string> skipped;
    const auto chains = group_chains(parsed.records, calendar, &skipped);

    json bundle = {{"source", a.chains}, {"chains", json::array()}, {"rejections", json::array()}};
    for (const auto& c : chains) bundle["chains"].push_back(to_json(c));
    for (const auto& r : parsed.rejections) {
        bundle["rejections"].push_back({{"line", r.line}, {"reason", r.reason}});
    }
    bundle["skipped"] = skipped;
    if (a.out.empty()) {
        std::cout << bundle.dump(2) << '\n';
    } else {
        bundle["manifest"] = a.out + ".manifest.json";
        open_out(a.out) << bundle.dump(2) << '\n';
        Manifest m{"ingest", {{"calendar", calendar_json(a.holidays)}}, {a.chains}, {a.out}};
        write_manifest(m, a.out);
    }
    std::cerr << parsed.records.size() << " records, " << parsed.rejections.size()
              << " rejected, " << chains.size() << " chains\n";
    return parsed.records.empty() ? exit_no_data : exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Option pricing with truncated Student-t(3) returns"};
    app.require_subcommand(1);
    app.set_version_flag("--version", HTOPT_VERSION);

    PriceArgs pa;
    auto* price_cmd = app.add_subcommand("price", "Price one European option");
    price_cmd->add_option("--spot", pa.spot, "Spot price")->capture_default_str();
    price_cmd->add_option("--strike", pa.strike, "Strike")->required();
    price_cmd->add_option("--days", pa.days, "Trading days to maturity")->required();
    price_cmd->add_option("--kind", pa.kind, "call or put")->capture_default_str();
    price_cmd->add_option("--gamma", pa.gamma, "Daily t(3) width")->capture_default_str();
    price_cmd->add_option("--xmax", pa.x_max, "Truncation half-width (default 100*gamma)");
    price_cmd->add_option("--rate", pa.rate, "Annual rate")->capture_default_str();
    price_cmd->add_option("--samples", pa.samples, "Grid samples (power of two)")
        ->capture_default_str();
    price_cmd->add_option("--drift", pa.drift, "rn or explicit:<mu per day>")
        ->capture_default_str();
    price_cmd->add_option("--trading-days", pa.trading_days, "Trading days per year")
        ->capture_default_str();
    price_cmd->add_option("--out", pa.out, "Write a JSON result and manifest");

    PlateauArgs pl;
    auto* plateau_cmd = app.add_subcommand("plateau", "Price against truncation width");
    plateau_cmd->add_option("--gamma", pl.gamma)->capture_default_str();
    plateau_cmd->add_option("--strike-ratio", pl.strike_ratio, "K/S")->required();
    plateau_cmd->add_option("--horizons", pl.horizons, "Comma list of days")
        ->capture_default_str();
    plateau_cmd->add_option("--xmax-grid", pl.xmax_grid, "log:lo:hi:n or comma list")
        ->capture_default_str();
    plateau_cmd->add_option("--inclination", pl.inclination, "left,mid,right x_max values");
    plateau_cmd->add_option("--delta", pl.delta, "by-moneyness, relative or absolute")
        ->capture_default_str();
    plateau_cmd->add_option("--rate", pl.rate)->capture_default_str();
    plateau_cmd->add_option("--spot", pl.spot)->capture_default_str();
    plateau_cmd->add_option("--samples", pl.samples)->capture_default_str();
    plateau_cmd->add_option("--edge-limit", pl.edge_limit, "Edge/peak guard for scan cells")
        ->capture_default_str();
    plateau_cmd->add_option("--drift", pl.drift)->capture_default_str();
    plateau_cmd->add_option("--out", pl.out, "CSV output file (default stdout)");

    CalibrateArgs ca;
    auto* calibrate_cmd = app.add_subcommand("calibrate", "Fit gamma to a chain snapshot");
    calibrate_cmd->add_option("--chains", ca.chains, "Chain CSV")->required();
    calibrate_cmd->add_option("--symbol", ca.symbol)->required();
    calibrate_cmd->add_option("--quote-date", ca.quote_date, "YYYY-MM-DD");
    calibrate_cmd->add_option("--spot", ca.spot, "Underlying price on the quote date")
        ->required();
    calibrate_cmd->add_option("--rate", ca.rate)->capture_default_str();
    calibrate_cmd->add_option("--m-mult", ca.m_mult, "Truncation multiple M")
        ->capture_default_str();
    calibrate_cmd->add_option("--samples", ca.samples)->capture_default_str();
    calibrate_cmd->add_option("--drift", ca.drift)->capture_default_str();
    calibrate_cmd->add_option("--holiday", ca.holidays, "Market holiday, repeatable");
    calibrate_cmd->add_flag("--no-reference", ca.no_reference, "Skip the BSM reference column");
    calibrate_cmd->add_option("--out", ca.out, "JSON output file (default stdout)");
    calibrate_cmd->add_option("--panel-csv", ca.panel_csv, "Error panel CSV");

    ValidateArgs va;
    auto* validate_cmd = app.add_subcommand("validate", "Defect, parity and Monte Carlo report");
    validate_cmd->add_option("--gamma", va.gamma)->capture_default_str();
    validate_cmd->add_option("--m-mult", va.m_mult)->capture_default_str();
    validate_cmd->add_option("--horizons", va.horizons)->capture_default_str();
    validate_cmd->add_option("--strikes", va.strikes)->capture_default_str();
    validate_cmd->add_option("--paths", va.paths, "Monte Carlo paths (0 skips)")
        ->capture_default_str();
    validate_cmd->add_option("--seed", va.seed)->capture_default_str();
    validate_cmd->add_option("--rate", va.rate)->capture_default_str();
    validate_cmd->add_option("--samples", va.samples)->capture_default_str();
    validate_cmd->add_option("--out", va.out, "JSON output file");

    IngestArgs ia;
    auto* ingest_cmd = app.add_subcommand("ingest", "Parse a chain CSV into a JSON bundle");
    ingest_cmd->add_option("--chains", ia.chains)->required();
    ingest_cmd->add_option("--holiday", ia.holidays)->capture_default_str();
    ingest_cmd->add_option("--out", ia.out, "JSON output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_usage;
    }

    try {
        if (*price_cmd) return run_price(pa);
        if (*plateau_cmd) return run_plateau(pl);
        if (*calibrate_cmd) return run_calibrate(ca);
        if (*validate_cmd) {
            if (va.paths > 0 && va.paths < mc_min_paths) {
                throw UsageError("--paths must be 0 or at least 10000");
            }
            return run_validate(va);
        }
        if (*ingest_cmd) return run_ingest(ia);
    } catch (const HorizonUnavailable& e) {
        std::cerr << e.what() << '\n';
        return exit_horizon;
    } catch (const NoData& e) {
        std::cerr << "no data: " << e.what() << '\n';
        return exit_no_data;
    } catch (const UsageError& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return exit_usage;
    } catch (const DomainError& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return exit_usage;
    } catch (const ContractError& e) {
        std::cerr << "usage: " << e.what() << '\n';
        return exit_usage;
    }
    return exit_usage;
}

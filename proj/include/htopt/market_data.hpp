#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "htopt/errors.hpp"
#include "htopt/format.hpp"
#include "htopt/pricing.hpp"

namespace htopt {

using Date = std::chrono::year_month_day;

/// Strict ISO-8601 calendar date, YYYY-MM-DD.
inline std::optional<Date> parse_date(std::string_view s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    auto num = [&](std::string_view part, auto& out) {
        const auto r = std::from_chars(part.data(), part.data() + part.size(), out);
        return r.ec == std::errc{} && r.ptr == part.data() + part.size();
    };
    if (!num(s.substr(0, 4), y) || !num(s.substr(5, 2), m) || !num(s.substr(8, 2), d)) {
        return std::nullopt;
    }
    const Date date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!date.ok()) return std::nullopt;
    return date;
}

inline std::string format_date(const Date& date) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(date.year()),
                  static_cast<unsigned>(date.month()), static_cast<unsigned>(date.day()));
    return buf;
}

struct QuoteRecord {
    std::string symbol;
    Date quote_date;
    Date expiry_date;
    double strike = 0.0;
    OptionKind kind = OptionKind::call;
    double bid = 0.0;
    double ask = 0.0;
    double mid = 0.0;
    std::int64_t volume = 0;
    std::int64_t open_interest = 0;
};

struct Rejection {
    std::size_t line = 0;  // 1-based, header is line 1
    std::string reason;
};

struct ParsedChainFile {
    std::vector<QuoteRecord> records;
    std::vector<Rejection> rejections;
};

inline const std::vector<std::string>& chain_csv_columns() {
    static const std::vector<std::string> cols{"symbol", "quote_date", "expiry_date",
                                               "strike", "type",       "bid",
                                               "ask",    "volume",     "open_interest"};
    return cols;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
    return s;
}

inline std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(trim(line.substr(start, pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

template <class T>
bool parse_number(std::string_view s, T& out) {
    if (s.empty()) return false;
    if (s.front() == '+') s.remove_prefix(1);
    const auto r = std::from_chars(s.data(), s.data() + s.size(), out);
    return r.ec == std::errc{} && r.ptr == s.data() + s.size();
}

inline std::optional<OptionKind> parse_kind(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "call" || lower == "c") return OptionKind::call;
    if (lower == "put" || lower == "p") return OptionKind::put;
    return std::nullopt;
}

}  // namespace detail

/// Single pass over a chain snapshot. Bad rows are logged, not fatal; a
/// missing required column is.
inline ParsedChainFile parse_chain_csv(std::istream& in) {
    ParsedChainFile out;
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError("chain file is empty");
    ++line_no;
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    const auto header = detail::split_csv(line);
    std::map<std::string, std::size_t> col;
    for (std::size_t i = 0; i < header.size(); ++i) col.emplace(std::string(header[i]), i);
    std::vector<std::size_t> idx;
    for (const auto& name : chain_csv_columns()) {
        const auto it = col.find(name);
        if (it == col.end()) throw ParseError("missing required column '" + name + "'");
        idx.push_back(it->second);
    }
    const std::size_t width = header.size();

    while (std::getline(in, line)) {
        ++line_no;
        if (detail::trim(line).empty()) continue;
        const auto f = detail::split_csv(line);
        auto reject = [&](std::string reason) {
            out.rejections.push_back({line_no, std::move(reason)});
        };
        if (f.size() != width) {
            reject("malformed row: expected " + std::to_string(width) + " fields, got " +
                   std::to_string(f.size()));
            continue;
        }
        QuoteRecord r;
        r.symbol = std::string(f[idx[0]]);
        if (r.symbol.empty()) { reject("malformed symbol"); continue; }
        const auto qd = parse_date(f[idx[1]]);
        if (!qd) { reject("malformed quote_date"); continue; }
        const auto ed = parse_date(f[idx[2]]);
        if (!ed) { reject("malformed expiry_date"); continue; }
        r.quote_date = *qd;
        r.expiry_date = *ed;
        if (!detail::parse_number(f[idx[3]], r.strike) || !std::isfinite(r.strike)) {
            reject("malformed strike");
            continue;
        }
        if (!(r.strike > 0.0)) { reject("non-positive strike"); continue; }
        const auto kind = detail::parse_kind(f[idx[4]]);
        if (!kind) { reject("malformed type"); continue; }
        r.kind = *kind;
        if (!detail::parse_number(f[idx[5]], r.bid) || !std::isfinite(r.bid) || r.bid < 0.0) {
            reject("malformed bid");
            continue;
        }
        if (!detail::parse_number(f[idx[6]], r.ask) || !std::isfinite(r.ask) || r.ask < 0.0) {
            reject("malformed ask");
            continue;
        }
        if (!detail::parse_number(f[idx[7]], r.volume) || r.volume < 0) {
            reject("malformed volume");
            continue;
        }
        if (!detail::parse_number(f[idx[8]], r.open_interest) || r.open_interest < 0) {
            reject("malformed open_interest");
            continue;
        }
        if (r.bid == 0.0) { reject("zero bid"); continue; }
        if (r.ask < r.bid) { reject("crossed quote"); continue; }
        if (!(std::chrono::sys_days{r.expiry_date} > std::chrono::sys_days{r.quote_date})) {
            reject("expiry not after quote date");
            continue;
        }
        r.mid = 0.5 * (r.bid + r.ask);
        out.records.push_back(std::move(r));
    }
    return out;
}

inline void serialize_chain_csv(std::ostream& os, const std::vector<QuoteRecord>& records) {
    const auto& cols = chain_csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << '\n';
    for (const auto& r : records) {
        os << r.symbol << ',' << format_date(r.quote_date) << ',' << format_date(r.expiry_date)
           << ',' << format_full(r.strike) << ',' << to_string(r.kind) << ','
           << format_full(r.bid) << ',' << format_full(r.ask) << ',' << r.volume << ','
           << r.open_interest << '\n';
    }
}

// ---------------------------------------------------------------------------
// Trading-day calendar

struct Calendar {
    std::set<std::chrono::sys_days> holidays;  // only weekday entries matter

    bool is_trading_day(std::chrono::sys_days d) const {
        const std::chrono::weekday wd{d};
        return wd != std::chrono::Saturday && wd != std::chrono::Sunday &&
               !holidays.contains(d);
    }
};

namespace detail {

// Weekdays in [1970-01-05, d] (that date is a Monday); negative before it.
inline long long weekdays_through(std::chrono::sys_days d) {
    const long long k = d.time_since_epoch().count() - 4;
    const long long weeks = k >= 0 ? k / 7 : -((-k + 6) / 7);
    const long long rem = k - 7 * weeks;  // 0 = Monday
    return 5 * weeks + std::min<long long>(rem + 1, 5);
}

}  // namespace detail

/// Trading days in (quote_date, expiry_date]: weekdays minus weekday holidays.
inline int trading_days_between(const Date& quote_date, const Date& expiry_date,
                                 const Calendar& calendar = {}) {
    const std::chrono::sys_days q{quote_date};
    const std::chrono::sys_days e{expiry_date};
    if (!(e > q)) throw DomainError("expiry must be after the quote date");
    long long days = detail::weekdays_through(e) - detail::weekdays_through(q);
    for (auto it = calendar.holidays.upper_bound(q);
         it != calendar.holidays.end() && *it <= e; ++it) {
        const std::chrono::weekday wd{*it};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) --days;
    }
    if (days < 1) throw DomainError("no trading day before expiry");
    return static_cast<int>(days);
}

/// Quotes of one (symbol, quote date, expiry, kind), strictly increasing strikes.
struct Chain {
    std::string symbol;
    Date quote_date;
    Date expiry_date;
    int days_to_maturity = 0;
    OptionKind kind = OptionKind::call;
    std::vector<QuoteRecord> quotes;
};

/// Duplicated strikes keep the higher volume; on a tie the first seen wins.
/// Groups whose span has no trading day are dropped and noted in `skipped`.
inline std::vector<Chain> group_chains(const std::vector<QuoteRecord>& records,
                                       const Calendar& calendar = {},
                                       std::vector<std::string>* skipped = nullptr) {
    using Key = std::tuple<std::string, std::chrono::sys_days, std::chrono::sys_days, int>;
    std::map<Key, std::map<double, QuoteRecord>> groups;
    for (const auto& r : records) {
        const Key key{r.symbol, std::chrono::sys_days{r.quote_date},
                      std::chrono::sys_days{r.expiry_date}, static_cast<int>(r.kind)};
        auto& by_strike = groups[key];
        const auto [it, inserted] = by_strike.emplace(r.strike, r);
        if (!inserted && r.volume > it->second.volume) it->second = r;
    }

    std::vector<Chain> out;
    for (auto& [key, by_strike] : groups) {
        Chain c;
        c.symbol = std::get<0>(key);
        c.quote_date = Date{std::get<1>(key)};
        c.expiry_date = Date{std::get<2>(key)};
        c.kind = static_cast<OptionKind>(std::get<3>(key));
        try {
            c.days_to_maturity = trading_days_between(c.quote_date, c.expiry_date, calendar);
        } catch (const DomainError& e) {
            if (skipped) {
                skipped->push_back(c.symbol + " " + format_date(c.expiry_date) + ": " +
                                   e.what());
            }
            continue;
        }
        for (auto& [strike, q] : by_strike) c.quotes.push_back(std::move(q));
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace htopt

#include "floatbook/market_data.hpp"

#include "floatbook/csv.hpp"
#include "floatbook/errors.hpp"
#include "floatbook/numfmt.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>
#include <utility>

namespace floatbook {

std::string_view to_string(EventKind kind) {
    switch (kind) {
        case EventKind::initial_ipo: return "initial_ipo";
        case EventKind::secondary_offering: return "secondary_offering";
        case EventKind::cancellation: return "cancellation";
    }
    return "?";
}

EventKind parse_event_kind(std::string_view text) {
    if (text == "initial_ipo") return EventKind::initial_ipo;
    if (text == "secondary_offering") return EventKind::secondary_offering;
    if (text == "cancellation") return EventKind::cancellation;
    throw InputError("unknown event kind '" + std::string(text) + "'");
}

std::string_view to_string(AvgPriceMode mode) {
    switch (mode) {
        case AvgPriceMode::auto_priority: return "auto";
        case AvgPriceMode::explicit_only: return "explicit";
        case AvgPriceMode::currency_over_shares: return "currency_over_shares";
        case AvgPriceMode::high_low_mid: return "high_low_mid";
    }
    return "?";
}

AvgPriceMode parse_avg_price_mode(std::string_view text) {
    if (text == "auto") return AvgPriceMode::auto_priority;
    if (text == "explicit") return AvgPriceMode::explicit_only;
    if (text == "currency_over_shares") return AvgPriceMode::currency_over_shares;
    if (text == "high_low_mid") return AvgPriceMode::high_low_mid;
    throw InputError("unknown avg-price mode '" + std::string(text) +
                     "' (expected auto|explicit|currency_over_shares|high_low_mid)");
}

namespace {

std::string at(std::string_view source_name, size_t line) {
    return std::string(source_name) + ":" + std::to_string(line);
}

std::optional<double> optional_field(const csv::Row& row, std::optional<size_t> col,
                                     std::string_view source_name, std::string_view name) {
    if (!col || row.fields[*col].empty()) return std::nullopt;
    return csv::parse_double(row.fields[*col], source_name, row.line_number, name);
}

} // namespace

std::vector<DailyBar> parse_bars(std::istream& in, std::string_view source_name) {
    const csv::Table table = csv::read_table(in, source_name);

    const auto col_date = csv::find_column(table, "date");
    const auto col_shares = csv::find_column(table, "volume_shares");
    const auto col_avg = csv::find_column(table, "avg_price");
    const auto col_currency = csv::find_column(table, "volume_currency");
    const auto col_high = csv::find_column(table, "high");
    const auto col_low = csv::find_column(table, "low");

    if (!col_date) throw InputError(std::string(source_name) + ": missing mandatory column 'date'");
    if (!col_shares) {
        throw InputError(std::string(source_name) + ": missing mandatory column 'volume_shares'");
    }
    if (!col_avg && !col_currency && !(col_high && col_low)) {
        throw InputError(std::string(source_name) +
                         ": need a price column: avg_price, volume_currency, or both high and low");
    }

    std::vector<DailyBar> bars;
    bars.reserve(table.rows.size());
    std::map<Date, size_t> seen_dates;
    for (const auto& row : table.rows) {
        DailyBar bar;
        try {
            bar.date = Date::parse(row.fields[*col_date]);
        } catch (const InputError& e) {
            throw InputError(at(source_name, row.line_number) + ": " + e.what());
        }
        bar.volume_shares =
            csv::parse_double(row.fields[*col_shares], source_name, row.line_number, "volume_shares");
        bar.avg_price = optional_field(row, col_avg, source_name, "avg_price");
        bar.volume_currency = optional_field(row, col_currency, source_name, "volume_currency");
        bar.high = optional_field(row, col_high, source_name, "high");
        bar.low = optional_field(row, col_low, source_name, "low");

        if (bar.volume_shares < 0) {
            throw InputError(at(source_name, row.line_number) + ": negative volume_shares");
        }
        for (const auto* p : {&bar.avg_price, &bar.high, &bar.low}) {
            if (*p && **p <= 0) {
                throw InputError(at(source_name, row.line_number) + ": non-positive price");
            }
        }
        if (bar.volume_currency && *bar.volume_currency < 0) {
            throw InputError(at(source_name, row.line_number) + ": negative volume_currency");
        }
        if (bar.high && bar.low && *bar.low > *bar.high) {
            throw InputError(at(source_name, row.line_number) + ": low above high");
        }
        const auto [it, inserted] = seen_dates.emplace(bar.date, row.line_number);
        if (!inserted) {
            throw InputError(at(source_name, row.line_number) + ": duplicate bar date " +
                             bar.date.to_string() + " (first seen on line " +
                             std::to_string(it->second) + ")");
        }
        bars.push_back(bar);
    }

    std::stable_sort(bars.begin(), bars.end(),
                     [](const DailyBar& a, const DailyBar& b) { return a.date < b.date; });
    return bars;
}

DailyBar derive_avg_price(DailyBar bar, AvgPriceMode mode) {
    if (bar.avg_price) return bar; // explicit value always wins

    const bool currency_ok = bar.volume_currency.has_value() && bar.volume_shares > 0;
    const bool highlow_ok = bar.high.has_value() && bar.low.has_value();

    switch (mode) {
        case AvgPriceMode::explicit_only:
            throw InputError("bar " + bar.date.to_string() +
                             ": avg_price column required in explicit mode");
        case AvgPriceMode::currency_over_shares:
            if (!bar.volume_currency) {
                throw InputError("bar " + bar.date.to_string() + ": volume_currency unavailable");
            }
            if (bar.volume_shares <= 0) {
                throw InputError("bar " + bar.date.to_string() +
                                 ": cannot divide volume_currency by zero shares");
            }
            bar.avg_price = *bar.volume_currency / bar.volume_shares;
            break;
        case AvgPriceMode::high_low_mid:
            if (!highlow_ok) {
                throw InputError("bar " + bar.date.to_string() + ": high/low unavailable");
            }
            bar.avg_price = (*bar.high + *bar.low) / 2.0;
            break;
        case AvgPriceMode::auto_priority:
            if (currency_ok) {
                bar.avg_price = *bar.volume_currency / bar.volume_shares;
            } else if (highlow_ok) {
                bar.avg_price = (*bar.high + *bar.low) / 2.0;
            } else if (bar.volume_currency && bar.volume_shares <= 0) {
                throw InputError("bar " + bar.date.to_string() +
                                 ": cannot divide volume_currency by zero shares");
            } else {
                throw InputError("bar " + bar.date.to_string() + ": no route to an average price");
            }
            break;
    }
    if (*bar.avg_price <= 0) {
        throw InputError("bar " + bar.date.to_string() + ": derived average price not positive");
    }
    return bar;
}

std::vector<DailyBar> derive_series_prices(std::vector<DailyBar> bars, AvgPriceMode mode) {
    for (auto& bar : bars) {
        if (bar.avg_price) continue;
        try {
            bar = derive_avg_price(bar, mode);
        } catch (const InputError&) {
            if (bar.volume_shares > 0) throw; // no-op days may stay priceless
        }
    }
    return bars;
}

std::vector<FloatEvent> parse_events(std::istream& in, std::string_view source_name) {
    const csv::Table table = csv::read_table(in, source_name);

    for (const char* name : {"date", "kind", "shares", "price"}) {
        if (!csv::find_column(table, name)) {
            throw InputError(std::string(source_name) + ": missing mandatory column '" +
                             name + "'");
        }
    }
    const size_t col_date = *csv::find_column(table, "date");
    const size_t col_kind = *csv::find_column(table, "kind");
    const size_t col_shares = *csv::find_column(table, "shares");
    const size_t col_price = *csv::find_column(table, "price");

    std::vector<FloatEvent> events;
    events.reserve(table.rows.size());
    std::set<std::pair<Date, EventKind>> seen;
    std::optional<size_t> ipo_line;
    for (const auto& row : table.rows) {
        FloatEvent ev;
        try {
            ev.date = Date::parse(row.fields[col_date]);
            ev.kind = parse_event_kind(row.fields[col_kind]);
        } catch (const InputError& e) {
            throw InputError(at(source_name, row.line_number) + ": " + e.what());
        }
        ev.shares = csv::parse_double(row.fields[col_shares], source_name, row.line_number, "shares");
        if (!row.fields[col_price].empty()) {
            ev.price = csv::parse_double(row.fields[col_price], source_name, row.line_number, "price");
        }

        if (ev.shares <= 0) {
            throw InputError(at(source_name, row.line_number) + ": shares must be positive");
        }
        if (ev.kind != EventKind::cancellation && !ev.price) {
            throw InputError(at(source_name, row.line_number) + ": price required for " +
                             std::string(to_string(ev.kind)));
        }
        if (ev.price && *ev.price <= 0) {
            throw InputError(at(source_name, row.line_number) + ": non-positive price");
        }
        if (ev.kind == EventKind::initial_ipo) {
            if (ipo_line) {
                throw InputError(at(source_name, row.line_number) +
                                 ": expected exactly one initial_ipo event (first on line " +
                                 std::to_string(*ipo_line) + ")");
            }
            ipo_line = row.line_number;
        }
        if (!seen.emplace(ev.date, ev.kind).second) {
            throw InputError(at(source_name, row.line_number) + ": duplicate (date, kind): " +
                             ev.date.to_string() + ", " + std::string(to_string(ev.kind)));
        }
        events.push_back(ev);
    }

    if (!ipo_line) {
        throw InputError(std::string(source_name) +
                         ": expected exactly one initial_ipo event, found none");
    }

    std::stable_sort(events.begin(), events.end(), [](const FloatEvent& a, const FloatEvent& b) {
        if (a.date != b.date) return a.date < b.date;
        return static_cast<int>(a.kind) < static_cast<int>(b.kind);
    });

    if (events.front().kind != EventKind::initial_ipo) {
        throw InputError(std::string(source_name) + ": initial_ipo must precede all other events");
    }
    for (size_t i = 1; i < events.size(); ++i) {
        if (events[i].date <= events.front().date) {
            throw InputError(std::string(source_name) + ": event on " + events[i].date.to_string() +
                             " does not follow the initial_ipo date");
        }
    }
    return events;
}

InstrumentSeries assemble_series(std::vector<DailyBar> bars, std::vector<FloatEvent> events,
                                 std::string symbol) {
    if (bars.empty()) throw InputError(symbol + ": no bars");
    if (events.empty() || events.front().kind != EventKind::initial_ipo) {
        throw InputError(symbol + ": events must start with the initial_ipo");
    }
    for (size_t i = 1; i < bars.size(); ++i) {
        if (!(bars[i - 1].date < bars[i].date)) {
            throw InputError(symbol + ": bars not strictly increasing at " + bars[i].date.to_string());
        }
    }
    const Date ipo_date = events.front().date;
    if (!(ipo_date < bars.front().date)) {
        throw InputError(symbol + ": initial_ipo (" + ipo_date.to_string() +
                         ") must precede the first bar (" + bars.front().date.to_string() + ")");
    }
    const Date last_bar = bars.back().date;
    for (const auto& ev : events) {
        if (ev.date > last_bar) {
            throw InputError(symbol + ": event on " + ev.date.to_string() +
                             " falls after the last bar (" + last_bar.to_string() + ")");
        }
        if (&ev != &events.front() && ev.date <= ipo_date) {
            throw InputError(symbol + ": event on " + ev.date.to_string() +
                             " does not follow the initial_ipo date");
        }
    }
    return InstrumentSeries{std::move(symbol), std::move(bars), std::move(events)};
}

namespace {

std::string cell(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

} // namespace

void write_bars_csv(std::ostream& out, const std::vector<DailyBar>& bars) {
    out << "date,avg_price,volume_shares,volume_currency,high,low\n";
    for (const auto& bar : bars) {
        out << bar.date.to_string() << ',' << cell(bar.avg_price) << ','
            << format_number(bar.volume_shares) << ',' << cell(bar.volume_currency) << ','
            << cell(bar.high) << ',' << cell(bar.low) << '\n';
    }
}

void write_events_csv(std::ostream& out, const std::vector<FloatEvent>& events) {
    out << "date,kind,shares,price\n";
    for (const auto& ev : events) {
        out << ev.date.to_string() << ',' << to_string(ev.kind) << ','
            << format_number(ev.shares) << ',' << cell(ev.price) << '\n';
    }
}

} // namespace floatbook

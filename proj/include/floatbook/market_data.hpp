#pragma once

#include "floatbook/date.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace floatbook {

// One trading day. avg_price may be absent on input and is filled in by
// derive_avg_price; volumes are carried as doubles because the book update
// produces fractional share counts immediately.
struct DailyBar {
    Date date;
    std::optional<double> avg_price;       // currency/share
    double volume_shares = 0.0;            // shares traded that day
    std::optional<double> volume_currency; // currency traded that day
    std::optional<double> high;
    std::optional<double> low;

    bool operator==(const DailyBar&) const = default;
};

enum class EventKind { initial_ipo, secondary_offering, cancellation };

std::string_view to_string(EventKind kind);
EventKind parse_event_kind(std::string_view text);

// A dated free-float mutation. price is required for initial_ipo and
// secondary_offering; for cancellation the current market price is used at
// apply time, so the field may be left unset.
struct FloatEvent {
    Date date;
    EventKind kind = EventKind::initial_ipo;
    double shares = 0.0;
    std::optional<double> price;

    bool operator==(const FloatEvent&) const = default;
};

struct InstrumentSeries {
    std::string symbol;
    std::vector<DailyBar> bars;     // strictly increasing by date
    std::vector<FloatEvent> events; // sorted, initial_ipo first
};

// How the daily average price is derived when not given explicitly.
enum class AvgPriceMode {
    auto_priority,        // explicit, else currency/shares, else (high+low)/2
    explicit_only,        // require the avg_price column
    currency_over_shares, // volume_currency / volume_shares
    high_low_mid,         // (high + low) / 2
};

std::string_view to_string(AvgPriceMode mode);
AvgPriceMode parse_avg_price_mode(std::string_view text);

// Bars CSV: header names at least date and volume_shares, plus one of
// avg_price, volume_currency, or the high/low pair. Column order is free.
// Returns bars sorted by date; duplicate dates and invalid values are
// errors reported as <source_name>:<line>.
std::vector<DailyBar> parse_bars(std::istream& in, std::string_view source_name);

// Fills in bar.avg_price. An already-present avg_price is never overwritten;
// the mode selects which derivation route may be used for absent ones.
// Throws InputError when the required route is unavailable.
DailyBar derive_avg_price(DailyBar bar, AvgPriceMode mode = AvgPriceMode::auto_priority);

// derive_avg_price over a whole series. Zero-volume bars with no derivable
// price are passed through untouched (the core treats them as no-op days);
// bars that traded volume must end up with a price.
std::vector<DailyBar> derive_series_prices(std::vector<DailyBar> bars,
                                           AvgPriceMode mode = AvgPriceMode::auto_priority);

// Events CSV: header date,kind,shares,price. Exactly one initial_ipo,
// strictly before every other event; (date, kind) pairs are unique.
std::vector<FloatEvent> parse_events(std::istream& in, std::string_view source_name);

// Merge and validate: IPO strictly before the first bar, every event within
// [IPO date, last bar date], bars strictly increasing.
InstrumentSeries assemble_series(std::vector<DailyBar> bars, std::vector<FloatEvent> events,
                                 std::string symbol);

// Writers for the same two formats; parse(write(x)) == x.
void write_bars_csv(std::ostream& out, const std::vector<DailyBar>& bars);
void write_events_csv(std::ostream& out, const std::vector<FloatEvent>& events);

} // namespace floatbook

#pragma once

#include "floatbook/date.hpp"
#include "floatbook/market_data.hpp"

#include <optional>
#include <vector>

namespace floatbook {

// Behavior when a day's traded volume reaches the whole free float (the
// proportional-decay factor would hit zero or below).
enum class TurnoverMode {
    error, // reject the day, naming the date
    clamp, // full turnover: the whole float moves to the day's price
};

std::string_view to_string(TurnoverMode mode);
TurnoverMode parse_turnover_mode(std::string_view text);

struct BookOptions {
    double tick = 0.01; // entry prices snap to this grid and same-tick entries merge
    TurnoverMode turnover_mode = TurnoverMode::error;
};

// Snaps a price to the tick grid. Throws InputError when the price would
// round to zero or the level overflows.
double round_price_to_tick(double price, double tick);

// Remaining volume still held at one acquisition price level.
struct BookEntry {
    double price = 0.0;  // tick-rounded, > 0
    double volume = 0.0; // shares, >= 0
    Date origin_date;    // first day this level was acquired; provenance only

    bool operator==(const BookEntry&) const = default;
};

struct AppliedEvent {
    Date date;
    EventKind kind;
    double shares;
    double price; // offering price, or the market price at a cancellation
};

struct RhoValue {
    double rho = 0.0;          // (vdi - vds) / free float, in [-1, +1]
    double vdi_fraction = 0.0; // float fraction acquired strictly below the current price
    double vds_fraction = 0.0; // float fraction acquired strictly above it
};

struct HistogramBin {
    double bin_low = 0.0;
    double fraction = 0.0;

    bool operator==(const HistogramBin&) const = default;
};

// The evolving distribution of still-held volume over acquisition prices.
// Single-writer state machine: one instrument, days applied in order.
//
// Conservation is the structural invariant: sum(entry volumes) + pruned_mass
// stays equal to the free float (1e-9 relative) after every operation.
// Entries whose volume decays below 1e-12 of the float are dropped and their
// mass tracked in pruned_mass, which participates in proportional decay like
// any other holding so the identity cannot drift.
class VolumeBook {
public:
    static constexpr double kPruneRel = 1e-12;         // entry prune threshold vs free float
    static constexpr double kPrunedCapRel = 1e-6;      // allowed pruned_mass / free float
    static constexpr double kConservationRel = 1e-9;

    VolumeBook(const FloatEvent& ipo, BookOptions opts = {});

    // Decays every existing entry by (1 - v_new / free_float) and books the
    // day's volume at the day's average price. Zero-volume days only advance
    // last_date.
    void apply_trading_day(const DailyBar& bar);

    // secondary_offering grows the float and books a new entry at the offer
    // price; cancellation shrinks every holding proportionally and the float
    // by the cancelled shares. current_price is recorded in the event log
    // only (cancellations carry the market price, not a price of their own).
    void apply_float_event(const FloatEvent& event, double current_price);

    // Volume-weighted mean acquisition price: sum(p_i * v_i) / free_float.
    double vwap() const;

    RhoValue rho(double current_price) const;

    // Price level such that at least half the remaining volume was acquired
    // at or below it. Companion statistic to vwap; not used by the index.
    double weighted_median_price() const;

    // Remaining volume bucketed by floor(price / bin_width), as float
    // fractions, ascending by bin_low.
    std::vector<HistogramBin> histogram(double bin_width) const;

    const std::vector<BookEntry>& entries() const { return entries_; }
    double free_float() const { return free_float_; }
    double pruned_mass() const { return pruned_mass_; }
    Date last_date() const { return last_date_; }
    const BookOptions& options() const { return opts_; }
    const std::vector<AppliedEvent>& event_log() const { return event_log_; }

    double volume_sum() const;
    // |sum + pruned_mass - free_float| / free_float
    double conservation_error() const;

private:
    double round_to_tick(double price) const;
    void insert_volume(double rounded_price, double volume, Date origin);
    void decay_all(double factor);
    void check_invariants(const char* where) const;

    std::vector<BookEntry> entries_; // ascending by price
    double free_float_ = 0.0;
    double pruned_mass_ = 0.0;
    Date last_date_;
    BookOptions opts_;
    std::vector<AppliedEvent> event_log_;
};

// Per-day output record of the index run.
struct IndexPoint {
    Date date;
    double price = 0.0; // that day's average price
    double vwap = 0.0;
    double rho = 0.0;
    double vdi_fraction = 0.0;
    double vds_fraction = 0.0;

    bool operator==(const IndexPoint&) const = default;
};

struct RunOutput {
    std::vector<IndexPoint> points;
    VolumeBook book;
};

// Replays a series through the book: seed from the IPO, then per calendar
// day apply offerings, the bar, cancellations, and emit one IndexPoint per
// bar using that day's average price. Bars and events after `cutoff` (when
// given) are ignored.
RunOutput run_instrument(const InstrumentSeries& series, BookOptions opts = {},
                         std::optional<Date> cutoff = std::nullopt);

std::vector<IndexPoint> run_series(const InstrumentSeries& series, BookOptions opts = {});

} // namespace floatbook

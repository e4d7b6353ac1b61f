#pragma once

#include "floatbook/market_data.hpp"

#include <optional>
#include <vector>

// Straight-line reference replay used to cross-check VolumeBook. It keeps
// one lot per acquisition (paired price/volume arrays, appended in order)
// and never merges or prunes, trading speed for an arithmetic path with no
// shared code with the incremental book.
namespace floatbook::oracle {

struct Lot {
    double price = 0.0;
    double volume = 0.0;
};

struct ReplayBook {
    std::vector<Lot> lots;
    double free_float = 0.0;

    double volume_sum() const {
        double s = 0.0;
        for (const auto& lot : lots) s += lot.volume;
        return s;
    }

    double vwap() const {
        double w = 0.0;
        for (const auto& lot : lots) w += lot.price * lot.volume;
        return w / free_float;
    }

    // Strict comparisons against an un-rounded price; tick handling is the
    // implementation's concern, so callers pass tick-rounded prices when
    // comparing against a tick-rounded book.
    double rho(double current_price) const {
        double below = 0.0;
        double above = 0.0;
        for (const auto& lot : lots) {
            if (lot.price < current_price) below += lot.volume;
            if (lot.price > current_price) above += lot.volume;
        }
        return (below - above) / free_float;
    }
};

inline ReplayBook init(double ipo_price, double ipo_shares) {
    return ReplayBook{{Lot{ipo_price, ipo_shares}}, ipo_shares};
}

inline void apply_day(ReplayBook& book, double price, double volume) {
    if (volume <= 0) return;
    const double factor = 1.0 - volume / book.free_float;
    for (auto& lot : book.lots) lot.volume *= factor;
    book.lots.push_back(Lot{price, volume});
}

inline void apply_offering(ReplayBook& book, double price, double shares) {
    book.free_float += shares;
    book.lots.push_back(Lot{price, shares});
}

inline void apply_cancellation(ReplayBook& book, double shares) {
    const double factor = 1.0 - shares / book.free_float;
    for (auto& lot : book.lots) lot.volume *= factor;
    book.free_float -= shares;
}

// Replays a whole series (same day ordering as run_instrument: offerings,
// bar, cancellations), returning the final state.
ReplayBook replay_series(const InstrumentSeries& series,
                         std::optional<Date> cutoff = std::nullopt);

// Aggregates lot volume at one exact price.
double volume_at_price(const ReplayBook& book, double price);

} // namespace floatbook::oracle

#include "floatbook/replay_oracle.hpp"

#include "floatbook/errors.hpp"

namespace floatbook::oracle {

ReplayBook replay_series(const InstrumentSeries& series, std::optional<Date> cutoff) {
    if (series.events.empty() || series.events.front().kind != EventKind::initial_ipo) {
        throw InputError(series.symbol + ": series has no initial_ipo");
    }
    const FloatEvent& ipo = series.events.front();
    ReplayBook book = init(*ipo.price, ipo.shares);

    size_t next_event = 1;
    auto apply_events_until = [&](Date limit, bool inclusive, bool offerings_only) {
        while (next_event < series.events.size()) {
            const FloatEvent& ev = series.events[next_event];
            if (cutoff && ev.date > *cutoff) return;
            if (inclusive ? ev.date > limit : ev.date >= limit) return;
            if (offerings_only && ev.kind != EventKind::secondary_offering) return;
            if (ev.kind == EventKind::secondary_offering) {
                apply_offering(book, *ev.price, ev.shares);
            } else {
                apply_cancellation(book, ev.shares);
            }
            ++next_event;
        }
    };

    for (const auto& bar : series.bars) {
        if (cutoff && bar.date > *cutoff) break;
        apply_events_until(bar.date, false, false);       // events on earlier dates
        apply_events_until(bar.date, true, true);         // today's offerings
        if (bar.volume_shares > 0) {
            if (!bar.avg_price) {
                throw InputError(series.symbol + " " + bar.date.to_string() +
                                 ": traded volume without an average price");
            }
            apply_day(book, *bar.avg_price, bar.volume_shares);
        }
        apply_events_until(bar.date, true, false);        // today's cancellations
    }
    if (cutoff) apply_events_until(Date{999999, 12, 31}, true, false);
    return book;
}

double volume_at_price(const ReplayBook& book, double price) {
    double sum = 0.0;
    for (const auto& lot : book.lots) {
        if (lot.price == price) sum += lot.volume;
    }
    return sum;
}

} // namespace floatbook::oracle

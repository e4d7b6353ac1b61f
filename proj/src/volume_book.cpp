#include "floatbook/volume_book.hpp"

#include "floatbook/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace floatbook {

std::string_view to_string(TurnoverMode mode) {
    return mode == TurnoverMode::error ? "error" : "clamp";
}

TurnoverMode parse_turnover_mode(std::string_view text) {
    if (text == "error") return TurnoverMode::error;
    if (text == "clamp") return TurnoverMode::clamp;
    throw InputError("unknown turnover mode '" + std::string(text) + "' (expected error|clamp)");
}

VolumeBook::VolumeBook(const FloatEvent& ipo, BookOptions opts) : opts_(opts) {
    if (opts_.tick <= 0) throw InputError("tick must be positive");
    if (ipo.kind != EventKind::initial_ipo) {
        throw InputError("book must be initialized from an initial_ipo event, got " +
                         std::string(to_string(ipo.kind)));
    }
    if (ipo.shares <= 0) throw InputError("initial_ipo shares must be positive");
    if (!ipo.price || *ipo.price <= 0) throw InputError("initial_ipo price must be positive");

    free_float_ = ipo.shares;
    last_date_ = ipo.date;
    entries_.push_back(BookEntry{round_to_tick(*ipo.price), ipo.shares, ipo.date});
    event_log_.push_back(AppliedEvent{ipo.date, ipo.kind, ipo.shares, *ipo.price});
    check_invariants("init");
}

double round_price_to_tick(double price, double tick) {
    const double q = price / tick;
    if (!(q > 0) || q >= 9.0e15) {
        throw InputError("price " + std::to_string(price) + " out of range for tick " +
                         std::to_string(tick));
    }
    const long long level = std::llround(q);
    if (level <= 0) {
        throw InputError("price " + std::to_string(price) + " rounds to zero at tick " +
                         std::to_string(tick));
    }
    return static_cast<double>(level) * tick;
}

double VolumeBook::round_to_tick(double price) const {
    return round_price_to_tick(price, opts_.tick);
}

void VolumeBook::insert_volume(double rounded_price, double volume, Date origin) {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), rounded_price,
                               [](const BookEntry& e, double p) { return e.price < p; });
    if (it != entries_.end() && it->price == rounded_price) {
        it->volume += volume; // same tick: merge, keep the first origin
        return;
    }
    entries_.insert(it, BookEntry{rounded_price, volume, origin});
}

void VolumeBook::decay_all(double factor) {
    const double prune_below = kPruneRel * free_float_;
    double newly_pruned = 0.0;
    size_t keep = 0;
    for (size_t i = 0; i < entries_.size(); ++i) {
        const double v = entries_[i].volume * factor;
        if (v < prune_below) {
            newly_pruned += v;
            continue;
        }
        entries_[keep] = entries_[i];
        entries_[keep].volume = v;
        ++keep;
    }
    entries_.resize(keep);
    // the untracked remainder is held by investors too; it sells pro rata
    pruned_mass_ = pruned_mass_ * factor + newly_pruned;
}

void VolumeBook::apply_trading_day(const DailyBar& bar) {
    if (!(bar.date > last_date_)) {
        throw InputError("bar " + bar.date.to_string() + " not after book date " +
                         last_date_.to_string());
    }
    if (bar.volume_shares < 0) {
        throw InputError("bar " + bar.date.to_string() + ": negative volume");
    }
    if (bar.volume_shares == 0) {
        last_date_ = bar.date;
        return;
    }
    if (!bar.avg_price) {
        throw InputError("bar " + bar.date.to_string() + ": traded volume without an average price");
    }

    const double v_new = bar.volume_shares;
    const double price = round_to_tick(*bar.avg_price);
    if (v_new >= free_float_) {
        if (opts_.turnover_mode == TurnoverMode::error) {
            throw InputError("bar " + bar.date.to_string() + ": traded volume " +
                             std::to_string(v_new) + " reaches the free float " +
                             std::to_string(free_float_) +
                             " (decay factor would not be positive)");
        }
        // full turnover: everything still outstanding changes hands today
        entries_.clear();
        entries_.push_back(BookEntry{price, free_float_ - pruned_mass_, bar.date});
        last_date_ = bar.date;
        check_invariants("clamp day");
        return;
    }

    decay_all(1.0 - v_new / free_float_);
    insert_volume(price, v_new, bar.date);
    last_date_ = bar.date;
    check_invariants("trading day");
}

void VolumeBook::apply_float_event(const FloatEvent& event, double current_price) {
    switch (event.kind) {
        case EventKind::initial_ipo:
            throw InputError("initial_ipo cannot be applied to a live book");
        case EventKind::secondary_offering: {
            if (event.shares <= 0) throw InputError("offering shares must be positive");
            if (!event.price || *event.price <= 0) {
                throw InputError("offering on " + event.date.to_string() + " has no price");
            }
            free_float_ += event.shares;
            insert_volume(round_to_tick(*event.price), event.shares, event.date);
            event_log_.push_back(
                AppliedEvent{event.date, event.kind, event.shares, *event.price});
            break;
        }
        case EventKind::cancellation: {
            if (event.shares <= 0) throw InputError("cancellation shares must be positive");
            if (event.shares >= free_float_) {
                throw InputError("cancellation of " + std::to_string(event.shares) +
                                 " shares on " + event.date.to_string() +
                                 " would empty the free float (" + std::to_string(free_float_) +
                                 ")");
            }
            // repurchased shares leave circulation: no new entry
            decay_all(1.0 - event.shares / free_float_);
            free_float_ -= event.shares;
            event_log_.push_back(
                AppliedEvent{event.date, event.kind, event.shares, current_price});
            break;
        }
    }
    check_invariants("float event");
}

double VolumeBook::volume_sum() const {
    double sum = 0.0;
    for (const auto& e : entries_) sum += e.volume;
    return sum;
}

double VolumeBook::conservation_error() const {
    return std::abs(volume_sum() + pruned_mass_ - free_float_) / free_float_;
}

void VolumeBook::check_invariants(const char* where) const {
    if (!(free_float_ > 0)) {
        throw InvariantError(std::string("free float not positive after ") + where);
    }
    if (conservation_error() > kConservationRel) {
        throw InvariantError(std::string("volume conservation violated after ") + where + " on " +
                             last_date_.to_string());
    }
    if (pruned_mass_ / free_float_ > kPrunedCapRel) {
        throw InvariantError(std::string("pruned mass exceeds its bound after ") + where + " on " +
                             last_date_.to_string());
    }
}

double VolumeBook::vwap() const {
    if (entries_.empty()) throw InputError("vwap of an empty book");
    double weighted = 0.0;
    for (const auto& e : entries_) weighted += e.price * e.volume;
    return weighted / free_float_;
}

RhoValue VolumeBook::rho(double current_price) const {
    if (entries_.empty()) throw InputError("rho of an empty book");
    if (!(current_price > 0)) throw InputError("rho requires a positive current price");

    const double at_price = round_to_tick(current_price);
    double vdi = 0.0;
    double vds = 0.0;
    for (const auto& e : entries_) {
        if (e.price < at_price) {
            vdi += e.volume;
        } else if (e.price > at_price) {
            vds += e.volume;
        }
        // volume exactly at the current price counts in neither sum
    }

    RhoValue r;
    r.vdi_fraction = vdi / free_float_;
    r.vds_fraction = vds / free_float_;
    const double total = r.vdi_fraction + r.vds_fraction;
    if (total > 1.0) { // float-rounding headroom; keeps rho inside [-1, +1]
        r.vdi_fraction /= total;
        r.vds_fraction /= total;
    }
    r.rho = r.vdi_fraction - r.vds_fraction;
    return r;
}

double VolumeBook::weighted_median_price() const {
    if (entries_.empty()) throw InputError("weighted median of an empty book");
    const double half = volume_sum() / 2.0;
    double cum = 0.0;
    for (const auto& e : entries_) {
        cum += e.volume;
        if (cum >= half) return e.price;
    }
    return entries_.back().price;
}

std::vector<HistogramBin> VolumeBook::histogram(double bin_width) const {
    if (!(bin_width > 0)) throw InputError("bin width must be positive");

    std::map<long long, double> bins;
    for (const auto& e : entries_) {
        const double q = e.price / bin_width;
        const double snapped = std::nearbyint(q);
        // prices sitting on a bin boundary (up to float noise) open that bin
        const long long idx = (std::abs(q - snapped) <= 1e-9 * std::max(1.0, std::abs(q)))
                                  ? static_cast<long long>(snapped)
                                  : static_cast<long long>(std::floor(q));
        bins[idx] += e.volume;
    }

    std::vector<HistogramBin> out;
    out.reserve(bins.size());
    for (const auto& [idx, volume] : bins) {
        out.push_back(HistogramBin{static_cast<double>(idx) * bin_width, volume / free_float_});
    }
    return out;
}

namespace {

// Offerings trade the same day they are issued, so they land before the
// bar; cancellations land after it.
struct DayEvents {
    std::vector<const FloatEvent*> offerings;
    std::vector<const FloatEvent*> cancellations;
};

DayEvents collect_day(const std::vector<FloatEvent>& events, size_t& next, Date date) {
    DayEvents day;
    while (next < events.size() && events[next].date == date) {
        if (events[next].kind == EventKind::secondary_offering) {
            day.offerings.push_back(&events[next]);
        } else {
            day.cancellations.push_back(&events[next]);
        }
        ++next;
    }
    return day;
}

} // namespace

RunOutput run_instrument(const InstrumentSeries& series, BookOptions opts,
                         std::optional<Date> cutoff) {
    if (series.events.empty() || series.events.front().kind != EventKind::initial_ipo) {
        throw InputError(series.symbol + ": series has no initial_ipo");
    }
    if (series.bars.empty()) throw InputError(series.symbol + ": series has no bars");

    VolumeBook book(series.events.front(), opts);
    double last_price = *series.events.front().price;

    std::vector<IndexPoint> points;
    points.reserve(series.bars.size());
    size_t next_event = 1;

    auto apply_day_events = [&](const DayEvents& day, double current_price) {
        for (const auto* ev : day.offerings) book.apply_float_event(*ev, current_price);
        for (const auto* ev : day.cancellations) book.apply_float_event(*ev, current_price);
    };

    for (const auto& bar : series.bars) {
        if (cutoff && bar.date > *cutoff) break;

        // events on non-trading days between the previous bar and this one
        while (next_event < series.events.size() && series.events[next_event].date < bar.date) {
            const Date d = series.events[next_event].date;
            apply_day_events(collect_day(series.events, next_event, d), last_price);
        }

        DayEvents today = collect_day(series.events, next_event, bar.date);
        for (const auto* ev : today.offerings) book.apply_float_event(*ev, last_price);

        // a zero-volume bar may carry no price; the last traded price stands in
        const double day_price = bar.avg_price ? *bar.avg_price : last_price;
        try {
            book.apply_trading_day(bar);
            for (const auto* ev : today.cancellations) book.apply_float_event(*ev, day_price);

            const RhoValue r = book.rho(day_price);
            points.push_back(
                IndexPoint{bar.date, day_price, book.vwap(), r.rho, r.vdi_fraction, r.vds_fraction});
        } catch (const InputError& e) {
            throw InputError(series.symbol + " " + bar.date.to_string() + ": " + e.what());
        }
        last_price = day_price;
    }

    // trailing events at or before the cutoff (non-trading dates)
    while (next_event < series.events.size() &&
           (!cutoff || series.events[next_event].date <= *cutoff)) {
        const Date d = series.events[next_event].date;
        apply_day_events(collect_day(series.events, next_event, d), last_price);
    }

    return RunOutput{std::move(points), std::move(book)};
}

std::vector<IndexPoint> run_series(const InstrumentSeries& series, BookOptions opts) {
    return run_instrument(series, opts).points;
}

} // namespace floatbook

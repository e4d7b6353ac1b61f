#include "floatbook/commands.hpp"

#include "floatbook/errors.hpp"
#include "floatbook/replay_oracle.hpp"
#include "floatbook/report.hpp"

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace floatbook {

namespace fs = std::filesystem;

RunConfig load_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("config file " + path.string() + ": " + e.what());
    }

    RunConfig config;
    try {
        if (doc.contains("bars")) config.bars_path = doc["bars"].get<std::string>();
        if (doc.contains("events")) config.events_path = doc["events"].get<std::string>();
        if (doc.contains("symbol")) config.symbol = doc["symbol"].get<std::string>();
        if (doc.contains("tick")) config.tick = doc["tick"].get<double>();
        if (doc.contains("bin_width")) config.bin_width = doc["bin_width"].get<double>();
        if (doc.contains("avg_price_mode")) {
            config.avg_price_mode = parse_avg_price_mode(doc["avg_price_mode"].get<std::string>());
        }
        if (doc.contains("turnover_mode")) {
            config.turnover_mode = parse_turnover_mode(doc["turnover_mode"].get<std::string>());
        }
        if (doc.contains("grid")) config.grid_thetas = doc["grid"].get<std::vector<double>>();
        if (doc.contains("out")) config.output_dir = doc["out"].get<std::string>();
        if (doc.contains("parallel")) config.parallel = doc["parallel"].get<bool>();
    } catch (const nlohmann::json::exception& e) {
        throw InputError("config file " + path.string() + ": " + e.what());
    }
    return config;
}

void validate_config(const RunConfig& config) {
    if (config.bars_path.empty()) throw InputError("no bars file given");
    if (config.events_path.empty()) throw InputError("no events file given");
    if (config.symbol.empty()) throw InputError("no symbol given");
    if (!(config.tick > 0)) throw InputError("tick must be positive");
    if (config.bin_width && !(*config.bin_width > 0)) {
        throw InputError("bin width must be positive");
    }
    for (size_t i = 0; i < config.grid_thetas.size(); ++i) {
        const double theta = config.grid_thetas[i];
        if (!(theta > 0 && theta < 1)) {
            throw InputError("grid theta " + std::to_string(theta) + " outside (0, 1)");
        }
        if (i > 0 && !(config.grid_thetas[i - 1] < theta)) {
            throw InputError("grid thetas must be strictly increasing");
        }
    }
}

double effective_bin_width(const RunConfig& config) {
    return config.bin_width ? *config.bin_width : config.tick;
}

std::vector<AgentParams> effective_grid(const RunConfig& config) {
    if (config.grid_thetas.empty()) return default_agent_grid();
    std::vector<AgentParams> grid;
    grid.reserve(config.grid_thetas.size());
    for (double theta : config.grid_thetas) grid.push_back(AgentParams{theta});
    return grid;
}

namespace {

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path.string());
    return in;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary); // LF line endings everywhere
    if (!out) throw InputError("cannot write " + path.string());
    return out;
}

BookOptions book_options(const RunConfig& config) {
    return BookOptions{config.tick, config.turnover_mode};
}

} // namespace

InstrumentSeries load_series(const RunConfig& config) {
    validate_config(config);
    auto bars_in = open_input(config.bars_path);
    auto bars = parse_bars(bars_in, config.bars_path.string());
    bars = derive_series_prices(std::move(bars), config.avg_price_mode);
    auto events_in = open_input(config.events_path);
    auto events = parse_events(events_in, config.events_path.string());
    return assemble_series(std::move(bars), std::move(events), config.symbol);
}

fs::path cmd_run(const RunConfig& config) {
    const InstrumentSeries series = load_series(config);
    const auto points = run_series(series, book_options(config));

    fs::create_directories(config.output_dir);
    const fs::path out_path = config.output_dir / (config.symbol + "_index.csv");
    auto out = open_output(out_path);
    report::write_index_csv(out, points);
    return out_path;
}

fs::path cmd_histogram(const RunConfig& config, const Date& as_of) {
    const InstrumentSeries series = load_series(config);
    if (as_of < series.bars.front().date || as_of > series.bars.back().date) {
        throw InputError("as-of date " + as_of.to_string() + " outside the series range [" +
                         series.bars.front().date.to_string() + ", " +
                         series.bars.back().date.to_string() + "]");
    }
    const RunOutput output = run_instrument(series, book_options(config), as_of);
    const auto bins = output.book.histogram(effective_bin_width(config));

    fs::create_directories(config.output_dir);
    const fs::path out_path =
        config.output_dir / (config.symbol + "_hist_" + as_of.to_string() + ".csv");
    auto out = open_output(out_path);
    report::write_histogram_csv(out, bins);
    return out_path;
}

BacktestPaths cmd_backtest(const RunConfig& config) {
    const InstrumentSeries series = load_series(config);
    const auto points = run_series(series, book_options(config));
    const auto grid = effective_grid(config);
    const auto results = run_backtest(points, grid);
    const auto rows = summarize(results);

    fs::create_directories(config.output_dir);
    BacktestPaths paths{config.output_dir / (config.symbol + "_agents.csv"),
                        config.output_dir / (config.symbol + "_trades.json")};
    {
        auto out = open_output(paths.agents_csv);
        report::write_agents_csv(out, rows);
    }
    {
        auto out = open_output(paths.trades_json);
        report::write_trades_json(out, config.symbol, results);
    }
    return paths;
}

namespace {

struct CheckOutcome {
    bool ok = true;
    std::string detail;

    void fail(std::string message) {
        if (ok) {
            ok = false;
            detail = std::move(message);
        }
    }
};

void print_check(std::ostream& out, const std::string& name, const CheckOutcome& outcome) {
    out << (outcome.ok ? "PASS" : "FAIL") << "  " << name;
    if (!outcome.ok) out << ": " << outcome.detail;
    out << '\n';
}

// Day-by-day replay that runs every invariant check the type contracts
// promise, against both the incremental book and the lot-level oracle.
int run_invariant_suite(const InstrumentSeries& series, const RunConfig& config,
                        std::ostream& out) {
    CheckOutcome conservation;
    CheckOutcome pruned_bound;
    CheckOutcome rho_bounds;
    CheckOutcome vwap_bounds;
    CheckOutcome oracle_agreement;

    // oracle prices live on the same tick grid as the book's
    InstrumentSeries rounded = series;
    for (auto& bar : rounded.bars) {
        if (bar.avg_price) bar.avg_price = round_price_to_tick(*bar.avg_price, config.tick);
    }
    for (auto& ev : rounded.events) {
        if (ev.price) ev.price = round_price_to_tick(*ev.price, config.tick);
    }

    VolumeBook book(series.events.front(), book_options(config));
    oracle::ReplayBook replay =
        oracle::init(*rounded.events.front().price, rounded.events.front().shares);

    size_t next_event = 1;
    double last_price = *series.events.front().price;

    auto apply_event = [&](const FloatEvent& ev, const FloatEvent& ev_rounded,
                           double current_price) {
        book.apply_float_event(ev, current_price);
        if (ev.kind == EventKind::secondary_offering) {
            oracle::apply_offering(replay, *ev_rounded.price, ev_rounded.shares);
        } else {
            oracle::apply_cancellation(replay, ev_rounded.shares);
        }
    };

    auto daily_checks = [&](Date date, double day_price) {
        const double err = book.conservation_error();
        if (err > VolumeBook::kConservationRel) {
            conservation.fail("relative error " + std::to_string(err) + " on " + date.to_string());
        }
        if (book.pruned_mass() / book.free_float() > VolumeBook::kPrunedCapRel) {
            pruned_bound.fail("pruned fraction " +
                              std::to_string(book.pruned_mass() / book.free_float()) + " on " +
                              date.to_string());
        }
        const RhoValue r = book.rho(day_price);
        if (!(r.rho >= -1.0 && r.rho <= 1.0) ||
            !(r.vdi_fraction + r.vds_fraction <= 1.0 + 1e-12) ||
            std::abs(r.rho - (r.vdi_fraction - r.vds_fraction)) > 1e-12) {
            rho_bounds.fail("rho " + std::to_string(r.rho) + " on " + date.to_string());
        }
        const double vwap = book.vwap();
        const double lo = book.entries().front().price;
        const double hi = book.entries().back().price;
        if (vwap < lo * (1.0 - 1e-9) || vwap > hi * (1.0 + 1e-9)) {
            vwap_bounds.fail("vwap " + std::to_string(vwap) + " outside [" + std::to_string(lo) +
                             ", " + std::to_string(hi) + "] on " + date.to_string());
        }
        const double oracle_vwap = replay.vwap();
        const double oracle_rho = replay.rho(round_price_to_tick(day_price, config.tick));
        const double float_gap =
            std::abs(replay.free_float - book.free_float()) / book.free_float();
        if (std::abs(oracle_vwap - vwap) > 1e-6 * std::max(1.0, std::abs(oracle_vwap)) ||
            std::abs(oracle_rho - r.rho) > 1e-6 || float_gap > 1e-12) {
            oracle_agreement.fail("book and replay disagree on " + date.to_string());
        }
    };

    for (size_t bi = 0; bi < series.bars.size(); ++bi) {
        const DailyBar& bar = series.bars[bi];
        while (next_event < series.events.size() && series.events[next_event].date < bar.date) {
            apply_event(series.events[next_event], rounded.events[next_event], last_price);
            ++next_event;
        }
        while (next_event < series.events.size() && series.events[next_event].date == bar.date &&
               series.events[next_event].kind == EventKind::secondary_offering) {
            apply_event(series.events[next_event], rounded.events[next_event], last_price);
            ++next_event;
        }

        const double day_price = bar.avg_price ? *bar.avg_price : last_price;
        book.apply_trading_day(bar);
        if (bar.volume_shares > 0) {
            oracle::apply_day(replay, *rounded.bars[bi].avg_price, bar.volume_shares);
        }
        while (next_event < series.events.size() && series.events[next_event].date == bar.date) {
            apply_event(series.events[next_event], rounded.events[next_event], day_price);
            ++next_event;
        }

        daily_checks(bar.date, day_price);
        last_price = day_price;
    }

    print_check(out, "conservation: sum(volumes) + pruned_mass == free_float (1e-9 rel)",
                conservation);
    print_check(out, "pruned mass stays below 1e-6 of the free float", pruned_bound);
    print_check(out, "rho in [-1, +1], fractions consistent", rho_bounds);
    print_check(out, "vwap within [min, max] entry price", vwap_bounds);
    print_check(out, "lot-level replay oracle agrees with the book", oracle_agreement);

    const bool all_ok = conservation.ok && pruned_bound.ok && rho_bounds.ok && vwap_bounds.ok &&
                        oracle_agreement.ok;
    return all_ok ? 0 : 2;
}

} // namespace

int cmd_validate(const RunConfig& config, std::ostream& out) {
    InstrumentSeries series;
    try {
        series = load_series(config);
    } catch (const InputError& e) {
        out << "FAIL  ingestion: " << e.what() << '\n';
        return 1;
    }
    out << "PASS  ingestion: bars, events and assembly valid\n";

    try {
        return run_invariant_suite(series, config, out);
    } catch (const InputError& e) {
        // data drove the book into a rejected state (e.g. turnover cap)
        out << "FAIL  replay: " << e.what() << '\n';
        return 1;
    } catch (const InvariantError& e) {
        out << "FAIL  invariant: " << e.what() << '\n';
        return 2;
    }
}

} // namespace floatbook

#pragma once

#include "floatbook/backtest.hpp"
#include "floatbook/market_data.hpp"
#include "floatbook/volume_book.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace floatbook {

struct RunConfig {
    std::filesystem::path bars_path;
    std::filesystem::path events_path;
    std::string symbol;
    double tick = 0.01;
    std::optional<double> bin_width; // defaults to tick
    AvgPriceMode avg_price_mode = AvgPriceMode::auto_priority;
    TurnoverMode turnover_mode = TurnoverMode::error;
    std::vector<double> grid_thetas; // empty -> default_agent_grid
    std::filesystem::path output_dir = ".";
    bool parallel = false; // accepted for multi-instrument drivers; a single
                           // instrument has nothing to run concurrently
};

// JSON config file with the same keys as the CLI flags.
RunConfig load_config_file(const std::filesystem::path& path);
void validate_config(const RunConfig& config);

double effective_bin_width(const RunConfig& config);
std::vector<AgentParams> effective_grid(const RunConfig& config);

// parse bars -> derive prices -> parse events -> assemble.
InstrumentSeries load_series(const RunConfig& config);

// Writes <symbol>_index.csv; returns its path.
std::filesystem::path cmd_run(const RunConfig& config);

// Writes <symbol>_hist_<as_of>.csv for the book state at as_of.
std::filesystem::path cmd_histogram(const RunConfig& config, const Date& as_of);

struct BacktestPaths {
    std::filesystem::path agents_csv;
    std::filesystem::path trades_json;
};

// Writes <symbol>_agents.csv and <symbol>_trades.json.
BacktestPaths cmd_backtest(const RunConfig& config);

// Runs ingestion plus the invariant suite (conservation, pruning bound,
// index bounds, vwap bounds, replay-oracle agreement) without writing
// result files; prints one pass/fail line per check.
// Returns 0 when everything passes, 1 on input errors, 2 on invariant
// failures.
int cmd_validate(const RunConfig& config, std::ostream& out);

} // namespace floatbook

#include "floatbook/commands.hpp"
#include "floatbook/errors.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <string>

namespace {

using floatbook::RunConfig;

struct CliFlags {
    std::string bars, events, symbol, avg_mode, turnover, out_dir, config_path, as_of;
    double tick = 0.0;
    double bin_width = 0.0;
    bool parallel = false;
};

// Common options shared by every subcommand. Flags override config-file
// values, which override defaults.
void add_common_options(CLI::App* cmd, CliFlags& flags) {
    cmd->add_option("--bars", flags.bars, "Daily bars CSV");
    cmd->add_option("--events", flags.events, "Float events CSV");
    cmd->add_option("--symbol", flags.symbol, "Instrument symbol");
    cmd->add_option("--tick", flags.tick, "Price tick for book merging (default 0.01)");
    cmd->add_option("--bin-width", flags.bin_width, "Histogram bin width (default: tick)");
    cmd->add_option("--avg-price-mode", flags.avg_mode,
                    "auto|explicit|currency_over_shares|high_low_mid");
    cmd->add_option("--turnover-mode", flags.turnover, "error|clamp");
    cmd->add_option("--out", flags.out_dir, "Output directory (default .)");
    cmd->add_option("--config", flags.config_path, "JSON config file; flags override it");
    cmd->add_flag("--parallel", flags.parallel,
                  "Process independent instruments concurrently (single-instrument runs are "
                  "unaffected)");
}

RunConfig build_config(const CLI::App* cmd, const CliFlags& flags) {
    RunConfig config;
    if (cmd->count("--config") > 0) config = floatbook::load_config_file(flags.config_path);
    if (cmd->count("--bars") > 0) config.bars_path = flags.bars;
    if (cmd->count("--events") > 0) config.events_path = flags.events;
    if (cmd->count("--symbol") > 0) config.symbol = flags.symbol;
    if (cmd->count("--tick") > 0) config.tick = flags.tick;
    if (cmd->count("--bin-width") > 0) config.bin_width = flags.bin_width;
    if (cmd->count("--avg-price-mode") > 0) {
        config.avg_price_mode = floatbook::parse_avg_price_mode(flags.avg_mode);
    }
    if (cmd->count("--turnover-mode") > 0) {
        config.turnover_mode = floatbook::parse_turnover_mode(flags.turnover);
    }
    if (cmd->count("--out") > 0) config.output_dir = flags.out_dir;
    if (cmd->count("--parallel") > 0) config.parallel = flags.parallel;
    return config;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"floatbook: volume-weighted historical price book, index and agent backtest"};
    app.require_subcommand(1);

    CliFlags flags;
    CLI::App* cmd_run = app.add_subcommand("run", "Compute the daily index series CSV");
    CLI::App* cmd_hist =
        app.add_subcommand("histogram", "Remaining-volume histogram of the book at a date");
    CLI::App* cmd_backtest =
        app.add_subcommand("backtest", "Run the threshold-agent grid over the index series");
    CLI::App* cmd_validate =
        app.add_subcommand("validate", "Check inputs and model invariants without writing results");

    for (CLI::App* cmd : {cmd_run, cmd_hist, cmd_backtest, cmd_validate}) {
        add_common_options(cmd, flags);
    }
    cmd_hist->add_option("--as-of", flags.as_of, "Book snapshot date (YYYY-MM-DD)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        CLI::App* active = app.get_subcommands().front();
        const RunConfig config = build_config(active, flags);
        if (active == cmd_run) {
            const auto path = floatbook::cmd_run(config);
            std::cout << "wrote " << path.string() << '\n';
        } else if (active == cmd_hist) {
            const auto as_of = floatbook::Date::parse(flags.as_of);
            const auto path = floatbook::cmd_histogram(config, as_of);
            std::cout << "wrote " << path.string() << '\n';
        } else if (active == cmd_backtest) {
            const auto paths = floatbook::cmd_backtest(config);
            std::cout << "wrote " << paths.agents_csv.string() << '\n';
            std::cout << "wrote " << paths.trades_json.string() << '\n';
        } else {
            return floatbook::cmd_validate(config, std::cout);
        }
    } catch (const floatbook::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const floatbook::InvariantError& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}

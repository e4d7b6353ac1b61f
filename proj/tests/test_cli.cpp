#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "floatbook/commands.hpp"
#include "floatbook/errors.hpp"
#include "floatbook/report.hpp"

#include "support/series_gen.hpp"

#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace floatbook;
namespace fs = std::filesystem;

namespace {

struct Fixture {
    fs::path dir;
    RunConfig config;

    explicit Fixture(const std::string& name, const InstrumentSeries& series) {
        dir = fs::temp_directory_path() / ("floatbook_test_" + name);
        fs::remove_all(dir);
        fs::create_directories(dir);

        config.bars_path = dir / "bars.csv";
        config.events_path = dir / "events.csv";
        config.symbol = series.symbol;
        config.output_dir = dir / "out";

        std::ofstream bars(config.bars_path);
        write_bars_csv(bars, series.bars);
        std::ofstream events(config.events_path);
        write_events_csv(events, series.events);
    }

    ~Fixture() { fs::remove_all(dir); }
};

InstrumentSeries small_series() {
    InstrumentSeries series;
    series.symbol = "TST";
    const Date ipo_day{2007, 4, 1};
    series.events.push_back(testgen::ipo(ipo_day, 1000, 10.00));
    series.bars.push_back(testgen::bar(ipo_day.plus_days(1), 12.00, 200));
    series.bars.push_back(testgen::bar(ipo_day.plus_days(2), 11.00, 100));
    return series;
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("cmd_run writes the index series for a two-day input") {
    Fixture fx("run", small_series());
    const fs::path out = cmd_run(fx.config);
    CHECK(out.filename() == "TST_index.csv");

    std::ifstream in(out);
    const auto points = report::read_index_csv(in, "out");
    REQUIRE(points.size() == 2);
    CHECK(points[0].rho == 0.8);
    CHECK(points[0].vwap == 10.4);
    CHECK(points[1].price == 11.0);
    // [(10,720),(12,180),(11,100)] at price 11: rho = (720 - 180)/1000
    CHECK(points[1].rho == 0.54);
    CHECK(points[1].vwap == 10.46);
}

TEST_CASE("cmd_run is deterministic and reports missing inputs") {
    Fixture fx("run_det", small_series());
    const fs::path out = cmd_run(fx.config);
    const std::string first = slurp(out);
    cmd_run(fx.config);
    CHECK(slurp(out) == first);

    RunConfig broken = fx.config;
    broken.bars_path = fx.dir / "nope.csv";
    CHECK_THROWS_WITH_AS((void)cmd_run(broken), doctest::Contains("nope.csv"), InputError);
}

TEST_CASE("cmd_histogram snapshots the book at a date") {
    Fixture fx("hist", small_series());
    fx.config.bin_width = 1.0;
    const Date as_of{2007, 4, 2};
    const fs::path out = cmd_histogram(fx.config, as_of);
    CHECK(out.filename() == "TST_hist_2007-04-02.csv");

    std::ifstream in(out);
    const auto bins = report::read_histogram_csv(in, "hist");
    REQUIRE(bins.size() == 2); // book was [(10,800),(12,200)]
    CHECK(bins[0] == HistogramBin{10.0, 0.8});
    CHECK(bins[1] == HistogramBin{12.0, 0.2});

    double total = 0.0;
    for (const auto& b : bins) total += b.fraction;
    CHECK(total >= 1.0 - 1e-6);
    CHECK(total <= 1.0 + 1e-12);

    CHECK_THROWS_WITH_AS((void)cmd_histogram(fx.config, Date{2006, 1, 1}),
                         doctest::Contains("outside the series range"), InputError);
    CHECK_THROWS_WITH_AS((void)cmd_histogram(fx.config, Date{2013, 1, 1}),
                         doctest::Contains("outside the series range"), InputError);
}

TEST_CASE("cmd_histogram at the last date snapshots the final book") {
    Fixture fx("hist_last", small_series());
    fx.config.bin_width = 1.0;
    const fs::path out = cmd_histogram(fx.config, Date{2007, 4, 3});
    std::ifstream in(out);
    const auto bins = report::read_histogram_csv(in, "hist");
    REQUIRE(bins.size() == 3); // final book: [(10,720),(11,100),(12,180)]
    CHECK(bins[0] == HistogramBin{10.0, 0.72});
    CHECK(bins[1] == HistogramBin{11.0, 0.1});
    CHECK(bins[2] == HistogramBin{12.0, 0.18});
}

TEST_CASE("cmd_histogram of a single-entry book is one full bin") {
    InstrumentSeries series;
    series.symbol = "ONE";
    series.events.push_back(testgen::ipo(Date{2007, 4, 1}, 1000, 10.00));
    series.bars.push_back(testgen::bar(Date{2007, 4, 2}, 10.00, 100));
    Fixture fx("hist_one", series);
    const fs::path out = cmd_histogram(fx.config, Date{2007, 4, 2});
    std::ifstream in(out);
    const auto bins = report::read_histogram_csv(in, "hist");
    REQUIRE(bins.size() == 1);
    CHECK(bins[0].fraction == 1.0);
}

TEST_CASE("cmd_backtest writes the agents table and the trade log") {
    std::mt19937_64 rng(5);
    testgen::SeriesParams params;
    params.n_days = 150;
    Fixture fx("bt", testgen::random_series(rng, params));
    fx.config.symbol = "SYN";

    const BacktestPaths paths = cmd_backtest(fx.config);
    std::ifstream agents_in(paths.agents_csv);
    const auto rows = report::read_agents_csv(agents_in, "agents");
    REQUIRE(rows.size() == 39); // default grid
    CHECK(rows.front().theta == 0.025);
    CHECK(rows.back().theta == 0.975);

    std::ifstream trades_in(paths.trades_json);
    const auto results = report::read_trades_json(trades_in, "trades");
    REQUIRE(results.size() == 39);
    for (size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].n_operations == results[i].n_operations);
    }

    // rerun: byte-identical outputs
    const std::string agents_bytes = slurp(paths.agents_csv);
    const std::string trades_bytes = slurp(paths.trades_json);
    cmd_backtest(fx.config);
    CHECK(slurp(paths.agents_csv) == agents_bytes);
    CHECK(slurp(paths.trades_json) == trades_bytes);
}

TEST_CASE("cmd_backtest on a rising market leaves high-theta agents inactive") {
    // the index never drops below about -0.3, so wide agents never buy
    InstrumentSeries series;
    series.symbol = "UP";
    const Date ipo_day{2007, 4, 1};
    series.events.push_back(testgen::ipo(ipo_day, 100000, 10.00));
    double price = 10.0;
    for (int i = 1; i <= 120; ++i) {
        price *= 1.01;
        series.bars.push_back(testgen::bar(ipo_day.plus_days(i), price, 100000 * 0.35));
    }
    Fixture fx("bt_up", series);
    const BacktestPaths paths = cmd_backtest(fx.config);

    std::ifstream trades_in(paths.trades_json);
    const auto results = report::read_trades_json(trades_in, "trades");
    CHECK(results.back().theta == 0.975);
    CHECK(results.back().trades.empty());
}

TEST_CASE("cmd_validate passes clean inputs and fails doctored ones") {
    std::mt19937_64 rng(9);
    testgen::SeriesParams params;
    params.n_days = 200;
    Fixture fx("val", testgen::random_series(rng, params));
    fx.config.symbol = "SYN";

    std::ostringstream out;
    CHECK(cmd_validate(fx.config, out) == 0);
    CHECK(out.str().find("PASS  ingestion") != std::string::npos);
    CHECK(out.str().find("conservation") != std::string::npos);
    CHECK(out.str().find("FAIL") == std::string::npos);

    SUBCASE("volume above the float fails with the date named") {
        // overwrite one bar with volume far beyond the float
        auto doctored = testgen::random_series(rng, params);
        doctored.bars[50].volume_shares = 1e12;
        Fixture fx2("val_turnover", doctored);
        fx2.config.symbol = "SYN";
        std::ostringstream out2;
        CHECK(cmd_validate(fx2.config, out2) == 1);
        CHECK(out2.str().find("FAIL") != std::string::npos);
        CHECK(out2.str().find(doctored.bars[50].date.to_string()) != std::string::npos);
    }

    SUBCASE("IPO after the first bar fails ingestion") {
        auto doctored = small_series();
        doctored.events[0].date = doctored.bars[1].date;
        Fixture fx3("val_ipo", doctored);
        fx3.config.symbol = "TST";
        std::ostringstream out3;
        CHECK(cmd_validate(fx3.config, out3) == 1);
        CHECK(out3.str().find("must precede the first bar") != std::string::npos);
    }
}

TEST_CASE("config file provides defaults, flags override") {
    Fixture fx("cfg", small_series());
    const fs::path cfg_path = fx.dir / "run.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << "{\n"
            << "  \"bars\": \"" << fx.config.bars_path.string() << "\",\n"
            << "  \"events\": \"" << fx.config.events_path.string() << "\",\n"
            << "  \"symbol\": \"TST\",\n"
            << "  \"tick\": 0.05,\n"
            << "  \"grid\": [0.1, 0.5, 0.9],\n"
            << "  \"out\": \"" << (fx.dir / "out").string() << "\"\n"
            << "}\n";
    }
    RunConfig config = load_config_file(cfg_path);
    CHECK(config.tick == 0.05);
    CHECK(config.symbol == "TST");
    REQUIRE(config.grid_thetas.size() == 3);
    CHECK(effective_grid(config).size() == 3);
    validate_config(config);

    RunConfig defaulted;
    defaulted.bars_path = fx.config.bars_path;
    defaulted.events_path = fx.config.events_path;
    defaulted.symbol = "TST";
    CHECK(effective_grid(defaulted).size() == 39);
    CHECK(effective_bin_width(defaulted) == defaulted.tick);

    RunConfig bad = config;
    bad.grid_thetas = {0.5, 0.2};
    CHECK_THROWS_WITH_AS(validate_config(bad), doctest::Contains("strictly increasing"),
                         InputError);
    bad.grid_thetas = {0.0};
    CHECK_THROWS_AS(validate_config(bad), InputError);
    bad.grid_thetas.clear();
    bad.tick = -1.0;
    CHECK_THROWS_AS(validate_config(bad), InputError);
}

TEST_CASE("the installed binary honors exit codes and is byte-deterministic") {
    Fixture fx("exe", small_series());
    const std::string exe = FLOATBOOK_CLI_PATH;
    const std::string base = " --bars " + fx.config.bars_path.string() + " --events " +
                             fx.config.events_path.string() + " --symbol TST";
    const fs::path out1 = fx.dir / "o1";
    const fs::path out2 = fx.dir / "o2";

    auto run = [&](const std::string& args) {
        const std::string cmd = exe + " " + args + " > /dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };

    CHECK(run("run" + base + " --out " + out1.string()) == 0);
    CHECK(run("run" + base + " --out " + out2.string()) == 0);
    CHECK(slurp(out1 / "TST_index.csv") == slurp(out2 / "TST_index.csv"));
    CHECK(!slurp(out1 / "TST_index.csv").empty());

    CHECK(run("backtest" + base + " --out " + out1.string()) == 0);
    CHECK(run("backtest" + base + " --out " + out2.string()) == 0);
    CHECK(slurp(out1 / "TST_agents.csv") == slurp(out2 / "TST_agents.csv"));
    CHECK(slurp(out1 / "TST_trades.json") == slurp(out2 / "TST_trades.json"));

    CHECK(run("histogram" + base + " --as-of 2007-04-02 --out " + out1.string()) == 0);
    CHECK(run("validate" + base) == 0);

    // input errors exit with 1
    CHECK(run("run --bars missing.csv --events missing.csv --symbol X") == 1);
    CHECK(run("histogram" + base + " --as-of 1999-01-01") == 1);
    // usage errors from the parser are nonzero too
    CHECK(run("frobnicate") != 0);
}

TEST_CASE("flags override config-file values") {
    Fixture fx("override", small_series());
    const fs::path cfg_path = fx.dir / "cfg.json";
    {
        std::ofstream cfg(cfg_path);
        cfg << "{\"bars\": \"" << fx.config.bars_path.string() << "\", \"events\": \""
            << fx.config.events_path.string()
            << "\", \"symbol\": \"WRONG\", \"out\": \"" << (fx.dir / "cfg_out").string()
            << "\"}\n";
    }
    const std::string exe = FLOATBOOK_CLI_PATH;
    const std::string cmd = exe + " run --config " + cfg_path.string() +
                            " --symbol TST > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    // the overriding --symbol names the output; the config's out dir is kept
    CHECK(fs::exists(fx.dir / "cfg_out" / "TST_index.csv"));
    CHECK(!fs::exists(fx.dir / "cfg_out" / "WRONG_index.csv"));
}

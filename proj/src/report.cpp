#include "floatbook/report.hpp"

#include "floatbook/csv.hpp"
#include "floatbook/errors.hpp"
#include "floatbook/numfmt.hpp"

#include "json.hpp"

#include <istream>
#include <ostream>

namespace floatbook::report {

namespace {

size_t require_column(const csv::Table& table, std::string_view name,
                      std::string_view source_name) {
    const auto col = csv::find_column(table, name);
    if (!col) {
        throw InputError(std::string(source_name) + ": missing column '" + std::string(name) + "'");
    }
    return *col;
}

} // namespace

void write_index_csv(std::ostream& out, std::span<const IndexPoint> points) {
    out << "date,price,vwap,rho,vdi_fraction,vds_fraction\n";
    for (const auto& p : points) {
        out << p.date.to_string() << ',' << format_number(p.price) << ',' << format_number(p.vwap)
            << ',' << format_number(p.rho) << ',' << format_number(p.vdi_fraction) << ','
            << format_number(p.vds_fraction) << '\n';
    }
}

std::vector<IndexPoint> read_index_csv(std::istream& in, std::string_view source_name) {
    const csv::Table table = csv::read_table(in, source_name);
    const size_t c_date = require_column(table, "date", source_name);
    const size_t c_price = require_column(table, "price", source_name);
    const size_t c_vwap = require_column(table, "vwap", source_name);
    const size_t c_rho = require_column(table, "rho", source_name);
    const size_t c_vdi = require_column(table, "vdi_fraction", source_name);
    const size_t c_vds = require_column(table, "vds_fraction", source_name);

    std::vector<IndexPoint> points;
    points.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        IndexPoint p;
        p.date = Date::parse(row.fields[c_date]);
        p.price = csv::parse_double(row.fields[c_price], source_name, row.line_number, "price");
        p.vwap = csv::parse_double(row.fields[c_vwap], source_name, row.line_number, "vwap");
        p.rho = csv::parse_double(row.fields[c_rho], source_name, row.line_number, "rho");
        p.vdi_fraction =
            csv::parse_double(row.fields[c_vdi], source_name, row.line_number, "vdi_fraction");
        p.vds_fraction =
            csv::parse_double(row.fields[c_vds], source_name, row.line_number, "vds_fraction");
        points.push_back(p);
    }
    return points;
}

void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins) {
    out << "bin_low,fraction\n";
    for (const auto& b : bins) {
        out << format_number(b.bin_low) << ',' << format_number(b.fraction) << '\n';
    }
}

std::vector<HistogramBin> read_histogram_csv(std::istream& in, std::string_view source_name) {
    const csv::Table table = csv::read_table(in, source_name);
    const size_t c_low = require_column(table, "bin_low", source_name);
    const size_t c_frac = require_column(table, "fraction", source_name);

    std::vector<HistogramBin> bins;
    bins.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        bins.push_back(HistogramBin{
            csv::parse_double(row.fields[c_low], source_name, row.line_number, "bin_low"),
            csv::parse_double(row.fields[c_frac], source_name, row.line_number, "fraction")});
    }
    return bins;
}

void write_agents_csv(std::ostream& out, std::span<const SummaryRow> rows) {
    out << "theta,n_operations,total_return\n";
    for (const auto& r : rows) {
        out << format_number(r.theta) << ',' << r.n_operations << ','
            << format_number(r.total_return) << '\n';
    }
}

std::vector<SummaryRow> read_agents_csv(std::istream& in, std::string_view source_name) {
    const csv::Table table = csv::read_table(in, source_name);
    const size_t c_theta = require_column(table, "theta", source_name);
    const size_t c_ops = require_column(table, "n_operations", source_name);
    const size_t c_ret = require_column(table, "total_return", source_name);

    std::vector<SummaryRow> rows;
    rows.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        SummaryRow r;
        r.theta = csv::parse_double(row.fields[c_theta], source_name, row.line_number, "theta");
        r.n_operations = static_cast<int>(
            csv::parse_double(row.fields[c_ops], source_name, row.line_number, "n_operations"));
        r.total_return =
            csv::parse_double(row.fields[c_ret], source_name, row.line_number, "total_return");
        rows.push_back(r);
    }
    return rows;
}

void write_trades_json(std::ostream& out, std::string_view symbol,
                       std::span<const AgentResult> results) {
    nlohmann::ordered_json doc;
    doc["symbol"] = std::string(symbol);
    auto& agents = doc["agents"] = nlohmann::ordered_json::array();
    for (const auto& r : results) {
        nlohmann::ordered_json agent;
        agent["theta"] = quantize_number(r.theta);
        agent["n_operations"] = r.n_operations;
        agent["total_return"] = quantize_number(r.total_return);
        auto& trades = agent["trades"] = nlohmann::ordered_json::array();
        for (const auto& t : r.trades) {
            trades.push_back({{"buy_date", t.buy_date.to_string()},
                              {"buy_price", quantize_number(t.buy_price)},
                              {"sell_date", t.sell_date.to_string()},
                              {"sell_price", quantize_number(t.sell_price)},
                              {"forced_close", t.forced_close}});
        }
        agents.push_back(std::move(agent));
    }
    out << doc.dump(2) << '\n';
}

std::vector<AgentResult> read_trades_json(std::istream& in, std::string_view source_name) {
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string(source_name) + ": " + e.what());
    }
    std::vector<AgentResult> results;
    try {
        for (const auto& agent : doc.at("agents")) {
            AgentResult r;
            r.theta = agent.at("theta").get<double>();
            r.n_operations = agent.at("n_operations").get<int>();
            r.total_return = agent.at("total_return").get<double>();
            for (const auto& t : agent.at("trades")) {
                TradeRecord trade;
                trade.buy_date = Date::parse(t.at("buy_date").get<std::string>());
                trade.buy_price = t.at("buy_price").get<double>();
                trade.sell_date = Date::parse(t.at("sell_date").get<std::string>());
                trade.sell_price = t.at("sell_price").get<double>();
                trade.forced_close = t.at("forced_close").get<bool>();
                r.trades.push_back(trade);
            }
            results.push_back(std::move(r));
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string(source_name) + ": " + e.what());
    }
    return results;
}

} // namespace floatbook::report

#pragma once

#include "floatbook/backtest.hpp"
#include "floatbook/volume_book.hpp"

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

// Plot-ready output files and their readers. All numbers go through
// format_number (shortest round-trip, at most 12 significant digits), so a
// file re-serialized after parsing reproduces itself byte for byte.
namespace floatbook::report {

void write_index_csv(std::ostream& out, std::span<const IndexPoint> points);
std::vector<IndexPoint> read_index_csv(std::istream& in, std::string_view source_name);

void write_histogram_csv(std::ostream& out, std::span<const HistogramBin> bins);
std::vector<HistogramBin> read_histogram_csv(std::istream& in, std::string_view source_name);

void write_agents_csv(std::ostream& out, std::span<const SummaryRow> rows);
std::vector<SummaryRow> read_agents_csv(std::istream& in, std::string_view source_name);

void write_trades_json(std::ostream& out, std::string_view symbol,
                       std::span<const AgentResult> results);
std::vector<AgentResult> read_trades_json(std::istream& in, std::string_view source_name);

} // namespace floatbook::report

#pragma once

#include "floatbook/date.hpp"
#include "floatbook/volume_book.hpp"

#include <span>
#include <vector>

namespace floatbook {

// A threshold agent's parameter: buy when rho <= -theta, sell when
// rho >= +theta.
struct AgentParams {
    double theta = 0.0; // in (0, 1)
};

struct TradeRecord {
    Date buy_date;
    double buy_price = 0.0;
    Date sell_date;
    double sell_price = 0.0;
    bool forced_close = false; // open position closed at the final price

    bool operator==(const TradeRecord&) const = default;
};

struct AgentResult {
    double theta = 0.0;
    std::vector<TradeRecord> trades; // chronological
    int n_operations = 0;            // completed buy+sell pairs (forced close excluded)
    double total_return = 0.0;       // product(sell/buy) - 1, forced close included
};

struct AgentState {
    bool holding = false;
    Date buy_date;
    double buy_price = 0.0;
};

enum class TradeAction { none, buy, sell };

// 39 agents: theta = 0.025, 0.050, ..., 0.975.
std::vector<AgentParams> default_agent_grid();

// One day of the threshold rule. Thresholds are inclusive; a flat agent can
// only buy, a holding agent can only sell, one action per day.
TradeAction step_agent(AgentState& state, double theta, const IndexPoint& point);

// Multiplicative accumulation over a trade list: product(sell/buy) - 1.
double compound_return(std::span<const TradeRecord> trades);

// Steps every agent through the whole series; a position still open after
// the final point is closed at the final price with forced_close = true.
std::vector<AgentResult> run_backtest(std::span<const IndexPoint> points,
                                      std::span<const AgentParams> grid);

struct SummaryRow {
    double theta = 0.0;
    int n_operations = 0;
    double total_return = 0.0;

    bool operator==(const SummaryRow&) const = default;
};

// One row per agent, ascending theta.
std::vector<SummaryRow> summarize(std::span<const AgentResult> results);

} // namespace floatbook

#include "floatbook/backtest.hpp"

#include "floatbook/errors.hpp"

#include <algorithm>

namespace floatbook {

std::vector<AgentParams> default_agent_grid() {
    std::vector<AgentParams> grid;
    grid.reserve(39);
    for (int i = 1; i <= 39; ++i) grid.push_back(AgentParams{i * 0.025});
    return grid;
}

TradeAction step_agent(AgentState& state, double theta, const IndexPoint& point) {
    if (!state.holding) {
        if (point.rho <= -theta) {
            state.holding = true;
            state.buy_date = point.date;
            state.buy_price = point.price;
            return TradeAction::buy;
        }
        return TradeAction::none;
    }
    if (point.rho >= theta) {
        state.holding = false;
        return TradeAction::sell;
    }
    return TradeAction::none;
}

double compound_return(std::span<const TradeRecord> trades) {
    double acc = 1.0;
    for (const auto& t : trades) acc *= t.sell_price / t.buy_price;
    return acc - 1.0;
}

std::vector<AgentResult> run_backtest(std::span<const IndexPoint> points,
                                      std::span<const AgentParams> grid) {
    if (points.empty()) throw InputError("backtest requires a non-empty index series");
    if (grid.empty()) throw InputError("backtest requires a non-empty agent grid");
    for (size_t i = 1; i < points.size(); ++i) {
        if (!(points[i - 1].date < points[i].date)) {
            throw InputError("index series not chronological at " + points[i].date.to_string());
        }
    }

    std::vector<AgentResult> results;
    results.reserve(grid.size());
    for (const auto& params : grid) {
        if (!(params.theta > 0.0 && params.theta < 1.0)) {
            throw InputError("agent theta must lie in (0, 1)");
        }
        AgentResult result;
        result.theta = params.theta;

        AgentState state;
        for (size_t i = 0; i < points.size(); ++i) {
            const bool last = i + 1 == points.size();
            // a buy on the final point would be closed the same day; skip it
            if (last && !state.holding) break;
            const TradeAction action = step_agent(state, params.theta, points[i]);
            if (action == TradeAction::sell) {
                result.trades.push_back(TradeRecord{state.buy_date, state.buy_price,
                                                    points[i].date, points[i].price, false});
            }
        }
        if (state.holding) {
            const IndexPoint& final_point = points.back();
            result.trades.push_back(TradeRecord{state.buy_date, state.buy_price, final_point.date,
                                                final_point.price, true});
        }

        result.n_operations = static_cast<int>(
            std::count_if(result.trades.begin(), result.trades.end(),
                          [](const TradeRecord& t) { return !t.forced_close; }));
        result.total_return = compound_return(result.trades);
        results.push_back(std::move(result));
    }
    return results;
}

std::vector<SummaryRow> summarize(std::span<const AgentResult> results) {
    if (results.empty()) throw InputError("nothing to summarize");
    std::vector<SummaryRow> rows;
    rows.reserve(results.size());
    for (const auto& r : results) {
        rows.push_back(SummaryRow{r.theta, r.n_operations, r.total_return});
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const SummaryRow& a, const SummaryRow& b) { return a.theta < b.theta; });
    return rows;
}

} // namespace floatbook

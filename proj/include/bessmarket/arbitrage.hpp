#pragma once

#include <span>
#include <vector>

#include "bessmarket/battery.hpp"
#include "bessmarket/calendar.hpp"
#include "bessmarket/market_data.hpp"

namespace bessmarket {

/// One simulated perfect-foresight cycle: charge at the cheapest hour of the
/// local day, discharge at the most expensive one. Hours need not be ordered
/// within the day; the simulation is an idealized upper bound.
struct DailyArbitrageResult {
    CivilDate date;
    int buy_hour = 0;   // slot index within the local day (0 = first hour)
    int sell_hour = 0;
    double buy_price = 0.0;
    double sell_price = 0.0;
    MarketKind buy_source = MarketKind::day_ahead;
    MarketKind sell_source = MarketKind::day_ahead;
    double cycle_profit = 0.0;  // EUR per MWh of storage cycled, >= 0
    bool clamped = false;       // true when the raw profit was negative
};

/// Candidate price series a battery may buy from or sell into on the same
/// day. Candidates are kept in MarketKind order for deterministic tie-breaks.
struct ServiceBasket {
    std::vector<const HourlyPriceSeries*> buy_candidates;
    std::vector<const HourlyPriceSeries*> sell_candidates;

    void validate() const;  // shared zone and span, day-ahead in both sets
};

/// Whether imbalance-cost series join both candidate sets or only the set
/// matching their direction.
enum class ImbalanceRole { both, directional };

/// Classifies series: day-ahead and intraday join both sets, *_up sell,
/// *_down buy, imbalance per `role`. Secondary-reserve kinds are rejected.
ServiceBasket make_basket(std::span<const HourlyPriceSeries* const> series,
                          ImbalanceRole role = ImbalanceRole::both);

/// profit = max(0, discharge_eff * max_price - min_price / charge_eff).
/// Ties in argmin/argmax break to the earliest hour. Throws on incomplete days.
DailyArbitrageResult daily_arbitrage(const DaySlice& day, const EfficiencyPair& eff);

/// Buy at the global minimum over all buy candidates x hours, sell at the
/// global maximum over all sell candidates x hours. Requires each candidate
/// to have a complete day for `date`.
DailyArbitrageResult multi_service_daily_arbitrage(const ServiceBasket& basket, CivilDate date,
                                                   const EfficiencyPair& eff);

/// All complete days of one series.
std::vector<DailyArbitrageResult> simulate_daily(const HourlyPriceSeries& series,
                                                 const EfficiencyPair& eff);

/// All dates where every basket member has a complete day.
std::vector<DailyArbitrageResult> simulate_multi_service(const ServiceBasket& basket,
                                                         const EfficiencyPair& eff);

struct ProfitableDays {
    long count = 0;
    std::vector<CivilDate> days;
};

/// Days with cycle_profit strictly greater than the wear cost.
ProfitableDays count_profitable_days(std::span<const DailyArbitrageResult> results, double wear);

double mean_daily_profit(std::span<const DailyArbitrageResult> results);

}  // namespace bessmarket

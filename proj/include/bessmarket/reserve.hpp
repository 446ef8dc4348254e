#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "bessmarket/battery.hpp"
#include "bessmarket/calendar.hpp"
#include "bessmarket/market_data.hpp"

namespace bessmarket {

enum class Direction { up, down };

std::string_view to_string(Direction d);

/// Period-mean prices in EUR/MWh: day-ahead plus the secondary-regulation
/// energy price per direction.
struct PriceMeans {
    double day_ahead = 0.0;
    double secondary_up = 0.0;
    double secondary_down = 0.0;
};

/// Period totals for one reserve market. Downward values may be given as
/// negative magnitudes or positive ones; only magnitudes enter the formulas.
struct ReserveAggregates {
    double band_up_total_mw = 0.0;
    double energy_up_total_mwh = 0.0;
    double band_down_total_mw = 0.0;
    double energy_down_total_mwh = 0.0;
};

struct ReserveEconomics {
    Direction direction = Direction::up;
    DateRange period;
    double avg_band_utilization = 0.0;   // MWh/MW
    double avg_energy_profit = 0.0;      // EUR/MWh, negative = net cost
    double effective_energy_cost = 0.0;  // EUR/MWh
    double break_even_band_price = 0.0;  // EUR/MW
    std::optional<long> profitable_hours;  // needs hourly band prices
    long hours_in_period = 0;
};

/// |sum of activated energy| / |sum of assigned band| over the period.
/// Zero band with zero energy yields 0; zero band with activated energy is
/// inconsistent and throws.
double band_utilization(const ReserveMarketSeries& series, Direction direction,
                        const DateRange& period);

/// Net value of delivering 1 MWh of storage energy in the given direction,
/// with the displaced energy settled at the day-ahead mean:
///   up:   discharge_eff * P_up - P_da / charge_eff
///   down: discharge_eff * P_da - P_down / charge_eff
double avg_energy_profit(const PriceMeans& means, Direction direction, const EfficiencyPair& eff);

/// Activation-weighted mean of the per-hour profit formula over hours where
/// both price series are present. Hours weigh by |activated energy| when
/// `activation` is given, uniformly otherwise.
double avg_energy_profit_hourly(const HourlyPriceSeries& day_ahead,
                                const HourlyPriceSeries& secondary_energy,
                                const ReserveMarketSeries* activation, Direction direction,
                                const EfficiencyPair& eff, const DateRange& period);

/// Wear cost net of the energy-term profit, per MWh cycled.
double effective_energy_cost(double wear, double energy_profit);

/// Minimum capacity payment covering the effective energy cost:
/// EUR/MWh * MWh/MW = EUR/MW, so the cost is scaled by the utilization, not
/// divided by it.
double break_even_band_price(double wear, double energy_profit, double utilization);

/// Hours in the period whose band price strictly exceeds the break-even.
long count_profitable_hours(const ReserveMarketSeries& series, double break_even,
                            const DateRange& period);

/// One pre-aggregated accounting period (typically a calendar year).
struct AggregatePeriod {
    DateRange period;
    ReserveAggregates aggregates;
    PriceMeans means;
};

/// Header: period_start,period_end,band_up_total,energy_up_total,
/// band_down_total,energy_down_total,day_ahead_mean,secondary_up_mean,
/// secondary_down_mean. Rows must be ordered by period start.
std::vector<AggregatePeriod> ingest_aggregates_csv(const std::string& path);
std::vector<AggregatePeriod> ingest_aggregates_csv_text(std::string_view text,
                                                        const std::string& origin);

struct ReserveReport {
    ReserveEconomics up;
    ReserveEconomics down;
};

/// Aggregates mode: break-even economics from period totals and price means.
/// Profitable hours stay unset (no hourly band prices).
ReserveReport reserve_report(const ReserveAggregates& aggregates, const PriceMeans& means,
                             const BatteryParams& params, const DateRange& period);

/// Hourly mode: everything derived from raw hourly series, with the energy
/// profit weighted by activation.
ReserveReport reserve_report(const ReserveMarketSeries& series,
                             const HourlyPriceSeries& day_ahead,
                             const HourlyPriceSeries& secondary_energy_up,
                             const HourlyPriceSeries& secondary_energy_down,
                             const BatteryParams& params, const DateRange& period);

}  // namespace bessmarket

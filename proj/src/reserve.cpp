#include "bessmarket/reserve.hpp"

#include <cmath>
#include <cstdlib>
#include <string>
#include <unordered_map>

#include "bessmarket/errors.hpp"
#include "bessmarket/util.hpp"

namespace bessmarket {

std::string_view to_string(Direction d) {
    return d == Direction::up ? "up" : "down";
}

namespace {

bool in_period(const HourStamp& t, const DateRange& period) {
    return period.contains(t.local_date());
}

double ratio_or_throw(double energy_sum, double band_sum, std::string_view what) {
    const double band = std::abs(band_sum);
    const double energy = std::abs(energy_sum);
    if (band == 0.0) {
        if (energy == 0.0) return 0.0;
        throw Error(Errc::inconsistent_reserve_data,
                    std::string("activated energy without assigned band (") + std::string(what) +
                        ")");
    }
    return energy / band;
}

double hour_profit(double da, double sec, Direction direction, const EfficiencyPair& eff) {
    if (direction == Direction::up) return eff.discharge * sec - da / eff.charge;
    return eff.discharge * da - sec / eff.charge;
}

}  // namespace

double band_utilization(const ReserveMarketSeries& series, Direction direction,
                        const DateRange& period) {
    double band_sum = 0.0;
    double energy_sum = 0.0;
    for (std::size_t i = 0; i < series.hours.size(); ++i) {
        if (!in_period(series.hours[i], period)) continue;
        if (direction == Direction::up) {
            band_sum += series.band_up[i];
            energy_sum += series.energy_up[i];
        } else {
            band_sum += series.band_down[i];
            energy_sum += series.energy_down[i];
        }
    }
    return ratio_or_throw(energy_sum, band_sum, to_string(direction));
}

double avg_energy_profit(const PriceMeans& means, Direction direction, const EfficiencyPair& eff) {
    const double sec = direction == Direction::up ? means.secondary_up : means.secondary_down;
    return hour_profit(means.day_ahead, sec, direction, eff);
}

double avg_energy_profit_hourly(const HourlyPriceSeries& day_ahead,
                                const HourlyPriceSeries& secondary_energy,
                                const ReserveMarketSeries* activation, Direction direction,
                                const EfficiencyPair& eff, const DateRange& period) {
    std::unordered_map<long long, double> sec_by_hour;
    sec_by_hour.reserve(secondary_energy.points.size());
    for (const auto& p : secondary_energy.points) sec_by_hour.emplace(p.t.utc_sec, p.value);

    std::unordered_map<long long, double> weight_by_hour;
    if (activation != nullptr) {
        weight_by_hour.reserve(activation->hours.size());
        for (std::size_t i = 0; i < activation->hours.size(); ++i) {
            const double e = direction == Direction::up ? activation->energy_up[i]
                                                        : activation->energy_down[i];
            weight_by_hour.emplace(activation->hours[i].utc_sec, std::abs(e));
        }
    }

    double weighted_sum = 0.0;
    double weight_sum = 0.0;
    double plain_sum = 0.0;
    long joined = 0;
    for (const auto& p : day_ahead.points) {
        if (!in_period(p.t, period)) continue;
        auto it = sec_by_hour.find(p.t.utc_sec);
        if (it == sec_by_hour.end()) continue;
        const double profit = hour_profit(p.value, it->second, direction, eff);
        plain_sum += profit;
        ++joined;
        if (activation != nullptr) {
            auto wit = weight_by_hour.find(p.t.utc_sec);
            if (wit != weight_by_hour.end() && wit->second > 0.0) {
                weighted_sum += profit * wit->second;
                weight_sum += wit->second;
            }
        }
    }
    if (joined == 0)
        throw Error(Errc::empty_input, "no overlapping day-ahead and secondary energy hours");
    if (weight_sum > 0.0) return weighted_sum / weight_sum;
    return plain_sum / static_cast<double>(joined);
}

double effective_energy_cost(double wear, double energy_profit) {
    return wear - energy_profit;
}

double break_even_band_price(double wear, double energy_profit, double utilization) {
    if (utilization < 0.0)
        throw Error(Errc::invalid_params, "utilization must be non-negative");
    return effective_energy_cost(wear, energy_profit) * utilization;
}

long count_profitable_hours(const ReserveMarketSeries& series, double break_even,
                            const DateRange& period) {
    long n = 0;
    for (std::size_t i = 0; i < series.hours.size(); ++i) {
        if (!in_period(series.hours[i], period)) continue;
        if (series.band_price[i] > break_even) ++n;
    }
    return n;
}

namespace {

constexpr std::string_view kAggregatesHeader =
    "period_start,period_end,band_up_total,energy_up_total,band_down_total,energy_down_total,"
    "day_ahead_mean,secondary_up_mean,secondary_down_mean";

CivilDate parse_date_field(std::string_view field, long line_no, const char* name) {
    const auto d = parse_civil_date(field);
    if (!d)
        throw Error(Errc::malformed_timestamp, "cannot parse '" + std::string(field) + "'",
                    line_no, name);
    return *d;
}

double parse_num_field(std::string_view field, long line_no, const char* name) {
    const auto v = parse_double(field);
    if (!v)
        throw Error(Errc::malformed_value, "cannot parse '" + std::string(field) + "'", line_no,
                    name);
    return *v;
}

}  // namespace

std::vector<AggregatePeriod> ingest_aggregates_csv(const std::string& path) {
    return ingest_aggregates_csv_text(read_file(path), path);
}

std::vector<AggregatePeriod> ingest_aggregates_csv_text(std::string_view text,
                                                        const std::string& origin) {
    std::vector<AggregatePeriod> out;
    long line_no = 0;
    bool header_seen = false;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (pos > text.size() && line.empty()) break;
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != kAggregatesHeader)
                throw Error(Errc::schema_mismatch,
                            origin + ": expected header '" + std::string(kAggregatesHeader) + "'",
                            line_no);
            header_seen = true;
            continue;
        }
        const auto fields = split_csv_line(line);
        if (fields.size() != 9)
            throw Error(Errc::misaligned_row,
                        origin + ": expected 9 fields, got " + std::to_string(fields.size()),
                        line_no);
        AggregatePeriod p;
        p.period.first = parse_date_field(fields[0], line_no, "period_start");
        p.period.last = parse_date_field(fields[1], line_no, "period_end");
        if (p.period.last < p.period.first)
            throw Error(Errc::misaligned_row, origin + ": period ends before it starts", line_no);
        p.aggregates.band_up_total_mw = parse_num_field(fields[2], line_no, "band_up_total");
        p.aggregates.energy_up_total_mwh = parse_num_field(fields[3], line_no, "energy_up_total");
        p.aggregates.band_down_total_mw = parse_num_field(fields[4], line_no, "band_down_total");
        p.aggregates.energy_down_total_mwh =
            parse_num_field(fields[5], line_no, "energy_down_total");
        p.means.day_ahead = parse_num_field(fields[6], line_no, "day_ahead_mean");
        p.means.secondary_up = parse_num_field(fields[7], line_no, "secondary_up_mean");
        p.means.secondary_down = parse_num_field(fields[8], line_no, "secondary_down_mean");
        if (!out.empty() && !(out.back().period.first < p.period.first))
            throw Error(Errc::misaligned_row, origin + ": periods out of order", line_no);
        out.push_back(p);
    }
    if (!header_seen) throw Error(Errc::schema_mismatch, origin + ": empty file");
    return out;
}

namespace {

ReserveEconomics economics(Direction direction, const DateRange& period, double utilization,
                           double profit, double wear, std::optional<long> profitable,
                           long hours) {
    ReserveEconomics e;
    e.direction = direction;
    e.period = period;
    e.avg_band_utilization = utilization;
    e.avg_energy_profit = profit;
    e.effective_energy_cost = effective_energy_cost(wear, profit);
    e.break_even_band_price = break_even_band_price(wear, profit, utilization);
    e.profitable_hours = profitable;
    e.hours_in_period = hours;
    return e;
}

}  // namespace

ReserveReport reserve_report(const ReserveAggregates& aggregates, const PriceMeans& means,
                             const BatteryParams& params, const DateRange& period) {
    params.validate();
    const double wear = wear_cost(params);
    const EfficiencyPair eff = split_efficiency(params);

    const double util_up =
        ratio_or_throw(aggregates.energy_up_total_mwh, aggregates.band_up_total_mw, "up");
    const double util_down =
        ratio_or_throw(aggregates.energy_down_total_mwh, aggregates.band_down_total_mw, "down");

    ReserveReport report;
    report.up = economics(Direction::up, period, util_up,
                          avg_energy_profit(means, Direction::up, eff), wear, std::nullopt, 0);
    report.down = economics(Direction::down, period, util_down,
                            avg_energy_profit(means, Direction::down, eff), wear, std::nullopt, 0);
    return report;
}

ReserveReport reserve_report(const ReserveMarketSeries& series,
                             const HourlyPriceSeries& day_ahead,
                             const HourlyPriceSeries& secondary_energy_up,
                             const HourlyPriceSeries& secondary_energy_down,
                             const BatteryParams& params, const DateRange& period) {
    params.validate();
    const double wear = wear_cost(params);
    const EfficiencyPair eff = split_efficiency(params);

    long hours = 0;
    for (const auto& t : series.hours)
        if (in_period(t, period)) ++hours;
    if (hours == 0) throw Error(Errc::empty_input, "no reserve hours in period");

    ReserveReport report;
    for (Direction d : {Direction::up, Direction::down}) {
        const auto& sec = d == Direction::up ? secondary_energy_up : secondary_energy_down;
        const double util = band_utilization(series, d, period);
        const double profit = avg_energy_profit_hourly(day_ahead, sec, &series, d, eff, period);
        const double be = break_even_band_price(wear, profit, util);
        ReserveEconomics e = economics(d, period, util, profit, wear,
                                       count_profitable_hours(series, be, period), hours);
        (d == Direction::up ? report.up : report.down) = e;
    }
    return report;
}

}  // namespace bessmarket

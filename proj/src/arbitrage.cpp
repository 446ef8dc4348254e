#include "bessmarket/arbitrage.hpp"

#include <algorithm>
#include <map>

#include "bessmarket/util.hpp"

namespace bessmarket {

namespace {

bool arbitrage_candidate(MarketKind kind) {
    switch (kind) {
        case MarketKind::secondary_band_price:
        case MarketKind::secondary_energy_up:
        case MarketKind::secondary_energy_down:
            return false;
        default:
            return true;
    }
}

bool contains(const std::vector<const HourlyPriceSeries*>& set, MarketKind kind) {
    return std::any_of(set.begin(), set.end(),
                       [kind](const HourlyPriceSeries* s) { return s->market == kind; });
}

void sort_by_kind(std::vector<const HourlyPriceSeries*>& set) {
    std::sort(set.begin(), set.end(), [](const HourlyPriceSeries* a, const HourlyPriceSeries* b) {
        return a->market < b->market;
    });
}

struct PricePick {
    double price = 0.0;
    int slot = 0;
    MarketKind source = MarketKind::day_ahead;
    bool set = false;
};

void pick_min(PricePick& best, const DaySlice& day) {
    for (std::size_t i = 0; i < day.points.size(); ++i) {
        const double p = day.points[i].value;
        if (!best.set || p < best.price ||
            (p == best.price && static_cast<int>(i) < best.slot)) {
            best = {p, static_cast<int>(i), day.market, true};
        }
    }
}

void pick_max(PricePick& best, const DaySlice& day) {
    for (std::size_t i = 0; i < day.points.size(); ++i) {
        const double p = day.points[i].value;
        if (!best.set || p > best.price ||
            (p == best.price && static_cast<int>(i) < best.slot)) {
            best = {p, static_cast<int>(i), day.market, true};
        }
    }
}

DailyArbitrageResult result_from_picks(CivilDate date, const PricePick& buy, const PricePick& sell,
                                       const EfficiencyPair& eff) {
    DailyArbitrageResult r;
    r.date = date;
    r.buy_hour = buy.slot;
    r.sell_hour = sell.slot;
    r.buy_price = buy.price;
    r.sell_price = sell.price;
    r.buy_source = buy.source;
    r.sell_source = sell.source;
    const double raw = eff.discharge * sell.price - buy.price / eff.charge;
    if (raw < 0.0) {
        r.cycle_profit = 0.0;
        r.clamped = true;
    } else {
        r.cycle_profit = raw;
        r.clamped = false;
    }
    return r;
}

std::map<CivilDate, DayIndex> complete_day_map(const HourlyPriceSeries& series) {
    std::map<CivilDate, DayIndex> out;
    for (const DayIndex& day : split_days(series))
        if (day.complete) out.emplace(day.date, day);
    return out;
}

}  // namespace

void ServiceBasket::validate() const {
    if (buy_candidates.empty() || sell_candidates.empty())
        throw Error(Errc::empty_input, "basket has an empty candidate set");
    if (!contains(buy_candidates, MarketKind::day_ahead) ||
        !contains(sell_candidates, MarketKind::day_ahead))
        throw Error(Errc::invalid_params, "day-ahead series must be in both candidate sets");

    const HourlyPriceSeries* ref = buy_candidates.front();
    auto check = [&](const HourlyPriceSeries* s) {
        if (s->zone != ref->zone)
            throw Error(Errc::invalid_params, "basket mixes zones " + ref->zone + " and " + s->zone);
        if (!(s->span() == ref->span()))
            throw Error(Errc::invalid_params, "basket member spans differ: " + std::string(to_string(s->market)));
    };
    for (const auto* s : buy_candidates) check(s);
    for (const auto* s : sell_candidates) check(s);
}

ServiceBasket make_basket(std::span<const HourlyPriceSeries* const> series, ImbalanceRole role) {
    ServiceBasket basket;
    for (const HourlyPriceSeries* s : series) {
        if (!arbitrage_candidate(s->market))
            throw Error(Errc::invalid_params, "not an arbitrage candidate: " +
                                                  std::string(to_string(s->market)));
        switch (s->market) {
            case MarketKind::day_ahead:
            case MarketKind::intraday_adjustment:
                basket.buy_candidates.push_back(s);
                basket.sell_candidates.push_back(s);
                break;
            case MarketKind::tertiary_up:
            case MarketKind::deviation_mgmt_up:
                basket.sell_candidates.push_back(s);
                break;
            case MarketKind::tertiary_down:
            case MarketKind::deviation_mgmt_down:
                basket.buy_candidates.push_back(s);
                break;
            case MarketKind::imbalance_up:
                basket.sell_candidates.push_back(s);
                if (role == ImbalanceRole::both) basket.buy_candidates.push_back(s);
                break;
            case MarketKind::imbalance_down:
                basket.buy_candidates.push_back(s);
                if (role == ImbalanceRole::both) basket.sell_candidates.push_back(s);
                break;
            default:
                break;
        }
    }
    sort_by_kind(basket.buy_candidates);
    sort_by_kind(basket.sell_candidates);
    basket.validate();
    return basket;
}

DailyArbitrageResult daily_arbitrage(const DaySlice& day, const EfficiencyPair& eff) {
    if (!day.complete)
        throw Error(Errc::analysis_error,
                    "incomplete day " + format_civil_date(day.date) + " rejected");
    PricePick buy, sell;
    pick_min(buy, day);
    pick_max(sell, day);
    return result_from_picks(day.date, buy, sell, eff);
}

DailyArbitrageResult multi_service_daily_arbitrage(const ServiceBasket& basket, CivilDate date,
                                                   const EfficiencyPair& eff) {
    basket.validate();
    auto slice_for = [&](const HourlyPriceSeries* s) {
        for (const DayIndex& day : split_days(*s))
            if (day.date == date) {
                if (!day.complete)
                    throw Error(Errc::analysis_error,
                                std::string(to_string(s->market)) + " has an incomplete day " +
                                    format_civil_date(date));
                return day_slice(*s, day);
            }
        throw Error(Errc::analysis_error, std::string(to_string(s->market)) + " has no day " +
                                              format_civil_date(date));
    };

    PricePick buy, sell;
    for (const HourlyPriceSeries* s : basket.buy_candidates) pick_min(buy, slice_for(s));
    for (const HourlyPriceSeries* s : basket.sell_candidates) pick_max(sell, slice_for(s));
    return result_from_picks(date, buy, sell, eff);
}

std::vector<DailyArbitrageResult> simulate_daily(const HourlyPriceSeries& series,
                                                 const EfficiencyPair& eff) {
    std::vector<DailyArbitrageResult> results;
    for (const DayIndex& day : split_days(series))
        if (day.complete) results.push_back(daily_arbitrage(day_slice(series, day), eff));
    return results;
}

std::vector<DailyArbitrageResult> simulate_multi_service(const ServiceBasket& basket,
                                                         const EfficiencyPair& eff) {
    basket.validate();

    // Per-series complete-day lookup, then the dates every member covers.
    std::vector<const HourlyPriceSeries*> members = basket.buy_candidates;
    for (const auto* s : basket.sell_candidates)
        if (std::find(members.begin(), members.end(), s) == members.end()) members.push_back(s);

    std::vector<std::map<CivilDate, DayIndex>> maps;
    maps.reserve(members.size());
    for (const auto* s : members) maps.push_back(complete_day_map(*s));

    std::vector<DailyArbitrageResult> results;
    for (const auto& [date, day0] : maps.front()) {
        bool everywhere = true;
        for (std::size_t m = 1; m < maps.size(); ++m)
            if (!maps[m].contains(date)) {
                everywhere = false;
                break;
            }
        if (!everywhere) continue;

        PricePick buy, sell;
        for (const HourlyPriceSeries* s : basket.buy_candidates) {
            const auto& map = maps[static_cast<std::size_t>(
                std::find(members.begin(), members.end(), s) - members.begin())];
            pick_min(buy, day_slice(*s, map.at(date)));
        }
        for (const HourlyPriceSeries* s : basket.sell_candidates) {
            const auto& map = maps[static_cast<std::size_t>(
                std::find(members.begin(), members.end(), s) - members.begin())];
            pick_max(sell, day_slice(*s, map.at(date)));
        }
        results.push_back(result_from_picks(date, buy, sell, eff));
    }
    return results;
}

ProfitableDays count_profitable_days(std::span<const DailyArbitrageResult> results, double wear) {
    ProfitableDays out;
    for (const DailyArbitrageResult& r : results)
        if (r.cycle_profit > wear) {
            ++out.count;
            out.days.push_back(r.date);
        }
    return out;
}

double mean_daily_profit(std::span<const DailyArbitrageResult> results) {
    if (results.empty()) return 0.0;
    double sum = 0.0;
    for (const DailyArbitrageResult& r : results) sum += r.cycle_profit;
    return sum / static_cast<double>(results.size());
}

}  // namespace bessmarket

#include "bessmarket/commands.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <tuple>

#include <nlohmann/json.hpp>

#include "bessmarket/acquisition.hpp"
#include "bessmarket/arbitrage.hpp"
#include "bessmarket/reserve.hpp"
#include "bessmarket/sweep.hpp"
#include "bessmarket/util.hpp"
#include "bessmarket/version.hpp"

namespace bessmarket {

namespace fs = std::filesystem;
using nlohmann::json;

int exit_code_for(Errc code) {
    switch (code) {
        case Errc::config_error:
        case Errc::auth_missing:
        case Errc::invalid_params:
            return 1;
        case Errc::malformed_timestamp:
        case Errc::malformed_value:
        case Errc::duplicate_hour:
        case Errc::cap_violation:
        case Errc::schema_mismatch:
        case Errc::negative_band_price:
        case Errc::misaligned_row:
        case Errc::invalid_day_length:
        case Errc::inconsistent_reserve_data:
        case Errc::io_error:
        case Errc::schema_drift:
            return 2;
        case Errc::empty_input:
        case Errc::disjoint_grids:
        case Errc::http_error:
        case Errc::analysis_error:
            return 3;
    }
    return 3;
}

namespace {

constexpr std::string_view kConventions =
    "std=sample(n-1); profit_unit=eur_per_mwh_cycled; "
    "break_even=(wear-energy_profit)*utilization; profitable=strict_greater";

struct DatasetStamp {
    std::string kind;
    std::string zone;
    std::size_t rows = 0;
    std::string fnv;
};

struct MergedMarket {
    MarketKind kind = MarketKind::day_ahead;
    std::string zone;
    HourlyPriceSeries series;
};

struct MergedReserve {
    std::string zone;
    ReserveMarketSeries series;
};

struct MergedAggregates {
    std::string zone;
    std::vector<AggregatePeriod> periods;
};

struct Inputs {
    std::vector<MergedMarket> markets;       // first-appearance order of (kind, zone)
    std::vector<MergedReserve> reserves;
    std::vector<MergedAggregates> aggregates;
    std::vector<DatasetStamp> stamps;        // config order, one per dataset
};

void log_warnings(std::ostream& log, const std::string& origin,
                  const std::vector<Warning>& warnings) {
    for (const auto& w : warnings) {
        log << "warning: " << origin << ": " << w.kind;
        if (w.row >= 0) log << " (row " << w.row << ")";
        log << ": " << w.message << "\n";
    }
}

void merge_points(HourlyPriceSeries& into, const HourlyPriceSeries& from,
                  const std::string& what) {
    into.points.insert(into.points.end(), from.points.begin(), from.points.end());
    std::sort(into.points.begin(), into.points.end(),
              [](const HourPoint& a, const HourPoint& b) { return a.t.utc_sec < b.t.utc_sec; });
    for (std::size_t i = 1; i < into.points.size(); ++i)
        if (into.points[i].t.utc_sec == into.points[i - 1].t.utc_sec)
            throw Error(Errc::duplicate_hour,
                        what + ": hour " + format_hour_stamp(into.points[i].t) +
                            " appears in more than one dataset");
}

void merge_reserve(ReserveMarketSeries& into, const ReserveMarketSeries& from,
                   const std::string& what) {
    struct Row {
        HourStamp t;
        double p, bu, bd, eu, ed;
    };
    std::vector<Row> rows;
    rows.reserve(into.size() + from.size());
    auto add = [&rows](const ReserveMarketSeries& s) {
        for (std::size_t i = 0; i < s.size(); ++i)
            rows.push_back({s.hours[i], s.band_price[i], s.band_up[i], s.band_down[i],
                            s.energy_up[i], s.energy_down[i]});
    };
    add(into);
    add(from);
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return a.t.utc_sec < b.t.utc_sec; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].t.utc_sec == rows[i - 1].t.utc_sec)
            throw Error(Errc::duplicate_hour,
                        what + ": hour " + format_hour_stamp(rows[i].t) +
                            " appears in more than one dataset");
    into.hours.clear();
    into.band_price.clear();
    into.band_up.clear();
    into.band_down.clear();
    into.energy_up.clear();
    into.energy_down.clear();
    for (const Row& r : rows) {
        into.hours.push_back(r.t);
        into.band_price.push_back(r.p);
        into.band_up.push_back(r.bu);
        into.band_down.push_back(r.bd);
        into.energy_up.push_back(r.eu);
        into.energy_down.push_back(r.ed);
    }
}

Inputs load_inputs(const RunConfig& config, std::ostream& log) {
    Inputs in;
    for (const auto& spec : config.datasets) {
        const std::string origin = config.resolved_path(spec).string();
        const std::string text = read_file(origin);
        DatasetStamp stamp{spec.kind, spec.zone, 0, fnv1a_hex(text)};

        if (const auto market = spec.market()) {
            IngestResult r =
                ingest_csv_text(text, *market, spec.zone, config.profile_for(spec.zone), origin);
            stamp.rows = r.rows;
            log_warnings(log, origin, r.warnings);
            auto it = std::find_if(in.markets.begin(), in.markets.end(), [&](const MergedMarket& m) {
                return m.kind == *market && m.zone == spec.zone;
            });
            if (it == in.markets.end()) {
                in.markets.push_back({*market, spec.zone, std::move(r.series)});
            } else {
                merge_points(it->series, r.series,
                             std::string(to_string(*market)) + " " + spec.zone);
            }
        } else if (spec.kind == "secondary_reserve") {
            ReserveIngestResult r = ingest_reserve_csv_text(text, spec.zone, origin);
            stamp.rows = r.rows;
            log_warnings(log, origin, r.warnings);
            auto it = std::find_if(in.reserves.begin(), in.reserves.end(),
                                   [&](const MergedReserve& m) { return m.zone == spec.zone; });
            if (it == in.reserves.end())
                in.reserves.push_back({spec.zone, std::move(r.series)});
            else
                merge_reserve(it->series, r.series, "secondary_reserve " + spec.zone);
        } else {
            auto periods = ingest_aggregates_csv_text(text, origin);
            stamp.rows = periods.size();
            auto it = std::find_if(in.aggregates.begin(), in.aggregates.end(),
                                   [&](const MergedAggregates& m) { return m.zone == spec.zone; });
            if (it == in.aggregates.end()) {
                in.aggregates.push_back({spec.zone, std::move(periods)});
            } else {
                it->periods.insert(it->periods.end(), periods.begin(), periods.end());
                std::sort(it->periods.begin(), it->periods.end(),
                          [](const AggregatePeriod& a, const AggregatePeriod& b) {
                              return a.period.first < b.period.first;
                          });
                for (std::size_t i = 1; i < it->periods.size(); ++i)
                    if (!(it->periods[i - 1].period.first < it->periods[i].period.first))
                        throw Error(Errc::inconsistent_reserve_data,
                                    "reserve_aggregates " + spec.zone +
                                        ": overlapping periods across datasets");
            }
        }
        in.stamps.push_back(std::move(stamp));
    }
    return in;
}

std::string csv_meta_block(const RunConfig& config, const std::vector<DatasetStamp>& stamps) {
    std::string m;
    m += "# tool: ";
    m += kToolName;
    m += ' ';
    m += kToolVersion;
    m += "\n# config: fnv1a=";
    m += config.config_hash;
    m += '\n';
    for (const auto& s : stamps) {
        m += "# dataset: kind=" + s.kind + " zone=" + s.zone + " rows=" +
             std::to_string(s.rows) + " fnv1a=" + s.fnv + "\n";
    }
    m += "# conventions: ";
    m += kConventions;
    m += '\n';
    return m;
}

json meta_json(const RunConfig& config, const std::vector<DatasetStamp>& stamps) {
    json m;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["config_fnv1a"] = config.config_hash;
    json ds = json::array();
    for (const auto& s : stamps) {
        json d;
        d["kind"] = s.kind;
        d["zone"] = s.zone;
        d["rows"] = s.rows;
        d["fnv1a"] = s.fnv;
        ds.push_back(d);
    }
    m["datasets"] = ds;
    m["conventions"] = kConventions;
    return m;
}

void emit_file(const RunConfig& config, const std::string& name, const std::string& content,
               std::ostream& log) {
    const fs::path path = config.output_dir / name;
    write_file_atomic(path.string(), content);
    log << "wrote " << path.generic_string() << "\n";
}

void emit_json(const RunConfig& config, const std::string& name, const json& doc,
               std::ostream& log) {
    emit_file(config, name, doc.dump(2) + "\n", log);
}

const HourlyPriceSeries* find_market(const Inputs& in, MarketKind kind, const std::string& zone) {
    for (const auto& m : in.markets)
        if (m.kind == kind && m.zone == zone) return &m.series;
    return nullptr;
}

bool basket_eligible(MarketKind kind) {
    switch (kind) {
        case MarketKind::day_ahead:
        case MarketKind::intraday_adjustment:
        case MarketKind::tertiary_up:
        case MarketKind::tertiary_down:
        case MarketKind::deviation_mgmt_up:
        case MarketKind::deviation_mgmt_down:
        case MarketKind::imbalance_up:
        case MarketKind::imbalance_down:
            return true;
        case MarketKind::secondary_band_price:
        case MarketKind::secondary_energy_up:
        case MarketKind::secondary_energy_down:
            return false;
    }
    return false;
}

std::string arbitrage_csv(const std::string& meta, std::span<const DailyArbitrageResult> rows) {
    std::string out = meta;
    out += "date,buy_hour,sell_hour,buy_price,sell_price,buy_source,sell_source,cycle_profit,"
           "clamped\n";
    for (const auto& r : rows) {
        out += format_civil_date(r.date);
        out += ',' + std::to_string(r.buy_hour);
        out += ',' + std::to_string(r.sell_hour);
        out += ',' + format_double(r.buy_price);
        out += ',' + format_double(r.sell_price);
        out += ',';
        out += to_string(r.buy_source);
        out += ',';
        out += to_string(r.sell_source);
        out += ',' + format_double(r.cycle_profit);
        out += r.clamped ? ",true\n" : ",false\n";
    }
    return out;
}

json arb_section(std::span<const DailyArbitrageResult> results, double wear) {
    json s;
    s["total_days"] = results.size();
    s["mean_daily_profit"] = mean_daily_profit(results);
    s["profitable_days_wear_zero"] = count_profitable_days(results, 0.0).count;
    s["profitable_days_at_wear_cost"] = count_profitable_days(results, wear).count;
    std::map<int, std::vector<DailyArbitrageResult>> by_year;
    for (const auto& r : results) by_year[r.date.year].push_back(r);
    json years = json::object();
    for (const auto& [year, rows] : by_year) {
        json y;
        y["days"] = rows.size();
        y["mean_daily_profit"] = mean_daily_profit(rows);
        y["profitable_days_wear_zero"] = count_profitable_days(rows, 0.0).count;
        y["profitable_days_at_wear_cost"] = count_profitable_days(rows, wear).count;
        years[std::to_string(year)] = y;
    }
    s["years"] = years;
    return s;
}

/// Basket members must cover the same local-date window as the day-ahead
/// series; others are excluded with a note.
std::vector<const HourlyPriceSeries*> basket_candidates(const Inputs& in,
                                                        const HourlyPriceSeries& day_ahead,
                                                        const std::string& zone,
                                                        std::ostream& log) {
    std::vector<const HourlyPriceSeries*> out;
    for (const auto& m : in.markets) {
        if (m.zone != zone || !basket_eligible(m.kind)) continue;
        if (&m.series == &day_ahead || m.series.span() == day_ahead.span()) {
            out.push_back(&m.series);
        } else {
            log << "note: " << to_string(m.kind) << " " << zone
                << " excluded from the service basket (span differs from day_ahead)\n";
        }
    }
    return out;
}

}  // namespace

int cmd_validate(const RunConfig& config, std::ostream& log) {
    json entries = json::array();
    std::vector<DatasetStamp> stamps;
    bool all_ok = true;

    for (const auto& spec : config.datasets) {
        json e;
        e["kind"] = spec.kind;
        e["zone"] = spec.zone;
        e["path"] = spec.path.generic_string();
        try {
            const std::string origin = config.resolved_path(spec).string();
            const std::string text = read_file(origin);
            DatasetStamp stamp{spec.kind, spec.zone, 0, fnv1a_hex(text)};
            json warnings = json::array();
            auto add_warnings = [&warnings](const std::vector<Warning>& ws) {
                for (const auto& w : ws) {
                    json j;
                    j["kind"] = w.kind;
                    if (w.row >= 0) j["row"] = w.row;
                    j["message"] = w.message;
                    warnings.push_back(j);
                }
            };

            if (const auto market = spec.market()) {
                IngestResult r = ingest_csv_text(text, *market, spec.zone,
                                                 config.profile_for(spec.zone), origin);
                stamp.rows = r.rows;
                e["rows"] = r.rows;
                e["skipped"] = r.skipped;
                const CoverageReport c = coverage(r.series);
                json cov;
                cov["points"] = c.points;
                cov["complete_days"] = c.complete_days;
                cov["incomplete_days"] = c.incomplete_days;
                cov["missing_hours"] = c.missing_hours;
                e["coverage"] = cov;
                add_warnings(r.warnings);
                log << spec.kind << " " << spec.zone << ": " << c.complete_days
                    << " complete days, " << c.incomplete_days << " incomplete, "
                    << c.missing_hours << " missing hours\n";
            } else if (spec.kind == "secondary_reserve") {
                ReserveIngestResult r = ingest_reserve_csv_text(text, spec.zone, origin);
                stamp.rows = r.rows;
                e["rows"] = r.rows;
                e["skipped"] = r.skipped;
                e["hours"] = r.series.size();
                add_warnings(r.warnings);
                log << spec.kind << " " << spec.zone << ": " << r.series.size() << " hours\n";
            } else {
                const auto periods = ingest_aggregates_csv_text(text, origin);
                stamp.rows = periods.size();
                e["rows"] = periods.size();
                log << spec.kind << " " << spec.zone << ": " << periods.size() << " periods\n";
            }
            e["warnings"] = warnings;
            e["status"] = "ok";
            stamps.push_back(std::move(stamp));
        } catch (const Error& err) {
            e["status"] = "error";
            e["error"] = err.what();
            e["error_code"] = errc_name(err.code());
            all_ok = false;
            log << spec.kind << " " << spec.zone << ": error: " << err.what() << "\n";
        }
        entries.push_back(std::move(e));
    }

    json doc;
    doc["metadata"] = meta_json(config, stamps);
    doc["datasets"] = entries;
    doc["status"] = all_ok ? "ok" : "error";
    emit_json(config, "validation.json", doc, log);
    return all_ok ? 0 : 2;
}

int cmd_fetch(const RunConfig& config, bool verify_only, std::ostream& log) {
    if (verify_only) {
        const VerifyReport report = verify_cache(config.source);
        if (report.entries.empty()) {
            log << "cache is empty: " << config.source.cache_dir.generic_string() << "\n";
            return 0;
        }
        for (const auto& e : report.entries) {
            log << to_string(e.status) << " " << e.csv_path.generic_string();
            if (!e.note.empty()) log << " (" << e.note << ")";
            log << "\n";
        }
        return report.all_ok() ? 0 : 2;
    }

    FetchStats stats;
    long jobs = 0;
    for (const auto& spec : config.datasets) {
        if (!spec.fetch_span) continue;
        ++jobs;
        CacheEntry entry;
        if (spec.kind == "secondary_reserve")
            entry = fetch_reserve(config.source, spec.zone, *spec.fetch_span, &stats);
        else
            entry = fetch(config.source, *spec.market(), spec.zone, *spec.fetch_span, &stats);
        log << entry.label << " " << entry.zone << " " << format_civil_date(spec.fetch_span->first)
            << ".." << format_civil_date(spec.fetch_span->last) << ": " << entry.rows << " rows ("
            << (entry.from_cache ? "cache" : "network") << ")\n";
        log_warnings(log, entry.label + " " + entry.zone, entry.warnings);
    }
    if (jobs == 0)
        log << "no datasets declare a fetch span\n";
    else
        log << "network requests: " << stats.network_requests << "\n";
    return 0;
}

int cmd_arbitrage(const RunConfig& config, std::ostream& log) {
    const Inputs in = load_inputs(config, log);
    const EfficiencyPair eff = split_efficiency(config.battery);
    const double wear = wear_cost(config.battery);
    const std::string meta = csv_meta_block(config, in.stamps);

    json zones = json::object();
    bool any = false;
    for (const auto& m : in.markets) {
        if (m.kind != MarketKind::day_ahead) continue;
        any = true;
        const auto da_results = simulate_daily(m.series, eff);
        emit_file(config, "arbitrage_days_day_ahead_" + m.zone + ".csv",
                  arbitrage_csv(meta, da_results), log);
        json z;
        z["day_ahead"] = arb_section(da_results, wear);

        const auto candidates = basket_candidates(in, m.series, m.zone, log);
        if (candidates.size() > 1) {
            ServiceBasket basket = make_basket(candidates, config.imbalance_role);
            const auto multi = simulate_multi_service(basket, eff);
            emit_file(config, "arbitrage_days_multi_service_" + m.zone + ".csv",
                      arbitrage_csv(meta, multi), log);
            z["multi_service"] = arb_section(multi, wear);
        }
        zones[m.zone] = z;
    }
    if (!any) throw Error(Errc::analysis_error, "no day_ahead dataset available");

    json doc;
    doc["metadata"] = meta_json(config, in.stamps);
    doc["wear_cost"] = wear;
    doc["zones"] = zones;
    emit_json(config, "arbitrage_summary.json", doc, log);
    return 0;
}

namespace {

struct ReserveRow {
    std::string zone;
    DateRange period;
    Direction direction = Direction::up;
    std::string mode;
    ReserveEconomics econ;
};

std::vector<int> years_of(const ReserveMarketSeries& series) {
    std::set<int> years;
    for (const auto& t : series.hours) years.insert(t.local_date().year);
    return {years.begin(), years.end()};
}

}  // namespace

int cmd_reserve(const RunConfig& config, std::ostream& log) {
    const Inputs in = load_inputs(config, log);
    std::vector<ReserveRow> rows;

    for (const auto& agg : in.aggregates) {
        for (const auto& p : agg.periods) {
            const ReserveReport rep =
                reserve_report(p.aggregates, p.means, config.battery, p.period);
            rows.push_back({agg.zone, p.period, Direction::up, "table", rep.up});
            rows.push_back({agg.zone, p.period, Direction::down, "table", rep.down});
        }
    }

    for (const auto& res : in.reserves) {
        const auto* da = find_market(in, MarketKind::day_ahead, res.zone);
        const auto* eu = find_market(in, MarketKind::secondary_energy_up, res.zone);
        const auto* ed = find_market(in, MarketKind::secondary_energy_down, res.zone);
        if (da == nullptr || eu == nullptr || ed == nullptr) {
            log << "note: hourly reserve mode skipped for zone " << res.zone
                << " (needs day_ahead, secondary_energy_up and secondary_energy_down)\n";
            continue;
        }
        for (const int year : years_of(res.series)) {
            const DateRange period{{year, 1, 1}, {year, 12, 31}};
            try {
                const ReserveReport rep =
                    reserve_report(res.series, *da, *eu, *ed, config.battery, period);
                rows.push_back({res.zone, period, Direction::up, "hourly", rep.up});
                rows.push_back({res.zone, period, Direction::down, "hourly", rep.down});
            } catch (const Error& err) {
                if (err.code() != Errc::empty_input) throw;
                log << "note: hourly reserve mode skipped for " << res.zone << " " << year << ": "
                    << err.what() << "\n";
            }
        }
    }

    if (rows.empty()) throw Error(Errc::analysis_error, "no reserve inputs available");

    std::sort(rows.begin(), rows.end(), [](const ReserveRow& a, const ReserveRow& b) {
        return std::tie(a.zone, a.period.first, a.mode, a.direction) <
               std::tie(b.zone, b.period.first, b.mode, b.direction);
    });

    std::string csv = csv_meta_block(config, in.stamps);
    csv += "zone,period_start,period_end,direction,mode,avg_band_utilization,avg_energy_profit,"
           "effective_energy_cost,break_even_band_price,profitable_hours,hours_in_period\n";
    json jrows = json::array();
    for (const auto& r : rows) {
        csv += r.zone;
        csv += ',' + format_civil_date(r.period.first);
        csv += ',' + format_civil_date(r.period.last);
        csv += ',';
        csv += to_string(r.direction);
        csv += ',' + r.mode;
        csv += ',' + format_double(r.econ.avg_band_utilization);
        csv += ',' + format_double(r.econ.avg_energy_profit);
        csv += ',' + format_double(r.econ.effective_energy_cost);
        csv += ',' + format_double(r.econ.break_even_band_price);
        csv += ',';
        if (r.econ.profitable_hours) csv += std::to_string(*r.econ.profitable_hours);
        csv += ',';
        if (r.econ.hours_in_period > 0) csv += std::to_string(r.econ.hours_in_period);
        csv += '\n';

        json j;
        j["zone"] = r.zone;
        j["period_start"] = format_civil_date(r.period.first);
        j["period_end"] = format_civil_date(r.period.last);
        j["direction"] = to_string(r.direction);
        j["mode"] = r.mode;
        j["avg_band_utilization"] = r.econ.avg_band_utilization;
        j["avg_energy_profit"] = r.econ.avg_energy_profit;
        j["effective_energy_cost"] = r.econ.effective_energy_cost;
        j["break_even_band_price"] = r.econ.break_even_band_price;
        if (r.econ.profitable_hours)
            j["profitable_hours"] = *r.econ.profitable_hours;
        else
            j["profitable_hours"] = nullptr;
        if (r.econ.hours_in_period > 0)
            j["hours_in_period"] = r.econ.hours_in_period;
        else
            j["hours_in_period"] = nullptr;
        jrows.push_back(j);
    }

    emit_file(config, "reserve_summary.csv", csv, log);
    json doc;
    doc["metadata"] = meta_json(config, in.stamps);
    doc["wear_cost"] = wear_cost(config.battery);
    doc["rows"] = jrows;
    emit_json(config, "reserve_summary.json", doc, log);
    return 0;
}

int cmd_sweep(const RunConfig& config, std::ostream& log) {
    const Inputs in = load_inputs(config, log);
    const EfficiencyPair eff = split_efficiency(config.battery);
    const std::vector<double> grid = config.wear_grid.value_or(std::vector<double>{});
    const std::string meta = csv_meta_block(config, in.stamps);

    std::vector<std::vector<DailyArbitrageResult>> kept;
    std::vector<UtilizationCurve> curves;

    for (const auto& m : in.markets) {
        if (m.kind != MarketKind::day_ahead) continue;
        kept.push_back(simulate_daily(m.series, eff));
        Application app{ApplicationKind::arb_day_ahead, m.zone, ArbitrageInputs{kept.back()}};
        curves.push_back(pput_curve(app, config.battery, grid));

        const auto candidates = basket_candidates(in, m.series, m.zone, log);
        if (candidates.size() > 1) {
            ServiceBasket basket = make_basket(candidates, config.imbalance_role);
            kept.push_back(simulate_multi_service(basket, eff));
            Application multi{ApplicationKind::arb_with_ancillary, m.zone,
                              ArbitrageInputs{kept.back()}};
            curves.push_back(pput_curve(multi, config.battery, grid));
        }
    }

    for (const auto& res : in.reserves) {
        const auto* da = find_market(in, MarketKind::day_ahead, res.zone);
        const auto* eu = find_market(in, MarketKind::secondary_energy_up, res.zone);
        const auto* ed = find_market(in, MarketKind::secondary_energy_down, res.zone);
        if (da == nullptr || eu == nullptr || ed == nullptr) {
            log << "note: reserve sweep skipped for zone " << res.zone
                << " (needs day_ahead, secondary_energy_up and secondary_energy_down)\n";
            continue;
        }
        const DateRange period = res.series.span();
        for (const Direction dir : {Direction::up, Direction::down}) {
            const auto& sec = dir == Direction::up ? *eu : *ed;
            double profit = 0.0;
            try {
                profit = avg_energy_profit_hourly(*da, sec, &res.series, dir, eff, period);
            } catch (const Error& err) {
                if (err.code() != Errc::empty_input) throw;
                log << "note: reserve sweep skipped for " << res.zone << " " << to_string(dir)
                    << ": " << err.what() << "\n";
                continue;
            }
            Application app{dir == Direction::up ? ApplicationKind::secondary_up
                                                 : ApplicationKind::secondary_down,
                            res.zone, ReserveInputs{&res.series, dir, profit, period}};
            curves.push_back(pput_curve(app, config.battery, grid));
        }
    }

    if (curves.empty()) throw Error(Errc::analysis_error, "no sweep inputs available");

    std::vector<UtilizationCurve> normalized;
    json thresholds = json::array();
    for (auto& curve : curves) {
        const bool usable = !curve.empty_input;
        if (usable) curve = normalize(std::move(curve));

        std::string csv = meta;
        csv += "wear_cost,count,normalized\n";
        for (std::size_t i = 0; i < curve.wear_grid.size(); ++i) {
            csv += format_double(curve.wear_grid[i]);
            csv += ',' + std::to_string(curve.counts[i]);
            csv += ',';
            if (usable) csv += format_double(curve.normalized[i]);
            csv += '\n';
        }
        emit_file(config,
                  "pput_" + std::string(to_string(curve.kind)) + "_" + curve.zone + ".csv", csv,
                  log);

        json t;
        t["application"] = to_string(curve.kind);
        t["zone"] = curve.zone;
        t["unit"] = to_string(curve.unit);
        t["total_periods"] = curve.total_periods;
        t["target"] = config.sweep.target;
        if (!usable) {
            t["status"] = "empty_input";
        } else if (const auto hit = min_wear_for_target(curve, config.sweep.target)) {
            t["status"] = "ok";
            t["grid_wear"] = hit->grid_wear;
            t["interpolated"] = std::round(hit->interpolated * 10.0) / 10.0;
        } else {
            t["status"] = "not_attainable";
        }
        thresholds.push_back(t);
        if (usable) normalized.push_back(curve);
    }

    json doc;
    doc["metadata"] = meta_json(config, in.stamps);
    doc["wear_cost"] = wear_cost(config.battery);
    doc["thresholds"] = thresholds;

    if (!normalized.empty()) {
        const CurveComparison cmp = compare(normalized);
        std::string csv = meta;
        csv += "wear_cost,application,zone,normalized\n";
        for (std::size_t g = 0; g < cmp.wear_grid.size(); ++g) {
            for (std::size_t c = 0; c < normalized.size(); ++c) {
                csv += format_double(cmp.wear_grid[g]);
                csv += ',';
                csv += to_string(normalized[c].kind);
                csv += ',' + normalized[c].zone;
                csv += ',' + format_double(cmp.values[c][g]);
                csv += '\n';
            }
        }
        emit_file(config, "pput_comparison.csv", csv, log);

        json dom = json::array();
        for (std::size_t g = 0; g < cmp.wear_grid.size(); ++g) {
            json d;
            d["wear_cost"] = cmp.wear_grid[g];
            d["application"] = to_string(normalized[cmp.highest[g]].kind);
            d["zone"] = normalized[cmp.highest[g]].zone;
            dom.push_back(d);
        }
        doc["dominance"] = dom;
    }

    emit_json(config, "sweep_thresholds.json", doc, log);
    return 0;
}

int cmd_report(const RunConfig& config, std::ostream& log) {
    const int rc = cmd_validate(config, log);
    if (rc != 0) return rc;

    std::vector<Analysis> order;
    for (const Analysis a : config.analyses)
        if (std::find(order.begin(), order.end(), a) == order.end()) order.push_back(a);

    for (const Analysis a : order) {
        int code = 0;
        switch (a) {
            case Analysis::arbitrage: code = cmd_arbitrage(config, log); break;
            case Analysis::reserve: code = cmd_reserve(config, log); break;
            case Analysis::sweep: code = cmd_sweep(config, log); break;
        }
        if (code != 0) return code;
    }
    return 0;
}

}  // namespace bessmarket

#include "bessmarket/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

#include "bessmarket/util.hpp"

namespace bessmarket {

namespace {

constexpr std::string_view kEnergyHeader = "hour_start,value";
constexpr std::string_view kReserveHeader =
    "hour_start,band_price,band_up,band_down,energy_up,energy_down";

struct LineReader {
    std::string_view text;
    std::size_t pos = 0;
    long line_no = 0;

    std::optional<std::string_view> next() {
        while (pos < text.size()) {
            std::size_t end = text.find('\n', pos);
            if (end == std::string_view::npos) end = text.size();
            std::string_view line = text.substr(pos, end - pos);
            pos = end + 1;
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
            return line;
        }
        return std::nullopt;
    }
};

// Hour starts only: minute and second must be zero.
HourStamp parse_stamp_field(std::string_view field, long line_no) {
    const auto stamp = parse_hour_stamp(field);
    if (!stamp)
        throw Error(Errc::malformed_timestamp, "cannot parse '" + std::string(field) + "'",
                    line_no, "hour_start");
    const CivilDateTime local = stamp->local();
    if (local.minute != 0 || local.second != 0)
        throw Error(Errc::malformed_timestamp, "not an hour start: '" + std::string(field) + "'",
                    line_no, "hour_start");
    return *stamp;
}

double parse_value_field(std::string_view field, long line_no, const char* name) {
    const auto v = parse_double(field);
    if (!v)
        throw Error(Errc::malformed_value, "cannot parse '" + std::string(field) + "'", line_no,
                    name);
    return *v;
}

double mean_of(const std::vector<double>& values) {
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

double median_of(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double sample_std_of(const std::vector<double>& values, double mean) {
    const std::size_t n = values.size();
    if (n < 2) return 0.0;
    double acc = 0.0;
    for (double v : values) {
        const double d = v - mean;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(n - 1));
}

std::string group_key(const HourStamp& t, StatsGrouping grouping) {
    const CivilDateTime local = t.local();
    char buf[16];
    switch (grouping) {
        case StatsGrouping::annual:
            std::snprintf(buf, sizeof buf, "%04d", local.date.year);
            break;
        case StatsGrouping::monthly:
            std::snprintf(buf, sizeof buf, "%04d-%02d", local.date.year, local.date.month);
            break;
        case StatsGrouping::daily:
            std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", local.date.year, local.date.month,
                          local.date.day);
            break;
        case StatsGrouping::hour_of_day:
            std::snprintf(buf, sizeof buf, "%02d", local.hour);
            break;
    }
    return buf;
}

}  // namespace

std::string_view to_string(MarketKind kind) {
    switch (kind) {
        case MarketKind::day_ahead: return "day_ahead";
        case MarketKind::intraday_adjustment: return "intraday_adjustment";
        case MarketKind::tertiary_up: return "tertiary_up";
        case MarketKind::tertiary_down: return "tertiary_down";
        case MarketKind::deviation_mgmt_up: return "deviation_mgmt_up";
        case MarketKind::deviation_mgmt_down: return "deviation_mgmt_down";
        case MarketKind::imbalance_up: return "imbalance_up";
        case MarketKind::imbalance_down: return "imbalance_down";
        case MarketKind::secondary_band_price: return "secondary_band_price";
        case MarketKind::secondary_energy_up: return "secondary_energy_up";
        case MarketKind::secondary_energy_down: return "secondary_energy_down";
    }
    return "unknown";
}

std::optional<MarketKind> market_kind_from_string(std::string_view name) {
    static constexpr MarketKind kinds[] = {
        MarketKind::day_ahead,           MarketKind::intraday_adjustment,
        MarketKind::tertiary_up,         MarketKind::tertiary_down,
        MarketKind::deviation_mgmt_up,   MarketKind::deviation_mgmt_down,
        MarketKind::imbalance_up,        MarketKind::imbalance_down,
        MarketKind::secondary_band_price, MarketKind::secondary_energy_up,
        MarketKind::secondary_energy_down,
    };
    for (MarketKind k : kinds)
        if (to_string(k) == name) return k;
    return std::nullopt;
}

bool is_energy_price(MarketKind kind) { return kind != MarketKind::secondary_band_price; }

std::string_view to_string(ValidationProfile profile) {
    return profile == ValidationProfile::es_capped ? "es-capped" : "uncapped";
}

std::optional<ValidationProfile> validation_profile_from_string(std::string_view name) {
    if (name == "es-capped") return ValidationProfile::es_capped;
    if (name == "uncapped") return ValidationProfile::uncapped;
    return std::nullopt;
}

std::string_view to_string(StatsGrouping grouping) {
    switch (grouping) {
        case StatsGrouping::annual: return "annual";
        case StatsGrouping::monthly: return "monthly";
        case StatsGrouping::daily: return "daily";
        case StatsGrouping::hour_of_day: return "hour_of_day";
    }
    return "unknown";
}

DateRange HourlyPriceSeries::span() const {
    if (points.empty()) return DateRange{};
    return DateRange{points.front().t.local_date(), points.back().t.local_date()};
}

DateRange ReserveMarketSeries::span() const {
    if (hours.empty()) return DateRange{};
    return DateRange{hours.front().local_date(), hours.back().local_date()};
}

void validate_series(const HourlyPriceSeries& series) {
    for (std::size_t i = 1; i < series.points.size(); ++i) {
        const auto prev = series.points[i - 1].t.utc_sec;
        const auto cur = series.points[i].t.utc_sec;
        if (cur == prev)
            throw Error(Errc::duplicate_hour,
                        "duplicate hour " + format_hour_stamp(series.points[i].t));
        if (cur < prev)
            throw Error(Errc::malformed_timestamp,
                        "points not increasing at " + format_hour_stamp(series.points[i].t));
    }
}

std::vector<DayIndex> split_days(const HourlyPriceSeries& series) {
    std::vector<DayIndex> days;
    const auto& pts = series.points;
    std::size_t i = 0;
    while (i < pts.size()) {
        const CivilDate date = pts[i].t.local_date();
        std::size_t j = i;
        while (j < pts.size() && pts[j].t.local_date() == date) ++j;

        DayIndex day{date, i, j - i, false};
        if (day.count > 25)
            throw Error(Errc::invalid_day_length,
                        format_civil_date(date) + " has " + std::to_string(day.count) + " hours");

        bool consecutive = true;
        for (std::size_t k = i + 1; k < j; ++k)
            if (pts[k].t.utc_sec != pts[k - 1].t.utc_sec + 3600) {
                consecutive = false;
                break;
            }
        day.complete = day.count >= 23 && consecutive && pts[i].t.local_hour() == 0 &&
                       pts[j - 1].t.local_hour() == 23;
        days.push_back(day);
        i = j;
    }
    return days;
}

DaySlice day_slice(const HourlyPriceSeries& series, const DayIndex& day) {
    return DaySlice{day.date, series.market,
                    std::span<const HourPoint>(series.points).subspan(day.first, day.count),
                    day.complete};
}

std::vector<StatsRow> price_stats(const HourlyPriceSeries& series, StatsGrouping grouping,
                                  bool complete_days_only) {
    std::map<std::string, std::vector<double>> groups;
    if (complete_days_only) {
        for (const DayIndex& day : split_days(series)) {
            if (!day.complete) continue;
            for (std::size_t k = day.first; k < day.first + day.count; ++k)
                groups[group_key(series.points[k].t, grouping)].push_back(series.points[k].value);
        }
    } else {
        for (const HourPoint& p : series.points)
            groups[group_key(p.t, grouping)].push_back(p.value);
    }

    std::vector<StatsRow> rows;
    rows.reserve(groups.size());
    for (const auto& [key, values] : groups) {
        StatsRow row;
        row.group = key;
        row.n = values.size();
        row.mean = mean_of(values);
        row.median = median_of(values);
        row.stddev = sample_std_of(values, row.mean);
        rows.push_back(std::move(row));
    }
    return rows;
}

IngestResult ingest_csv(const std::string& path, MarketKind market, std::string zone,
                        ValidationProfile profile) {
    return ingest_csv_text(read_file(path), market, std::move(zone), profile, path);
}

IngestResult ingest_csv_text(std::string_view text, MarketKind market, std::string zone,
                             ValidationProfile profile, const std::string& origin) {
    IngestResult result;
    result.series.market = market;
    result.series.zone = std::move(zone);

    LineReader reader{text};
    bool header_seen = false;
    while (auto line = reader.next()) {
        if (line->empty() || (*line)[0] == '#') continue;
        if (!header_seen) {
            if (*line != kEnergyHeader)
                throw Error(Errc::schema_mismatch,
                            origin + ": expected header '" + std::string(kEnergyHeader) +
                                "', got '" + std::string(*line) + "'",
                            reader.line_no);
            header_seen = true;
            continue;
        }
        ++result.rows;
        const auto fields = split_csv_line(*line);
        if (fields.size() != 2)
            throw Error(Errc::schema_mismatch, origin + ": expected 2 fields", reader.line_no);

        const HourStamp stamp = parse_stamp_field(fields[0], reader.line_no);
        if (fields[1].empty()) {
            ++result.skipped;
            result.warnings.push_back({"Gap", reader.line_no,
                                       "missing value at " + format_hour_stamp(stamp)});
            continue;
        }
        const double value = parse_value_field(fields[1], reader.line_no, "value");

        if (!result.series.points.empty()) {
            const auto prev = result.series.points.back().t.utc_sec;
            if (stamp.utc_sec == prev)
                throw Error(Errc::duplicate_hour,
                            origin + ": duplicate hour " + format_hour_stamp(stamp),
                            reader.line_no, "hour_start");
            if (stamp.utc_sec < prev)
                throw Error(Errc::malformed_timestamp,
                            origin + ": timestamps not increasing at " + format_hour_stamp(stamp),
                            reader.line_no, "hour_start");
        }
        if (profile == ValidationProfile::es_capped && is_energy_price(market) &&
            (value < kEsPriceFloor || value > kEsPriceCap))
            throw Error(Errc::cap_violation,
                        origin + ": price " + format_double(value) + " outside [" +
                            format_double(kEsPriceFloor) + ", " + format_double(kEsPriceCap) + "]",
                        reader.line_no, "value");

        result.series.points.push_back({stamp, value});
    }
    if (!header_seen)
        throw Error(Errc::schema_mismatch, origin + ": missing header line");
    return result;
}

ReserveIngestResult ingest_reserve_csv(const std::string& path, std::string zone) {
    return ingest_reserve_csv_text(read_file(path), std::move(zone), path);
}

ReserveIngestResult ingest_reserve_csv_text(std::string_view text, std::string zone,
                                            const std::string& origin) {
    ReserveIngestResult result;
    result.series.zone = std::move(zone);
    auto& s = result.series;

    LineReader reader{text};
    bool header_seen = false;
    while (auto line = reader.next()) {
        if (line->empty() || (*line)[0] == '#') continue;
        if (!header_seen) {
            if (*line != kReserveHeader)
                throw Error(Errc::schema_mismatch,
                            origin + ": expected header '" + std::string(kReserveHeader) +
                                "', got '" + std::string(*line) + "'",
                            reader.line_no);
            header_seen = true;
            continue;
        }
        ++result.rows;
        const auto fields = split_csv_line(*line);
        if (fields.size() != 6)
            throw Error(Errc::misaligned_row,
                        origin + ": expected 6 fields, got " + std::to_string(fields.size()),
                        reader.line_no);
        for (std::size_t f = 1; f < 6; ++f)
            if (fields[f].empty())
                throw Error(Errc::misaligned_row, origin + ": missing field", reader.line_no,
                            std::string(split_csv_line(kReserveHeader)[f]));

        const HourStamp stamp = parse_stamp_field(fields[0], reader.line_no);
        if (!s.hours.empty()) {
            if (stamp.utc_sec == s.hours.back().utc_sec)
                throw Error(Errc::duplicate_hour,
                            origin + ": duplicate hour " + format_hour_stamp(stamp),
                            reader.line_no, "hour_start");
            if (stamp.utc_sec < s.hours.back().utc_sec)
                throw Error(Errc::malformed_timestamp,
                            origin + ": timestamps not increasing at " + format_hour_stamp(stamp),
                            reader.line_no, "hour_start");
        }

        const double band_price = parse_value_field(fields[1], reader.line_no, "band_price");
        double band_up = parse_value_field(fields[2], reader.line_no, "band_up");
        double band_down = parse_value_field(fields[3], reader.line_no, "band_down");
        double energy_up = parse_value_field(fields[4], reader.line_no, "energy_up");
        double energy_down = parse_value_field(fields[5], reader.line_no, "energy_down");

        if (band_price < 0.0)
            throw Error(Errc::negative_band_price,
                        origin + ": band price " + format_double(band_price), reader.line_no,
                        "band_price");
        if (band_up < 0.0)
            throw Error(Errc::misaligned_row, origin + ": negative upward band", reader.line_no,
                        "band_up");
        if (energy_up < 0.0)
            throw Error(Errc::misaligned_row, origin + ": negative upward energy", reader.line_no,
                        "energy_up");
        if (band_down > 0.0) {
            band_down = -band_down;
            result.warnings.push_back({"SignCoercion", reader.line_no, "band_down made negative"});
        }
        if (energy_down > 0.0) {
            energy_down = -energy_down;
            result.warnings.push_back(
                {"SignCoercion", reader.line_no, "energy_down made negative"});
        }
        if (energy_up > band_up)
            result.warnings.push_back({"EnergyExceedsBand", reader.line_no,
                                       "upward energy exceeds assigned band at " +
                                           format_hour_stamp(stamp)});
        if (-energy_down > -band_down)
            result.warnings.push_back({"EnergyExceedsBand", reader.line_no,
                                       "downward energy exceeds assigned band at " +
                                           format_hour_stamp(stamp)});

        s.hours.push_back(stamp);
        s.band_price.push_back(band_price);
        s.band_up.push_back(band_up);
        s.band_down.push_back(band_down);
        s.energy_up.push_back(energy_up);
        s.energy_down.push_back(energy_down);
    }
    if (!header_seen)
        throw Error(Errc::schema_mismatch, origin + ": missing header line");
    return result;
}

void write_series_csv(const HourlyPriceSeries& series, std::ostream& out) {
    out << kEnergyHeader << '\n';
    for (const HourPoint& p : series.points)
        out << format_hour_stamp(p.t) << ',' << format_double(p.value) << '\n';
}

std::string series_to_csv(const HourlyPriceSeries& series) {
    std::ostringstream ss;
    write_series_csv(series, ss);
    return ss.str();
}

void write_reserve_csv(const ReserveMarketSeries& series, std::ostream& out) {
    out << kReserveHeader << '\n';
    for (std::size_t i = 0; i < series.hours.size(); ++i) {
        out << format_hour_stamp(series.hours[i]) << ',' << format_double(series.band_price[i])
            << ',' << format_double(series.band_up[i]) << ',' << format_double(series.band_down[i])
            << ',' << format_double(series.energy_up[i]) << ','
            << format_double(series.energy_down[i]) << '\n';
    }
}

std::string reserve_to_csv(const ReserveMarketSeries& series) {
    std::ostringstream ss;
    write_reserve_csv(series, ss);
    return ss.str();
}

CoverageReport coverage(const HourlyPriceSeries& series) {
    CoverageReport report;
    report.points = series.points.size();
    if (series.points.empty()) return report;
    for (const DayIndex& day : split_days(series))
        ++(day.complete ? report.complete_days : report.incomplete_days);
    const std::int64_t span_hours =
        (series.points.back().t.utc_sec - series.points.front().t.utc_sec) / 3600 + 1;
    report.missing_hours = static_cast<std::size_t>(span_hours) - series.points.size();
    return report;
}

}  // namespace bessmarket

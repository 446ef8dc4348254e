#include "support.hpp"

#include <atomic>

#include <unistd.h>

namespace bessmarket::test {

namespace {

CivilDate last_sunday(int year, int month) {
    CivilDate d{year, month, days_in_month(year, month)};
    while (weekday(d) != 0) d.day -= 1;
    return d;
}

std::int64_t transition_utc(CivilDate d) {
    return days_from_civil(d) * 86400 + 3600;  // 01:00 UTC
}

}  // namespace

int madrid_offset_min(std::int64_t utc_sec) {
    const CivilDate utc_day = civil_from_days(
        utc_sec >= 0 ? utc_sec / 86400 : (utc_sec - 86399) / 86400);
    const int year = utc_day.year;
    const std::int64_t spring = transition_utc(last_sunday(year, 3));
    const std::int64_t fall = transition_utc(last_sunday(year, 10));
    return (utc_sec >= spring && utc_sec < fall) ? 120 : 60;
}

std::int64_t utc_of(CivilDate d, int hour) {
    return days_from_civil(d) * 86400 + static_cast<std::int64_t>(hour) * 3600;
}

std::int64_t madrid_day_start_utc(CivilDate local_day) {
    // local midnight never falls inside a Madrid transition (both happen at
    // 02:00/03:00 local), so one correction step settles the offset
    std::int64_t utc = utc_of(local_day, 0) - 60 * madrid_offset_min(utc_of(local_day, 0));
    utc = utc_of(local_day, 0) - 60 * madrid_offset_min(utc);
    return utc;
}

HourlyPriceSeries make_series_madrid(
    MarketKind kind, std::string zone, CivilDate first, CivilDate last,
    const std::function<double(std::size_t, const HourStamp&)>& value) {
    HourlyPriceSeries series;
    series.market = kind;
    series.zone = std::move(zone);
    const std::int64_t start = madrid_day_start_utc(first);
    const std::int64_t end = madrid_day_start_utc(next_day(last));
    std::size_t i = 0;
    for (std::int64_t utc = start; utc < end; utc += 3600, ++i) {
        const HourStamp t{utc, madrid_offset_min(utc)};
        series.points.push_back({t, value(i, t)});
    }
    return series;
}

HourlyPriceSeries make_series_fixed(
    MarketKind kind, std::string zone, CivilDate first_day, int first_hour, int n_hours,
    int offset_min, const std::function<double(std::size_t)>& value) {
    HourlyPriceSeries series;
    series.market = kind;
    series.zone = std::move(zone);
    const std::int64_t start = utc_of(first_day, first_hour) - 60 * offset_min;
    for (int i = 0; i < n_hours; ++i) {
        const HourStamp t{start + static_cast<std::int64_t>(i) * 3600, offset_min};
        series.points.push_back({t, value(static_cast<std::size_t>(i))});
    }
    return series;
}

ReserveMarketSeries make_reserve_madrid(std::string zone, CivilDate first, CivilDate last,
                                        const ReserveColumns& cols) {
    ReserveMarketSeries series;
    series.zone = std::move(zone);
    const std::int64_t start = madrid_day_start_utc(first);
    const std::int64_t end = madrid_day_start_utc(next_day(last));
    std::size_t i = 0;
    for (std::int64_t utc = start; utc < end; utc += 3600, ++i) {
        const HourStamp t{utc, madrid_offset_min(utc)};
        series.hours.push_back(t);
        series.band_price.push_back(cols.band_price(i, t));
        series.band_up.push_back(cols.band_up(i, t));
        series.band_down.push_back(-cols.band_down(i, t));
        series.energy_up.push_back(cols.energy_up(i, t));
        series.energy_down.push_back(-cols.energy_down(i, t));
    }
    return series;
}

TempDir::TempDir(const std::string& tag) {
    static std::atomic<unsigned> counter{0};
    const auto base = std::filesystem::temp_directory_path() / "bessmarket_tests";
    path_ = base / (tag + "_" + std::to_string(counter.fetch_add(1)) + "_" +
                    std::to_string(static_cast<unsigned>(::getpid())));
    std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
}

}  // namespace bessmarket::test

#pragma once

#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "bessmarket/calendar.hpp"
#include "bessmarket/market_data.hpp"

namespace bessmarket::test {

// Europe/Madrid clock rules: CET (+60) with CEST (+120) between the last
// Sundays of March and October, both switching at 01:00 UTC.
int madrid_offset_min(std::int64_t utc_sec);

std::int64_t utc_of(CivilDate d, int hour);

// UTC instant at which the given Madrid local day starts.
std::int64_t madrid_day_start_utc(CivilDate local_day);

// Hourly series covering the local days [first, last] under Madrid clock
// rules; transition days get 23 or 25 points. `value` sees the point index
// and its stamp.
HourlyPriceSeries make_series_madrid(
    MarketKind kind, std::string zone, CivilDate first, CivilDate last,
    const std::function<double(std::size_t, const HourStamp&)>& value);

// Hourly series with a fixed UTC offset, `n_hours` points starting at the
// given local day and hour.
HourlyPriceSeries make_series_fixed(
    MarketKind kind, std::string zone, CivilDate first_day, int first_hour, int n_hours,
    int offset_min, const std::function<double(std::size_t)>& value);

struct ReserveColumns {
    std::function<double(std::size_t, const HourStamp&)> band_price;
    std::function<double(std::size_t, const HourStamp&)> band_up;
    std::function<double(std::size_t, const HourStamp&)> band_down;  // magnitude
    std::function<double(std::size_t, const HourStamp&)> energy_up;
    std::function<double(std::size_t, const HourStamp&)> energy_down;  // magnitude
};

// Reserve series on the same Madrid hour grid; down columns are stored
// negative.
ReserveMarketSeries make_reserve_madrid(std::string zone, CivilDate first, CivilDate last,
                                        const ReserveColumns& cols);

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

// Unique writable directory, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string& tag);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

}  // namespace bessmarket::test

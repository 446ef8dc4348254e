#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bessmarket/calendar.hpp"
#include "bessmarket/errors.hpp"

namespace bessmarket {

enum class MarketKind {
    day_ahead,
    intraday_adjustment,
    tertiary_up,
    tertiary_down,
    deviation_mgmt_up,
    deviation_mgmt_down,
    imbalance_up,
    imbalance_down,
    secondary_band_price,
    secondary_energy_up,
    secondary_energy_down,
};

std::string_view to_string(MarketKind kind);
std::optional<MarketKind> market_kind_from_string(std::string_view name);

/// Unit semantics: secondary_band_price is EUR/MW, everything else EUR/MWh.
bool is_energy_price(MarketKind kind);

enum class ValidationProfile { es_capped, uncapped };

std::string_view to_string(ValidationProfile profile);
std::optional<ValidationProfile> validation_profile_from_string(std::string_view name);

// Regulatory bid limits enforced under the es_capped profile.
inline constexpr double kEsPriceFloor = 0.0;
inline constexpr double kEsPriceCap = 180.3;

struct HourPoint {
    HourStamp t;
    double value = 0.0;
};

/// Hourly prices for one market and zone. Points are strictly increasing in
/// UTC; missing hours are simply absent.
struct HourlyPriceSeries {
    MarketKind market = MarketKind::day_ahead;
    std::string zone;
    std::vector<HourPoint> points;

    [[nodiscard]] bool empty() const { return points.empty(); }
    [[nodiscard]] std::size_t size() const { return points.size(); }
    [[nodiscard]] DateRange span() const;  // local civil dates, inclusive
};

/// Throws unless points are strictly increasing in UTC (no duplicate hours).
void validate_series(const HourlyPriceSeries& series);

/// One local civil day of a series: points [first, first + count).
/// A complete day starts at local 00, ends at local 23, has consecutive
/// hours, and therefore 23, 24, or 25 of them (DST transitions).
struct DayIndex {
    CivilDate date;
    std::size_t first = 0;
    std::size_t count = 0;
    bool complete = false;
};

struct DaySlice {
    CivilDate date;
    MarketKind market = MarketKind::day_ahead;
    std::span<const HourPoint> points;
    bool complete = false;
};

/// Partitions every point into local civil days. Throws invalid_day_length
/// if any local date carries more than 25 hours.
std::vector<DayIndex> split_days(const HourlyPriceSeries& series);

DaySlice day_slice(const HourlyPriceSeries& series, const DayIndex& day);

enum class StatsGrouping { annual, monthly, daily, hour_of_day };

std::string_view to_string(StatsGrouping grouping);

struct StatsRow {
    std::string group;
    std::size_t n = 0;
    double mean = 0.0;
    double median = 0.0;
    double stddev = 0.0;  // sample (n-1); 0 when n < 2
};

/// Per-group mean/median/sample-std over local civil time. Empty groups are
/// omitted. With complete_days_only, points on days with missing hours are
/// excluded first.
std::vector<StatsRow> price_stats(const HourlyPriceSeries& series, StatsGrouping grouping,
                                  bool complete_days_only = false);

/// Secondary-reserve market data on one shared hour index. Downward band and
/// energy are stored as negative magnitudes.
struct ReserveMarketSeries {
    std::string zone;
    std::vector<HourStamp> hours;
    std::vector<double> band_price;   // EUR/MW, >= 0
    std::vector<double> band_up;      // MW, >= 0
    std::vector<double> band_down;    // MW, <= 0
    std::vector<double> energy_up;    // MWh, >= 0
    std::vector<double> energy_down;  // MWh, <= 0

    [[nodiscard]] bool empty() const { return hours.empty(); }
    [[nodiscard]] std::size_t size() const { return hours.size(); }
    [[nodiscard]] DateRange span() const;
};

struct IngestResult {
    HourlyPriceSeries series;
    std::vector<Warning> warnings;
    std::size_t rows = 0;     // data rows parsed
    std::size_t skipped = 0;  // rows skipped (explicit gaps), rows == points + skipped
};

/// Reads the `hour_start,value` schema. Lines starting with '#' are metadata
/// and ignored. Errors carry the 1-based file line and field name.
IngestResult ingest_csv(const std::string& path, MarketKind market, std::string zone,
                        ValidationProfile profile = ValidationProfile::uncapped);

/// Same contract as ingest_csv, reading from an in-memory buffer. `origin`
/// names the source in error messages.
IngestResult ingest_csv_text(std::string_view text, MarketKind market, std::string zone,
                             ValidationProfile profile, const std::string& origin);

struct ReserveIngestResult {
    ReserveMarketSeries series;
    std::vector<Warning> warnings;
    std::size_t rows = 0;
    std::size_t skipped = 0;
};

/// Reads `hour_start,band_price,band_up,band_down,energy_up,energy_down`.
/// Positive downward magnitudes are coerced negative with a SignCoercion
/// warning; hours where |energy| exceeds the assigned band are warned about.
ReserveIngestResult ingest_reserve_csv(const std::string& path, std::string zone = "ES");
ReserveIngestResult ingest_reserve_csv_text(std::string_view text, std::string zone,
                                            const std::string& origin);

void write_series_csv(const HourlyPriceSeries& series, std::ostream& out);
std::string series_to_csv(const HourlyPriceSeries& series);

void write_reserve_csv(const ReserveMarketSeries& series, std::ostream& out);
std::string reserve_to_csv(const ReserveMarketSeries& series);

struct CoverageReport {
    std::size_t points = 0;
    std::size_t complete_days = 0;
    std::size_t incomplete_days = 0;
    std::size_t missing_hours = 0;  // absent hours between first and last point
};

CoverageReport coverage(const HourlyPriceSeries& series);

}  // namespace bessmarket

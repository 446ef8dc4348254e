#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace bessmarket {

/// Proleptic Gregorian calendar date.
struct CivilDate {
    int year = 1970;
    int month = 1;  // 1..12
    int day = 1;    // 1..31

    auto operator<=>(const CivilDate&) const = default;
};

/// Days since 1970-01-01.
std::int64_t days_from_civil(CivilDate d);
CivilDate civil_from_days(std::int64_t z);

bool is_valid_date(CivilDate d);
int days_in_month(int year, int month);

/// 0 = Sunday .. 6 = Saturday.
int weekday(CivilDate d);

CivilDate next_day(CivilDate d);

struct CivilDateTime {
    CivilDate date;
    int hour = 0;
    int minute = 0;
    int second = 0;
};

/// Start of one market hour: the UTC instant plus the local UTC offset in
/// force at that instant. Local civil time is utc_sec + offset_min * 60.
/// Two stamps denote the same hour iff their UTC instants are equal.
struct HourStamp {
    std::int64_t utc_sec = 0;
    int offset_min = 0;

    [[nodiscard]] CivilDateTime local() const;
    [[nodiscard]] CivilDate local_date() const;
    [[nodiscard]] int local_hour() const;

    friend bool operator==(const HourStamp& a, const HourStamp& b) {
        return a.utc_sec == b.utc_sec && a.offset_min == b.offset_min;
    }
};

/// Parses strict ISO-8601 `YYYY-MM-DDTHH:MM:SS` followed by `Z` or a numeric
/// offset `+HH:MM`/`-HH:MM`. Returns nullopt on any deviation.
std::optional<HourStamp> parse_hour_stamp(std::string_view text);

/// Inverse of parse_hour_stamp; always emits an explicit numeric offset.
std::string format_hour_stamp(const HourStamp& t);

std::optional<CivilDate> parse_civil_date(std::string_view text);  // YYYY-MM-DD
std::string format_civil_date(CivilDate d);

/// Inclusive range of local civil dates.
struct DateRange {
    CivilDate first;
    CivilDate last;

    [[nodiscard]] bool contains(CivilDate d) const { return first <= d && d <= last; }
    friend bool operator==(const DateRange&, const DateRange&) = default;
};

}  // namespace bessmarket

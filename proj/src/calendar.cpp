#include "bessmarket/calendar.hpp"

#include <array>
#include <charconv>
#include <cstdio>

namespace bessmarket {

namespace {

bool is_leap(int y) { return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0); }

// Parses exactly `width` digits starting at text[pos]; advances pos.
bool take_digits(std::string_view text, std::size_t& pos, int width, int& out) {
    if (pos + width > text.size()) return false;
    int v = 0;
    for (int i = 0; i < width; ++i) {
        char c = text[pos + i];
        if (c < '0' || c > '9') return false;
        v = v * 10 + (c - '0');
    }
    pos += width;
    out = v;
    return true;
}

bool take_char(std::string_view text, std::size_t& pos, char expected) {
    if (pos >= text.size() || text[pos] != expected) return false;
    ++pos;
    return true;
}

}  // namespace

int days_in_month(int year, int month) {
    static constexpr std::array<int, 12> lengths = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (month < 1 || month > 12) return 0;
    if (month == 2 && is_leap(year)) return 29;
    return lengths[static_cast<std::size_t>(month - 1)];
}

bool is_valid_date(CivilDate d) {
    return d.month >= 1 && d.month <= 12 && d.day >= 1 && d.day <= days_in_month(d.year, d.month);
}

std::int64_t days_from_civil(CivilDate d) {
    // Howard Hinnant's algorithm, days relative to 1970-01-01.
    auto y = static_cast<std::int64_t>(d.year);
    const unsigned m = static_cast<unsigned>(d.month);
    const unsigned day = static_cast<unsigned>(d.day);
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + day - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

CivilDate civil_from_days(std::int64_t z) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    const unsigned day = doy - (153 * mp + 2) / 5 + 1;
    const unsigned m = mp + (mp < 10 ? 3 : -9);
    return CivilDate{static_cast<int>(y + (m <= 2)), static_cast<int>(m), static_cast<int>(day)};
}

int weekday(CivilDate d) {
    const std::int64_t z = days_from_civil(d);
    return static_cast<int>(z >= -4 ? (z + 4) % 7 : (z + 5) % 7 + 6);
}

CivilDate next_day(CivilDate d) { return civil_from_days(days_from_civil(d) + 1); }

CivilDateTime HourStamp::local() const {
    const std::int64_t local_sec = utc_sec + static_cast<std::int64_t>(offset_min) * 60;
    std::int64_t days = local_sec / 86400;
    std::int64_t rem = local_sec % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    CivilDateTime out;
    out.date = civil_from_days(days);
    out.hour = static_cast<int>(rem / 3600);
    out.minute = static_cast<int>((rem % 3600) / 60);
    out.second = static_cast<int>(rem % 60);
    return out;
}

CivilDate HourStamp::local_date() const { return local().date; }

int HourStamp::local_hour() const { return local().hour; }

std::optional<HourStamp> parse_hour_stamp(std::string_view text) {
    std::size_t pos = 0;
    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    bool ok = take_digits(text, pos, 4, year) && take_char(text, pos, '-') &&
              take_digits(text, pos, 2, month) && take_char(text, pos, '-') &&
              take_digits(text, pos, 2, day) && take_char(text, pos, 'T') &&
              take_digits(text, pos, 2, hour) && take_char(text, pos, ':') &&
              take_digits(text, pos, 2, minute) && take_char(text, pos, ':') &&
              take_digits(text, pos, 2, second);
    if (!ok) return std::nullopt;

    int offset_min = 0;
    if (pos < text.size() && text[pos] == 'Z') {
        ++pos;
    } else {
        if (pos >= text.size()) return std::nullopt;
        const char sign = text[pos];
        if (sign != '+' && sign != '-') return std::nullopt;
        ++pos;
        int oh = 0, om = 0;
        if (!take_digits(text, pos, 2, oh) || !take_char(text, pos, ':') ||
            !take_digits(text, pos, 2, om))
            return std::nullopt;
        offset_min = oh * 60 + om;
        if (sign == '-') offset_min = -offset_min;
        if (offset_min < -18 * 60 || offset_min > 18 * 60) return std::nullopt;
    }
    if (pos != text.size()) return std::nullopt;

    const CivilDate date{year, month, day};
    if (!is_valid_date(date) || hour > 23 || minute > 59 || second > 59) return std::nullopt;

    const std::int64_t local_sec =
        days_from_civil(date) * 86400 + hour * 3600 + minute * 60 + second;
    return HourStamp{local_sec - static_cast<std::int64_t>(offset_min) * 60, offset_min};
}

std::string format_hour_stamp(const HourStamp& t) {
    const CivilDateTime l = t.local();
    const int om = t.offset_min;
    const char sign = om < 0 ? '-' : '+';
    const int abs_om = om < 0 ? -om : om;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d%c%02d:%02d", l.date.year,
                  l.date.month, l.date.day, l.hour, l.minute, l.second, sign, abs_om / 60,
                  abs_om % 60);
    return buf;
}

std::optional<CivilDate> parse_civil_date(std::string_view text) {
    std::size_t pos = 0;
    int year = 0, month = 0, day = 0;
    bool ok = take_digits(text, pos, 4, year) && take_char(text, pos, '-') &&
              take_digits(text, pos, 2, month) && take_char(text, pos, '-') &&
              take_digits(text, pos, 2, day);
    if (!ok || pos != text.size()) return std::nullopt;
    const CivilDate d{year, month, day};
    if (!is_valid_date(d)) return std::nullopt;
    return d;
}

std::string format_civil_date(CivilDate d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", d.year, d.month, d.day);
    return buf;
}

}  // namespace bessmarket

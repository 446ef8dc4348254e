#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "bessmarket/calendar.hpp"
#include "bessmarket/errors.hpp"
#include "bessmarket/market_data.hpp"

namespace bessmarket {

struct ReserveIndicators {
    std::string band_price;
    std::string band_up;
    std::string band_down;
    std::string energy_up;
    std::string energy_down;

    bool complete() const {
        return !band_price.empty() && !band_up.empty() && !band_down.empty() &&
               !energy_up.empty() && !energy_down.empty();
    }
};

struct DataSourceConfig {
    std::string base_url;
    std::map<MarketKind, std::string> indicators;
    ReserveIndicators reserve;
    std::string token_env = "MARKET_API_TOKEN";
    bool requires_token = true;
    std::filesystem::path cache_dir = "cache";
    long request_delay_ms = 0;
};

struct CacheEntry {
    std::string indicator;
    std::string label;  // directory name under the zone: market or reserve component
    std::string zone;
    DateRange span;
    std::filesystem::path raw_path;
    std::filesystem::path csv_path;
    std::filesystem::path meta_path;
    bool from_cache = false;
    std::size_t rows = 0;
    std::vector<Warning> warnings;
};

struct FetchStats {
    long network_requests = 0;
};

/// Decoded provider payload: one indicator with hourly values.
struct Payload {
    std::string id;
    std::string name;
    std::vector<HourPoint> values;  // sorted by UTC hour
};

/// Throws Errc::schema_drift when the document does not match the expected
/// shape ({"indicator": {"id", "name", "values": [{"datetime", "value"}]}}).
Payload parse_payload(const std::string& json_text, const std::string& origin);

struct ConvertResult {
    std::string csv;
    std::size_t rows = 0;
    std::vector<Warning> warnings;  // one Gap warning per hole in the hour grid
};

/// Pure payload-to-CSV conversion; both fetch and verify_cache go through it.
ConvertResult convert_payload_to_csv(const std::string& json_text, const std::string& origin);

/// Cache-first fetch of one market's hourly series. Only a cache miss touches
/// the network (and therefore needs the API token).
CacheEntry fetch(const DataSourceConfig& config, MarketKind market, const std::string& zone,
                 const DateRange& span, FetchStats* stats = nullptr);

/// Fetches the five secondary-reserve component indicators and joins them on
/// the common hour grid into one five-column CSV. Downward magnitudes are
/// stored negative.
CacheEntry fetch_reserve(const DataSourceConfig& config, const std::string& zone,
                         const DateRange& span, FetchStats* stats = nullptr);

enum class VerifyStatus { ok, mismatch, unverifiable };

std::string_view to_string(VerifyStatus status);

struct VerifyEntry {
    std::filesystem::path csv_path;
    VerifyStatus status = VerifyStatus::ok;
    std::string note;
};

struct VerifyReport {
    std::vector<VerifyEntry> entries;

    bool all_ok() const {
        for (const auto& e : entries)
            if (e.status != VerifyStatus::ok) return false;
        return true;
    }
};

/// Re-derives every cached CSV from its raw payloads and compares bytes.
VerifyReport verify_cache(const DataSourceConfig& config);

}  // namespace bessmarket

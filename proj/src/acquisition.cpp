#include "bessmarket/acquisition.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdlib>
#include <thread>
#include <unordered_map>
#include <utility>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "bessmarket/util.hpp"

namespace bessmarket {

namespace fs = std::filesystem;
using nlohmann::json;

std::string_view to_string(VerifyStatus status) {
    switch (status) {
        case VerifyStatus::ok: return "ok";
        case VerifyStatus::mismatch: return "mismatch";
        case VerifyStatus::unverifiable: return "unverifiable";
    }
    return "?";
}

namespace {

// accepts optional fractional seconds, which the provider emits and the
// strict parser does not
std::optional<HourStamp> parse_payload_datetime(std::string_view text) {
    if (auto t = parse_hour_stamp(text)) return t;
    const auto dot = text.find('.');
    if (dot == std::string_view::npos) return std::nullopt;
    auto rest = text.substr(dot + 1);
    std::size_t digits = 0;
    while (digits < rest.size() && rest[digits] >= '0' && rest[digits] <= '9') ++digits;
    if (digits == 0) return std::nullopt;
    std::string trimmed(text.substr(0, dot));
    trimmed.append(rest.substr(digits));
    return parse_hour_stamp(trimmed);
}

std::string id_to_string(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    return {};
}

}  // namespace

Payload parse_payload(const std::string& json_text, const std::string& origin) {
    json doc = json::parse(json_text, nullptr, false);
    if (doc.is_discarded())
        throw Error(Errc::schema_drift, origin + ": payload is not valid JSON");
    if (!doc.is_object() || !doc.contains("indicator") || !doc["indicator"].is_object())
        throw Error(Errc::schema_drift, origin + ": missing \"indicator\" object");
    const json& ind = doc["indicator"];
    if (!ind.contains("values") || !ind["values"].is_array())
        throw Error(Errc::schema_drift, origin + ": missing \"values\" array");

    Payload payload;
    if (ind.contains("id")) payload.id = id_to_string(ind["id"]);
    if (ind.contains("name") && ind["name"].is_string()) payload.name = ind["name"];

    long row = 0;
    for (const json& v : ind["values"]) {
        ++row;
        if (!v.is_object())
            throw Error(Errc::schema_drift, origin + ": value entry is not an object", row);
        if (!v.contains("datetime") || !v["datetime"].is_string())
            throw Error(Errc::schema_drift, origin + ": value entry without datetime", row,
                        "datetime");
        const auto t = parse_payload_datetime(v["datetime"].get<std::string>());
        if (!t)
            throw Error(Errc::schema_drift,
                        origin + ": unparseable datetime \"" +
                            v["datetime"].get<std::string>() + "\"",
                        row, "datetime");
        if (!v.contains("value"))
            throw Error(Errc::schema_drift, origin + ": value entry without value", row, "value");
        if (v["value"].is_null()) continue;
        if (!v["value"].is_number())
            throw Error(Errc::schema_drift, origin + ": non-numeric value", row, "value");
        payload.values.push_back({*t, v["value"].get<double>()});
    }

    std::sort(payload.values.begin(), payload.values.end(),
              [](const HourPoint& a, const HourPoint& b) { return a.t.utc_sec < b.t.utc_sec; });
    for (std::size_t i = 1; i < payload.values.size(); ++i)
        if (payload.values[i].t.utc_sec == payload.values[i - 1].t.utc_sec)
            throw Error(Errc::duplicate_hour,
                        origin + ": duplicate hour " + format_hour_stamp(payload.values[i].t));
    return payload;
}

ConvertResult convert_payload_to_csv(const std::string& json_text, const std::string& origin) {
    const Payload payload = parse_payload(json_text, origin);
    ConvertResult out;
    out.rows = payload.values.size();
    std::string csv = "hour_start,value\n";
    for (std::size_t i = 0; i < payload.values.size(); ++i) {
        const auto& p = payload.values[i];
        if (i > 0) {
            const long long gap = (p.t.utc_sec - payload.values[i - 1].t.utc_sec) / 3600 - 1;
            if (gap > 0)
                out.warnings.push_back({"Gap", static_cast<long>(i),
                                        std::to_string(gap) + " missing hour(s) before " +
                                            format_hour_stamp(p.t)});
        }
        csv += format_hour_stamp(p.t);
        csv += ',';
        csv += format_double(p.value);
        csv += '\n';
    }
    out.csv = std::move(csv);
    return out;
}

namespace {

struct SplitUrl {
    std::string client_base;  // scheme://host[:port]
    std::string path_prefix;  // possibly empty, no trailing slash
};

SplitUrl split_base_url(const std::string& base_url) {
    const auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos)
        throw Error(Errc::config_error, "base_url must include a scheme: " + base_url);
    const auto path_start = base_url.find('/', scheme_end + 3);
    SplitUrl out;
    if (path_start == std::string::npos) {
        out.client_base = base_url;
    } else {
        out.client_base = base_url.substr(0, path_start);
        out.path_prefix = base_url.substr(path_start);
        while (!out.path_prefix.empty() && out.path_prefix.back() == '/')
            out.path_prefix.pop_back();
    }
    return out;
}

std::string span_stem(const DateRange& span) {
    return format_civil_date(span.first) + "_" + format_civil_date(span.last);
}

std::string http_get(const DataSourceConfig& config, const std::string& indicator,
                     const std::string& zone, const DateRange& span, FetchStats* stats) {
    const char* token = std::getenv(config.token_env.c_str());
    if (config.requires_token && (token == nullptr || *token == '\0'))
        throw Error(Errc::auth_missing,
                    "API token environment variable " + config.token_env + " is not set");

    const SplitUrl url = split_base_url(config.base_url);
    const std::string path = url.path_prefix + "/indicators/" + indicator +
                             "?start=" + format_civil_date(span.first) +
                             "&end=" + format_civil_date(span.last) + "&zone=" + zone;

    if (stats != nullptr && stats->network_requests > 0 && config.request_delay_ms > 0)
        std::this_thread::sleep_for(std::chrono::milliseconds(config.request_delay_ms));

    httplib::Client client(url.client_base);
    client.set_connection_timeout(30);
    client.set_read_timeout(60);
    httplib::Headers headers;
    if (token != nullptr && *token != '\0') headers.emplace("x-api-key", token);

    auto res = client.Get(path, headers);
    if (stats != nullptr) ++stats->network_requests;
    if (!res)
        throw Error(Errc::http_error, "GET " + url.client_base + path + " failed: " +
                                          httplib::to_string(res.error()));
    if (res->status != 200) {
        std::string excerpt = res->body.substr(0, 200);
        throw Error(Errc::http_error, "GET " + url.client_base + path + " -> " +
                                          std::to_string(res->status) + ": " + excerpt);
    }
    return res->body;
}

json read_meta(const fs::path& path) {
    json meta = json::parse(read_file(path.string()), nullptr, false);
    if (meta.is_discarded() || !meta.is_object())
        throw Error(Errc::io_error, "unreadable cache metadata: " + path.string());
    return meta;
}

CacheEntry fetch_indicator(const DataSourceConfig& config, const std::string& indicator,
                           const std::string& label, const std::string& zone,
                           const DateRange& span, FetchStats* stats) {
    CacheEntry entry;
    entry.indicator = indicator;
    entry.label = label;
    entry.zone = zone;
    entry.span = span;
    const fs::path dir = config.cache_dir / zone / label;
    const std::string stem = span_stem(span);
    entry.raw_path = dir / (stem + ".raw");
    entry.csv_path = dir / (stem + ".csv");
    entry.meta_path = dir / (stem + ".meta.json");

    if (fs::exists(entry.raw_path) && fs::exists(entry.csv_path) && fs::exists(entry.meta_path)) {
        entry.from_cache = true;
        const json meta = read_meta(entry.meta_path);
        if (meta.contains("rows") && meta["rows"].is_number())
            entry.rows = meta["rows"].get<std::size_t>();
        return entry;
    }

    const std::string body = http_get(config, indicator, zone, span, stats);
    ConvertResult converted = convert_payload_to_csv(body, label + "/" + stem);

    write_file_atomic(entry.raw_path.string(), body);
    write_file_atomic(entry.csv_path.string(), converted.csv);
    json meta;
    meta["kind"] = "single";
    meta["indicator"] = indicator;
    meta["label"] = label;
    meta["zone"] = zone;
    meta["start"] = format_civil_date(span.first);
    meta["end"] = format_civil_date(span.last);
    meta["rows"] = converted.rows;
    meta["raw_fnv1a"] = fnv1a_hex(body);
    meta["csv_fnv1a"] = fnv1a_hex(converted.csv);
    write_file_atomic(entry.meta_path.string(), meta.dump(2) + "\n");

    entry.rows = converted.rows;
    entry.warnings = std::move(converted.warnings);
    return entry;
}

struct JoinResult {
    ReserveMarketSeries series;
    std::vector<Warning> warnings;
};

JoinResult join_reserve(const Payload& band_price, const Payload& band_up,
                        const Payload& band_down, const Payload& energy_up,
                        const Payload& energy_down, const std::string& zone) {
    struct Component {
        const Payload* payload;
        const char* name;
    };
    const Component components[] = {{&band_price, "band_price"},
                                    {&band_up, "band_up"},
                                    {&band_down, "band_down"},
                                    {&energy_up, "energy_up"},
                                    {&energy_down, "energy_down"}};

    std::unordered_map<long long, int> presence;
    for (const auto& c : components)
        for (const auto& p : c.payload->values) ++presence[p.t.utc_sec];

    JoinResult out;
    out.series.zone = zone;
    for (const auto& c : components) {
        const long missing = static_cast<long>(presence.size()) -
                             static_cast<long>(c.payload->values.size());
        if (missing > 0)
            out.warnings.push_back({"Gap", -1,
                                    std::string(c.name) + " missing " + std::to_string(missing) +
                                        " hour(s) present in other components"});
    }

    std::vector<const HourPoint*> base;
    for (const auto& p : band_price.values)
        if (presence[p.t.utc_sec] == 5) base.push_back(&p);

    auto lookup = [](const Payload& p) {
        std::unordered_map<long long, double> m;
        m.reserve(p.values.size());
        for (const auto& v : p.values) m.emplace(v.t.utc_sec, v.value);
        return m;
    };
    const auto bu = lookup(band_up);
    const auto bd = lookup(band_down);
    const auto eu = lookup(energy_up);
    const auto ed = lookup(energy_down);

    long coerced_band_down = 0;
    long coerced_energy_down = 0;
    for (const HourPoint* p : base) {
        const double price = p->value;
        if (price < 0.0)
            throw Error(Errc::negative_band_price,
                        "negative band price at " + format_hour_stamp(p->t));
        const double up_mw = bu.at(p->t.utc_sec);
        const double up_mwh = eu.at(p->t.utc_sec);
        if (up_mw < 0.0 || up_mwh < 0.0)
            throw Error(Errc::inconsistent_reserve_data,
                        "negative upward band or energy at " + format_hour_stamp(p->t));
        double down_mw = bd.at(p->t.utc_sec);
        double down_mwh = ed.at(p->t.utc_sec);
        if (down_mw > 0.0) {
            down_mw = -down_mw;
            ++coerced_band_down;
        }
        if (down_mwh > 0.0) {
            down_mwh = -down_mwh;
            ++coerced_energy_down;
        }
        out.series.hours.push_back(p->t);
        out.series.band_price.push_back(price);
        out.series.band_up.push_back(up_mw);
        out.series.band_down.push_back(down_mw);
        out.series.energy_up.push_back(up_mwh);
        out.series.energy_down.push_back(down_mwh);
    }

    if (coerced_band_down > 0)
        out.warnings.push_back({"SignCoercion", -1,
                                "band_down stored negated for " +
                                    std::to_string(coerced_band_down) + " hour(s)"});
    if (coerced_energy_down > 0)
        out.warnings.push_back({"SignCoercion", -1,
                                "energy_down stored negated for " +
                                    std::to_string(coerced_energy_down) + " hour(s)"});
    return out;
}

const std::array<std::pair<const char*, std::string ReserveIndicators::*>, 5> kReserveParts = {{
    {"reserve_band_price", &ReserveIndicators::band_price},
    {"reserve_band_up", &ReserveIndicators::band_up},
    {"reserve_band_down", &ReserveIndicators::band_down},
    {"reserve_energy_up", &ReserveIndicators::energy_up},
    {"reserve_energy_down", &ReserveIndicators::energy_down},
}};

}  // namespace

CacheEntry fetch(const DataSourceConfig& config, MarketKind market, const std::string& zone,
                 const DateRange& span, FetchStats* stats) {
    const auto it = config.indicators.find(market);
    if (it == config.indicators.end() || it->second.empty())
        throw Error(Errc::config_error,
                    "no indicator configured for market " + std::string(to_string(market)));
    return fetch_indicator(config, it->second, std::string(to_string(market)), zone, span, stats);
}

CacheEntry fetch_reserve(const DataSourceConfig& config, const std::string& zone,
                         const DateRange& span, FetchStats* stats) {
    if (!config.reserve.complete())
        throw Error(Errc::config_error, "secondary reserve needs all five indicator ids");

    CacheEntry entry;
    entry.indicator = config.reserve.band_price;
    entry.label = "secondary_reserve";
    entry.zone = zone;
    entry.span = span;
    const fs::path dir = config.cache_dir / zone / entry.label;
    const std::string stem = span_stem(span);
    entry.csv_path = dir / (stem + ".csv");
    entry.meta_path = dir / (stem + ".meta.json");

    if (fs::exists(entry.csv_path) && fs::exists(entry.meta_path)) {
        entry.from_cache = true;
        const json meta = read_meta(entry.meta_path);
        if (meta.contains("rows") && meta["rows"].is_number())
            entry.rows = meta["rows"].get<std::size_t>();
        return entry;
    }

    std::array<CacheEntry, 5> parts;
    std::array<Payload, 5> payloads;
    for (std::size_t i = 0; i < kReserveParts.size(); ++i) {
        const auto& [label, member] = kReserveParts[i];
        parts[i] = fetch_indicator(config, config.reserve.*member, label, zone, span, stats);
        payloads[i] = parse_payload(read_file(parts[i].raw_path.string()), label);
    }

    JoinResult joined =
        join_reserve(payloads[0], payloads[1], payloads[2], payloads[3], payloads[4], zone);
    const std::string csv = reserve_to_csv(joined.series);
    write_file_atomic(entry.csv_path.string(), csv);

    json meta;
    meta["kind"] = "reserve_join";
    meta["zone"] = zone;
    meta["start"] = format_civil_date(span.first);
    meta["end"] = format_civil_date(span.last);
    meta["rows"] = joined.series.hours.size();
    meta["csv_fnv1a"] = fnv1a_hex(csv);
    json comps = json::object();
    for (std::size_t i = 0; i < kReserveParts.size(); ++i) {
        json c;
        c["indicator"] = parts[i].indicator;
        c["raw"] = fs::relative(parts[i].raw_path, config.cache_dir).generic_string();
        comps[kReserveParts[i].first] = c;
    }
    meta["components"] = comps;
    write_file_atomic(entry.meta_path.string(), meta.dump(2) + "\n");

    entry.rows = joined.series.hours.size();
    entry.warnings = std::move(joined.warnings);
    for (const auto& part : parts)
        for (const auto& w : part.warnings) entry.warnings.push_back(w);
    return entry;
}

VerifyReport verify_cache(const DataSourceConfig& config) {
    VerifyReport report;
    if (!fs::exists(config.cache_dir)) return report;

    std::vector<fs::path> metas;
    for (const auto& e : fs::recursive_directory_iterator(config.cache_dir)) {
        if (!e.is_regular_file()) continue;
        const std::string name = e.path().filename().string();
        if (name.size() > 10 && name.ends_with(".meta.json")) metas.push_back(e.path());
    }
    std::sort(metas.begin(), metas.end());

    for (const auto& meta_path : metas) {
        VerifyEntry entry;
        const std::string stem = meta_path.filename().string().substr(
            0, meta_path.filename().string().size() - std::string(".meta.json").size());
        entry.csv_path = meta_path.parent_path() / (stem + ".csv");
        try {
            const json meta = read_meta(meta_path);
            const std::string kind = meta.value("kind", "single");
            std::string expected;
            if (kind == "single") {
                const fs::path raw = meta_path.parent_path() / (stem + ".raw");
                if (!fs::exists(raw)) {
                    entry.status = VerifyStatus::unverifiable;
                    entry.note = "raw payload missing";
                    report.entries.push_back(std::move(entry));
                    continue;
                }
                expected = convert_payload_to_csv(read_file(raw.string()), stem).csv;
            } else if (kind == "reserve_join") {
                std::array<Payload, 5> payloads;
                bool missing = false;
                for (std::size_t i = 0; i < kReserveParts.size(); ++i) {
                    const char* label = kReserveParts[i].first;
                    if (!meta.contains("components") || !meta["components"].contains(label)) {
                        missing = true;
                        break;
                    }
                    const fs::path raw =
                        config.cache_dir /
                        fs::path(meta["components"][label]["raw"].get<std::string>());
                    if (!fs::exists(raw)) {
                        missing = true;
                        break;
                    }
                    payloads[i] = parse_payload(read_file(raw.string()), label);
                }
                if (missing) {
                    entry.status = VerifyStatus::unverifiable;
                    entry.note = "component payload missing";
                    report.entries.push_back(std::move(entry));
                    continue;
                }
                const std::string zone = meta.value("zone", "");
                expected = reserve_to_csv(join_reserve(payloads[0], payloads[1], payloads[2],
                                                       payloads[3], payloads[4], zone)
                                              .series);
            } else {
                entry.status = VerifyStatus::unverifiable;
                entry.note = "unknown cache entry kind: " + kind;
                report.entries.push_back(std::move(entry));
                continue;
            }

            if (!fs::exists(entry.csv_path)) {
                entry.status = VerifyStatus::mismatch;
                entry.note = "derived CSV missing";
            } else if (read_file(entry.csv_path.string()) != expected) {
                entry.status = VerifyStatus::mismatch;
                entry.note = "derived CSV differs from payload";
            } else {
                entry.status = VerifyStatus::ok;
            }
        } catch (const Error& err) {
            entry.status = VerifyStatus::unverifiable;
            entry.note = err.what();
        }
        report.entries.push_back(std::move(entry));
    }
    return report;
}

}  // namespace bessmarket

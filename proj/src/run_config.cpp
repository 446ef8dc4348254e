#include "bessmarket/run_config.hpp"

#include <initializer_list>

#include <nlohmann/json.hpp>

#include "bessmarket/errors.hpp"
#include "bessmarket/sweep.hpp"
#include "bessmarket/util.hpp"

namespace bessmarket {

namespace fs = std::filesystem;
using nlohmann::json;

bool DatasetSpec::is_market() const {
    return market_kind_from_string(kind).has_value();
}

std::optional<MarketKind> DatasetSpec::market() const {
    return market_kind_from_string(kind);
}

std::string_view to_string(Analysis a) {
    switch (a) {
        case Analysis::arbitrage: return "arbitrage";
        case Analysis::reserve: return "reserve";
        case Analysis::sweep: return "sweep";
    }
    return "?";
}

ValidationProfile RunConfig::profile_for(const std::string& zone) const {
    const auto it = zone_profiles.find(zone);
    if (it != zone_profiles.end()) return it->second;
    return zone == "ES" ? ValidationProfile::es_capped : ValidationProfile::uncapped;
}

std::vector<const DatasetSpec*> RunConfig::datasets_of(const std::string& kind) const {
    std::vector<const DatasetSpec*> out;
    for (const auto& d : datasets)
        if (d.kind == kind) out.push_back(&d);
    return out;
}

const DatasetSpec* RunConfig::first_dataset(const std::string& kind,
                                            const std::string& zone) const {
    for (const auto& d : datasets)
        if (d.kind == kind && (zone.empty() || d.zone == zone)) return &d;
    return nullptr;
}

std::filesystem::path RunConfig::resolved_path(const DatasetSpec& spec) const {
    if (!spec.path.empty())
        return spec.path.is_absolute() ? spec.path : base_dir / spec.path;
    const std::string stem =
        format_civil_date(spec.fetch_span->first) + "_" + format_civil_date(spec.fetch_span->last);
    return source.cache_dir / spec.zone / spec.kind / (stem + ".csv");
}

namespace {

[[noreturn]] void fail(const std::string& message) {
    throw Error(Errc::config_error, message);
}

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const auto k : allowed)
            if (it.key() == k) {
                known = true;
                break;
            }
        if (!known) fail(where + ": unknown key \"" + it.key() + "\"");
    }
}

double require_number(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_number()) fail(where + ": \"" + key + "\" must be a number");
    return obj[key].get<double>();
}

std::string require_string(const json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key) || !obj[key].is_string()) fail(where + ": \"" + key + "\" must be a string");
    return obj[key].get<std::string>();
}

CivilDate require_date(const json& obj, const char* key, const std::string& where) {
    const auto d = parse_civil_date(require_string(obj, key, where));
    if (!d) fail(where + ": \"" + key + "\" must be a YYYY-MM-DD date");
    return *d;
}

std::string id_string(const json& v, const std::string& where) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    fail(where + ": indicator ids must be strings or integers");
}

bool valid_dataset_kind(const std::string& kind) {
    return market_kind_from_string(kind).has_value() || kind == "secondary_reserve" ||
           kind == "reserve_aggregates";
}

void parse_battery(const json& obj, BatteryParams& battery) {
    check_keys(obj, {"capital_cost_eur_per_kwh", "cycle_life", "round_trip_efficiency"},
               "battery");
    if (obj.contains("capital_cost_eur_per_kwh"))
        battery.capital_cost_eur_per_kwh =
            require_number(obj, "capital_cost_eur_per_kwh", "battery");
    if (obj.contains("cycle_life")) battery.cycle_life = require_number(obj, "cycle_life", "battery");
    if (obj.contains("round_trip_efficiency"))
        battery.round_trip_efficiency = require_number(obj, "round_trip_efficiency", "battery");
    try {
        battery.validate();
    } catch (const Error& e) {
        fail(std::string("battery: ") + e.what());
    }
}

DatasetSpec parse_dataset(const json& obj, std::size_t index) {
    const std::string where = "datasets[" + std::to_string(index) + "]";
    if (!obj.is_object()) fail(where + ": must be an object");
    check_keys(obj, {"kind", "zone", "path", "fetch"}, where);
    DatasetSpec spec;
    spec.kind = require_string(obj, "kind", where);
    if (!valid_dataset_kind(spec.kind)) fail(where + ": unknown dataset kind \"" + spec.kind + "\"");
    spec.zone = require_string(obj, "zone", where);
    if (spec.zone.empty()) fail(where + ": zone must not be empty");
    if (obj.contains("path")) spec.path = require_string(obj, "path", where);
    if (obj.contains("fetch")) {
        const json& f = obj["fetch"];
        if (!f.is_object()) fail(where + ".fetch: must be an object");
        check_keys(f, {"start", "end"}, where + ".fetch");
        DateRange span;
        span.first = require_date(f, "start", where + ".fetch");
        span.last = require_date(f, "end", where + ".fetch");
        if (span.last < span.first) fail(where + ".fetch: end before start");
        spec.fetch_span = span;
    }
    if (spec.path.empty() && !spec.fetch_span) fail(where + ": needs a path or a fetch span");
    if (spec.kind == "reserve_aggregates" && spec.fetch_span)
        fail(where + ": reserve_aggregates cannot be fetched");
    return spec;
}

void parse_source(const json& obj, DataSourceConfig& source, const fs::path& base_dir) {
    check_keys(obj,
               {"base_url", "token_env", "requires_token", "cache_dir", "request_delay_ms",
                "indicators", "reserve_indicators"},
               "source");
    if (obj.contains("base_url")) source.base_url = require_string(obj, "base_url", "source");
    if (obj.contains("token_env")) source.token_env = require_string(obj, "token_env", "source");
    if (obj.contains("requires_token")) {
        if (!obj["requires_token"].is_boolean()) fail("source: \"requires_token\" must be a boolean");
        source.requires_token = obj["requires_token"].get<bool>();
    }
    if (obj.contains("cache_dir")) source.cache_dir = require_string(obj, "cache_dir", "source");
    if (obj.contains("request_delay_ms")) {
        const double ms = require_number(obj, "request_delay_ms", "source");
        if (ms < 0) fail("source: \"request_delay_ms\" must be non-negative");
        source.request_delay_ms = static_cast<long>(ms);
    }
    if (obj.contains("indicators")) {
        const json& ind = obj["indicators"];
        if (!ind.is_object()) fail("source: \"indicators\" must be an object");
        for (auto it = ind.begin(); it != ind.end(); ++it) {
            const auto market = market_kind_from_string(it.key());
            if (!market) fail("source.indicators: unknown market \"" + it.key() + "\"");
            source.indicators[*market] = id_string(it.value(), "source.indicators");
        }
    }
    if (obj.contains("reserve_indicators")) {
        const json& r = obj["reserve_indicators"];
        if (!r.is_object()) fail("source: \"reserve_indicators\" must be an object");
        check_keys(r, {"band_price", "band_up", "band_down", "energy_up", "energy_down"},
                   "source.reserve_indicators");
        auto get = [&](const char* key) -> std::string {
            return r.contains(key) ? id_string(r[key], "source.reserve_indicators") : std::string();
        };
        source.reserve.band_price = get("band_price");
        source.reserve.band_up = get("band_up");
        source.reserve.band_down = get("band_down");
        source.reserve.energy_up = get("energy_up");
        source.reserve.energy_down = get("energy_down");
    }
    if (source.cache_dir.is_relative()) source.cache_dir = base_dir / source.cache_dir;
}

}  // namespace

void require_inputs_for(const RunConfig& config, Analysis analysis) {
    switch (analysis) {
        case Analysis::arbitrage:
        case Analysis::sweep:
            if (config.first_dataset("day_ahead") == nullptr)
                fail("analysis \"" + std::string(to_string(analysis)) +
                     "\" needs a day_ahead dataset");
            return;
        case Analysis::reserve: {
            if (config.first_dataset("reserve_aggregates") != nullptr) return;
            const bool hourly = config.first_dataset("secondary_reserve") != nullptr &&
                                config.first_dataset("day_ahead") != nullptr &&
                                config.first_dataset("secondary_energy_up") != nullptr &&
                                config.first_dataset("secondary_energy_down") != nullptr;
            if (!hourly)
                fail("analysis \"reserve\" needs either a reserve_aggregates dataset or "
                     "secondary_reserve plus day_ahead, secondary_energy_up and "
                     "secondary_energy_down");
            return;
        }
    }
}

RunConfig load_run_config(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const Error& e) {
        fail(e.what());
    }

    const json doc = json::parse(text, nullptr, false);
    if (doc.is_discarded()) fail(path + ": not valid JSON");
    if (!doc.is_object()) fail(path + ": top level must be an object");
    check_keys(doc,
               {"battery", "datasets", "zone_profiles", "analyses", "output_dir", "wear_grid",
                "imbalance_role", "sweep", "source"},
               path);

    RunConfig config;
    config.config_hash = fnv1a_hex(text);
    config.base_dir = fs::absolute(fs::path(path)).parent_path();

    if (doc.contains("battery")) {
        if (!doc["battery"].is_object()) fail("battery: must be an object");
        parse_battery(doc["battery"], config.battery);
    }

    if (doc.contains("datasets")) {
        if (!doc["datasets"].is_array()) fail("datasets: must be an array");
        std::size_t i = 0;
        for (const json& d : doc["datasets"]) config.datasets.push_back(parse_dataset(d, i++));
    }

    if (doc.contains("zone_profiles")) {
        const json& zp = doc["zone_profiles"];
        if (!zp.is_object()) fail("zone_profiles: must be an object");
        for (auto it = zp.begin(); it != zp.end(); ++it) {
            if (!it.value().is_string()) fail("zone_profiles: values must be strings");
            const std::string v = it.value().get<std::string>();
            if (v == "es-capped")
                config.zone_profiles[it.key()] = ValidationProfile::es_capped;
            else if (v == "uncapped")
                config.zone_profiles[it.key()] = ValidationProfile::uncapped;
            else
                fail("zone_profiles: unknown profile \"" + v + "\"");
        }
    }

    if (doc.contains("analyses")) {
        if (!doc["analyses"].is_array()) fail("analyses: must be an array");
        for (const json& a : doc["analyses"]) {
            if (!a.is_string()) fail("analyses: entries must be strings");
            const std::string name = a.get<std::string>();
            if (name == "arbitrage")
                config.analyses.push_back(Analysis::arbitrage);
            else if (name == "reserve")
                config.analyses.push_back(Analysis::reserve);
            else if (name == "sweep")
                config.analyses.push_back(Analysis::sweep);
            else
                fail("analyses: unknown analysis \"" + name + "\"");
        }
    } else {
        config.analyses = {Analysis::arbitrage, Analysis::reserve, Analysis::sweep};
    }

    if (doc.contains("output_dir")) config.output_dir = require_string(doc, "output_dir", path);

    if (doc.contains("wear_grid")) {
        const json& g = doc["wear_grid"];
        if (!g.is_object()) fail("wear_grid: must be an object");
        check_keys(g, {"start", "stop", "step"}, "wear_grid");
        try {
            config.wear_grid = make_wear_grid(require_number(g, "start", "wear_grid"),
                                              require_number(g, "stop", "wear_grid"),
                                              require_number(g, "step", "wear_grid"));
        } catch (const Error& e) {
            fail(std::string("wear_grid: ") + e.what());
        }
    }

    if (doc.contains("imbalance_role")) {
        const std::string role = require_string(doc, "imbalance_role", path);
        if (role == "both")
            config.imbalance_role = ImbalanceRole::both;
        else if (role == "directional")
            config.imbalance_role = ImbalanceRole::directional;
        else
            fail("imbalance_role: must be \"both\" or \"directional\"");
    }

    if (doc.contains("sweep")) {
        const json& s = doc["sweep"];
        if (!s.is_object()) fail("sweep: must be an object");
        check_keys(s, {"target"}, "sweep");
        if (s.contains("target")) {
            config.sweep.target = require_number(s, "target", "sweep");
            if (!(config.sweep.target > 0.0 && config.sweep.target <= 1.0))
                fail("sweep: target must be in (0, 1]");
        }
    }

    if (doc.contains("source")) {
        if (!doc["source"].is_object()) fail("source: must be an object");
        parse_source(doc["source"], config.source, config.base_dir);
    } else {
        config.source.cache_dir = config.base_dir / config.source.cache_dir;
    }

    for (const Analysis a : config.analyses) require_inputs_for(config, a);

    for (const auto& spec : config.datasets)
        if (spec.path.empty() && spec.kind != "secondary_reserve" && !spec.is_market())
            fail("datasets: \"" + spec.kind + "\" needs an explicit path");

    return config;
}

}  // namespace bessmarket

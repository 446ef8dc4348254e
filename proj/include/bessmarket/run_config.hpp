#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bessmarket/acquisition.hpp"
#include "bessmarket/arbitrage.hpp"
#include "bessmarket/battery.hpp"
#include "bessmarket/market_data.hpp"

namespace bessmarket {

/// One input table. `kind` is a market name, "secondary_reserve", or
/// "reserve_aggregates". Relative paths resolve against the config file's
/// directory; an empty path with a fetch span points at the cache CSV.
struct DatasetSpec {
    std::string kind;
    std::string zone;
    std::filesystem::path path;
    std::optional<DateRange> fetch_span;

    bool is_market() const;
    std::optional<MarketKind> market() const;
};

enum class Analysis { arbitrage, reserve, sweep };

std::string_view to_string(Analysis a);

struct SweepSettings {
    double target = 0.20;
};

struct RunConfig {
    BatteryParams battery;
    std::vector<DatasetSpec> datasets;
    std::map<std::string, ValidationProfile> zone_profiles;
    std::vector<Analysis> analyses;  // what `report` runs; defaults to all
    std::filesystem::path output_dir = "out";
    std::optional<std::vector<double>> wear_grid;
    ImbalanceRole imbalance_role = ImbalanceRole::both;
    SweepSettings sweep;
    DataSourceConfig source;
    std::string config_hash;  // FNV-1a of the config file bytes
    std::filesystem::path base_dir;

    ValidationProfile profile_for(const std::string& zone) const;
    std::vector<const DatasetSpec*> datasets_of(const std::string& kind) const;
    const DatasetSpec* first_dataset(const std::string& kind,
                                     const std::string& zone = {}) const;
    /// Dataset path with the config-relative and cache-default rules applied.
    std::filesystem::path resolved_path(const DatasetSpec& spec) const;
};

/// Parses and validates the JSON run configuration. Any structural problem,
/// unknown key, or unsatisfiable analysis raises Errc::config_error.
RunConfig load_run_config(const std::string& path);

/// Checks that the datasets needed by one analysis are declared; throws
/// Errc::config_error naming the gap otherwise.
void require_inputs_for(const RunConfig& config, Analysis analysis);

}  // namespace bessmarket

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bessmarket/arbitrage.hpp"
#include "bessmarket/battery.hpp"
#include "bessmarket/reserve.hpp"

namespace bessmarket {

enum class ApplicationKind { arb_day_ahead, arb_with_ancillary, secondary_up, secondary_down };

std::string_view to_string(ApplicationKind kind);

enum class PeriodUnit { day, hour };

std::string_view to_string(PeriodUnit unit);

struct ArbitrageInputs {
    std::span<const DailyArbitrageResult> results;
};

/// The energy-term profit is held fixed across the sweep; only the wear cost
/// moves the break-even band price.
struct ReserveInputs {
    const ReserveMarketSeries* series = nullptr;
    Direction direction = Direction::up;
    double energy_profit = 0.0;
    DateRange period;
};

struct Application {
    ApplicationKind kind = ApplicationKind::arb_day_ahead;
    std::string zone;
    std::variant<ArbitrageInputs, ReserveInputs> inputs;
};

/// Potentially profitable utilization time: for each wear cost on the grid,
/// how many periods (days for arbitrage, hours for reserve) clear it.
struct UtilizationCurve {
    ApplicationKind kind = ApplicationKind::arb_day_ahead;
    std::string zone;
    std::vector<double> wear_grid;
    std::vector<long> counts;
    std::vector<double> normalized;  // filled by normalize()
    long total_periods = 0;
    PeriodUnit unit = PeriodUnit::day;
    bool empty_input = false;
};

/// Inclusive arithmetic grid [start, stop] with the given positive step.
std::vector<double> make_wear_grid(double start, double stop, double step);

/// Counts are non-increasing along the grid. An empty grid defaults to
/// [0, wear_cost(params)] step 1. Empty inputs yield an all-zero curve with
/// the empty_input flag set rather than an error.
UtilizationCurve pput_curve(const Application& app, const BatteryParams& params,
                            std::vector<double> wear_grid = {});

/// Fills the normalized fractions; counts are preserved. A curve over zero
/// periods cannot be normalized.
UtilizationCurve normalize(UtilizationCurve curve);

struct WearThreshold {
    double grid_wear = 0.0;      // largest grid point still meeting the target
    double interpolated = 0.0;   // linear crossing between grid neighbours
};

/// Largest wear cost whose normalized utilization still reaches `target`
/// (a fraction of total periods). nullopt when even the grid start misses it.
std::optional<WearThreshold> min_wear_for_target(const UtilizationCurve& curve, double target);

struct CurveComparison {
    std::vector<double> wear_grid;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> values;  // values[curve][grid point]
    std::vector<std::size_t> highest;         // per grid point, first curve with the max
};

/// Resamples all curves onto the union of grid points inside their common
/// wear window. Non-overlapping grids are an error.
CurveComparison compare(std::span<const UtilizationCurve> curves);

}  // namespace bessmarket

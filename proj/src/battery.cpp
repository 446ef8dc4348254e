#include "bessmarket/battery.hpp"

#include <cmath>

#include "bessmarket/errors.hpp"
#include "bessmarket/util.hpp"

namespace bessmarket {

void BatteryParams::validate() const {
    if (!(capital_cost_eur_per_kwh >= 0.0))
        throw Error(Errc::invalid_params,
                    "capital cost must be >= 0, got " + format_double(capital_cost_eur_per_kwh));
    if (!(cycle_life > 0.0))
        throw Error(Errc::invalid_params,
                    "cycle life must be > 0, got " + format_double(cycle_life));
    if (!(round_trip_efficiency > 0.0 && round_trip_efficiency <= 1.0))
        throw Error(Errc::invalid_params, "round-trip efficiency must be in (0, 1], got " +
                                              format_double(round_trip_efficiency));
}

double wear_cost(const BatteryParams& params) {
    params.validate();
    return params.capital_cost_eur_per_kwh * 1000.0 / params.cycle_life;
}

EfficiencyPair split_efficiency(const BatteryParams& params) {
    params.validate();
    const double eff = std::sqrt(params.round_trip_efficiency);
    return EfficiencyPair{eff, eff};
}

}  // namespace bessmarket

#pragma once

namespace bessmarket {

/// Battery economics. Power-conversion cost is folded into the capital cost;
/// degradation is amortized uniformly over equivalent full cycles.
struct BatteryParams {
    double capital_cost_eur_per_kwh = 300.0;
    double cycle_life = 3000.0;          // equivalent full cycles
    double round_trip_efficiency = 0.85;  // (0, 1]

    void validate() const;  // throws Error(invalid_params)
};

struct EfficiencyPair {
    double discharge = 1.0;  // grid side = discharge * storage side
    double charge = 1.0;     // storage side = charge * grid side
};

/// EUR per MWh of storage energy cycled: capital cost amortized over the
/// lifetime throughput of `cycle_life` full cycles.
double wear_cost(const BatteryParams& params);

/// Losses split evenly between charge and discharge:
/// discharge == charge == sqrt(round_trip_efficiency).
EfficiencyPair split_efficiency(const BatteryParams& params);

}  // namespace bessmarket

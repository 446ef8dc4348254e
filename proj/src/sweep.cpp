#include "bessmarket/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "bessmarket/errors.hpp"

namespace bessmarket {

std::string_view to_string(ApplicationKind kind) {
    switch (kind) {
        case ApplicationKind::arb_day_ahead: return "arb_day_ahead";
        case ApplicationKind::arb_with_ancillary: return "arb_with_ancillary";
        case ApplicationKind::secondary_up: return "secondary_up";
        case ApplicationKind::secondary_down: return "secondary_down";
    }
    return "?";
}

std::string_view to_string(PeriodUnit unit) {
    return unit == PeriodUnit::day ? "day" : "hour";
}

std::vector<double> make_wear_grid(double start, double stop, double step) {
    if (!(step > 0.0) || !std::isfinite(step) || !std::isfinite(start) || !std::isfinite(stop))
        throw Error(Errc::invalid_params, "wear grid needs finite bounds and a positive step");
    if (stop < start) throw Error(Errc::invalid_params, "wear grid stop below start");
    const auto n = static_cast<long>(std::floor((stop - start) / step + 1e-9));
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(n) + 1);
    for (long i = 0; i <= n; ++i) grid.push_back(start + static_cast<double>(i) * step);
    return grid;
}

namespace {

// counts of values strictly above each grid threshold, via one sort
std::vector<long> descending_counts(std::vector<double> values, std::span<const double> grid) {
    std::sort(values.begin(), values.end());
    std::vector<long> counts;
    counts.reserve(grid.size());
    for (double threshold : grid) {
        auto it = std::upper_bound(values.begin(), values.end(), threshold);
        counts.push_back(static_cast<long>(values.end() - it));
    }
    return counts;
}

std::vector<long> reserve_counts(const ReserveInputs& in, const EfficiencyPair&,
                                 std::span<const double> grid, long& total) {
    if (in.series == nullptr)
        throw Error(Errc::invalid_params, "reserve sweep needs a reserve series");
    const double util = band_utilization(*in.series, in.direction, in.period);
    std::vector<double> band_prices;
    band_prices.reserve(in.series->hours.size());
    for (std::size_t i = 0; i < in.series->hours.size(); ++i)
        if (in.period.contains(in.series->hours[i].local_date()))
            band_prices.push_back(in.series->band_price[i]);
    total = static_cast<long>(band_prices.size());
    std::sort(band_prices.begin(), band_prices.end());
    std::vector<long> counts;
    counts.reserve(grid.size());
    for (double wear : grid) {
        const double be = break_even_band_price(wear, in.energy_profit, util);
        auto it = std::upper_bound(band_prices.begin(), band_prices.end(), be);
        counts.push_back(static_cast<long>(band_prices.end() - it));
    }
    return counts;
}

}  // namespace

UtilizationCurve pput_curve(const Application& app, const BatteryParams& params,
                            std::vector<double> wear_grid) {
    params.validate();
    if (wear_grid.empty()) wear_grid = make_wear_grid(0.0, wear_cost(params), 1.0);
    if (!std::is_sorted(wear_grid.begin(), wear_grid.end()))
        throw Error(Errc::invalid_params, "wear grid must be sorted ascending");

    UtilizationCurve curve;
    curve.kind = app.kind;
    curve.zone = app.zone;
    curve.wear_grid = std::move(wear_grid);

    if (const auto* arb = std::get_if<ArbitrageInputs>(&app.inputs)) {
        std::vector<double> profits;
        profits.reserve(arb->results.size());
        for (const auto& r : arb->results) profits.push_back(r.cycle_profit);
        curve.total_periods = static_cast<long>(profits.size());
        curve.counts = descending_counts(std::move(profits), curve.wear_grid);
        curve.unit = PeriodUnit::day;
    } else {
        const auto& in = std::get<ReserveInputs>(app.inputs);
        curve.counts = reserve_counts(in, split_efficiency(params), curve.wear_grid,
                                      curve.total_periods);
        curve.unit = PeriodUnit::hour;
    }

    curve.empty_input = curve.total_periods == 0;
    return curve;
}

UtilizationCurve normalize(UtilizationCurve curve) {
    if (curve.total_periods == 0)
        throw Error(Errc::empty_input, "cannot normalize a curve over zero periods");
    curve.normalized.clear();
    curve.normalized.reserve(curve.counts.size());
    for (long c : curve.counts)
        curve.normalized.push_back(static_cast<double>(c) /
                                   static_cast<double>(curve.total_periods));
    return curve;
}

std::optional<WearThreshold> min_wear_for_target(const UtilizationCurve& curve, double target) {
    if (!(target > 0.0) || !std::isfinite(target))
        throw Error(Errc::invalid_params, "target utilization must be positive");
    if (curve.wear_grid.empty()) throw Error(Errc::empty_input, "empty utilization curve");
    if (curve.normalized.size() != curve.wear_grid.size())
        throw Error(Errc::invalid_params, "curve must be normalized first");

    std::size_t hit = curve.wear_grid.size();
    for (std::size_t i = curve.wear_grid.size(); i-- > 0;) {
        if (curve.normalized[i] >= target) {
            hit = i;
            break;
        }
    }
    if (hit == curve.wear_grid.size()) return std::nullopt;

    WearThreshold t;
    t.grid_wear = curve.wear_grid[hit];
    t.interpolated = t.grid_wear;
    if (hit + 1 < curve.wear_grid.size()) {
        const double n0 = curve.normalized[hit];
        const double n1 = curve.normalized[hit + 1];
        // hit is the last grid point at or above target, so n1 < target <= n0
        if (n0 > n1)
            t.interpolated = t.grid_wear + (n0 - target) / (n0 - n1) *
                                               (curve.wear_grid[hit + 1] - t.grid_wear);
    }
    return t;
}

namespace {

double interpolate(std::span<const double> xs, std::span<const double> ys, double x) {
    auto it = std::lower_bound(xs.begin(), xs.end(), x);
    if (it == xs.end()) return ys.back();
    const auto i = static_cast<std::size_t>(it - xs.begin());
    if (xs[i] == x || i == 0) return ys[i];
    const double f = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + f * (ys[i] - ys[i - 1]);
}

}  // namespace

CurveComparison compare(std::span<const UtilizationCurve> curves) {
    if (curves.empty()) throw Error(Errc::empty_input, "nothing to compare");

    double lo = curves[0].wear_grid.front();
    double hi = curves[0].wear_grid.back();
    for (const auto& c : curves) {
        if (c.wear_grid.empty()) throw Error(Errc::empty_input, "curve with empty grid");
        if (c.normalized.size() != c.wear_grid.size())
            throw Error(Errc::invalid_params, "curves must be normalized first");
        lo = std::max(lo, c.wear_grid.front());
        hi = std::min(hi, c.wear_grid.back());
    }
    if (lo > hi) throw Error(Errc::disjoint_grids, "wear grids do not overlap");

    std::vector<double> grid;
    for (const auto& c : curves)
        for (double w : c.wear_grid)
            if (w >= lo && w <= hi) grid.push_back(w);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    CurveComparison cmp;
    cmp.wear_grid = std::move(grid);
    for (const auto& c : curves) {
        cmp.labels.push_back(std::string(to_string(c.kind)) + ":" + c.zone);
        std::vector<double> row;
        row.reserve(cmp.wear_grid.size());
        for (double w : cmp.wear_grid) row.push_back(interpolate(c.wear_grid, c.normalized, w));
        cmp.values.push_back(std::move(row));
    }

    cmp.highest.reserve(cmp.wear_grid.size());
    for (std::size_t g = 0; g < cmp.wear_grid.size(); ++g) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < curves.size(); ++c)
            if (cmp.values[c][g] > cmp.values[best][g]) best = c;
        cmp.highest.push_back(best);
    }
    return cmp;
}

}  // namespace bessmarket

#include "evscale/gap.hpp"

#include <cmath>
#include <cstdio>

namespace evscale {

void ParityParams::validate() const {
    if (!(pump_flow_gpm > 0.0)) throw Error("pump flow must be positive");
    if (!(energy_density_kwh_per_gal > 0.0)) throw Error("energy density must be positive");
    if (!(consumption_ratio > 0.0 && consumption_ratio <= 1.0))
        throw Error("consumption ratio must lie in (0, 1]");
    if (!(p_evse_w > 0.0)) throw Error("charger power must be positive");
    if (pumps_per_station < 0 || ports_per_station < 0)
        throw Error("pumps/ports per station must be non-negative");
    if (ports_per_station == 0) throw Error("ports per station must be positive");
}

double pump_power_w(const ParityParams& params) {
    // gal/min * 60 min/h * kWh/gal * 1000 W/kW = W
    return params.pump_flow_gpm * 60.0 * params.energy_density_kwh_per_gal * 1000.0;
}

std::string format_power_mw(double watts) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.1f MW", watts / 1e6);
    return buf;
}

double parity_ratio(const ParityParams& params) {
    return params.consumption_ratio * pump_power_w(params) / params.p_evse_w;
}

double predicted_evse(double population, const ScalingFit& gs_fit, const ParityParams& params) {
    const double stations_per_gs = parity_ratio(params) *
                                   static_cast<double>(params.pumps_per_station) /
                                   static_cast<double>(params.ports_per_station);
    return stations_per_gs * predict(gs_fit, population);
}

double predicted_evse_from_observed(double observed_gs, const ParityParams& params) {
    const double stations_per_gs = parity_ratio(params) *
                                   static_cast<double>(params.pumps_per_station) /
                                   static_cast<double>(params.ports_per_station);
    return stations_per_gs * observed_gs;
}

CountyGap station_gap(const std::string& fips, std::int64_t population, double observed_evse,
                      const ScalingFit& gs_fit, const ParityParams& params) {
    CountyGap g;
    g.fips = fips;
    g.population = population;
    g.observed_evse = observed_evse;
    g.predicted_evse = predicted_evse(static_cast<double>(population), gs_fit, params);
    g.gap = g.predicted_evse - g.observed_evse;
    return g;
}

double county_power_w(const ChargerLevelCounts& levels) {
    return static_cast<double>(levels.level1) * levels.level1_w +
           static_cast<double>(levels.level2) * levels.level2_w +
           static_cast<double>(levels.dcfast) * levels.dcfast_w;
}

std::vector<std::pair<double, double>> power_parity_curve(const ScalingFit& gs_fit,
                                                          const ParityParams& params,
                                                          const std::vector<double>& n_grid) {
    const double per_station_w = static_cast<double>(params.pumps_per_station) *
                                 pump_power_w(params) * params.consumption_ratio;
    std::vector<std::pair<double, double>> curve;
    curve.reserve(n_grid.size());
    for (double n : n_grid) curve.emplace_back(n, predict(gs_fit, n) * per_station_w);
    return curve;
}

}  // namespace evscale

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evscale/glm.hpp"

namespace evscale {

// Power-parity parameters. Powers are stored in watts; display units are a
// rendering concern.
struct ParityParams {
    double pump_flow_gpm = 10.0;                  // regulated consumer pump flow
    double energy_density_kwh_per_gal = 33.705;   // gasoline energy equivalence
    double consumption_ratio = 1.0 / 3.0;         // EV energy per mile / ICE energy per mile
    double p_evse_w = 400e3;                      // per-port charger power
    std::int64_t pumps_per_station = 12;
    std::int64_t ports_per_station = 12;

    void validate() const;
};

struct ChargerLevelCounts {
    std::int64_t level1 = 0;
    std::int64_t level2 = 0;
    std::int64_t dcfast = 0;
    double level1_w = 1400.0;
    double level2_w = 7200.0;
    double dcfast_w = 50000.0;
};

struct CountyGap {
    std::string fips;
    std::int64_t population = 0;
    double observed_evse = 0.0;
    double predicted_evse = 0.0;
    double gap = 0.0;  // predicted - observed; negative means surplus
};

// Max power delivery of one gasoline pump, in watts:
// flow [gal/min] * 60 * energy density [kWh/gal] * 1000.
double pump_power_w(const ParityParams& params);

// Megawatt rendering for reports, e.g. 20223000 -> "20.2 MW".
std::string format_power_mw(double watts);

// EVSE ports required to replace one gasoline pump at power parity:
// consumption_ratio * pump_power / p_evse.
double parity_ratio(const ParityParams& params);

// Predicted EVSE stations for population N from the gasoline scaling fit:
// parity_ratio * (pumps_per_station / ports_per_station) * Y0_GS * N^beta_GS.
double predicted_evse(double population, const ScalingFit& gs_fit, const ParityParams& params);

// Predicted stations when observed gasoline counts stand in for the fitted
// curve (sensitivity analysis).
double predicted_evse_from_observed(double observed_gs, const ParityParams& params);

// gap = predicted - observed, negative gap (surplus) reported as-is.
CountyGap station_gap(const std::string& fips, std::int64_t population, double observed_evse,
                      const ScalingFit& gs_fit, const ParityParams& params);

// Aggregate charger power of a county, sum of count * level power.
double county_power_w(const ChargerLevelCounts& levels);

// Per-N EV-consumption-adjusted power delivery of the fitted gasoline
// infrastructure: predict(gs_fit, N) * pumps_per_station * pump_power *
// consumption_ratio. Counties whose aggregate EVSE power sits below this
// curve have not reached power parity.
std::vector<std::pair<double, double>> power_parity_curve(const ScalingFit& gs_fit,
                                                          const ParityParams& params,
                                                          const std::vector<double>& n_grid);

}  // namespace evscale

#include "evscale/meanfield.hpp"

#include <cmath>

#include "evscale/errors.hpp"

namespace evscale {

namespace {
// Below this driving speed rolling resistance rivals drag and the
// aerodynamic-only balance is an upper bound, not an estimate.
constexpr double kLowSpeedMps = 10.0;
}  // namespace

void DriveCycleParams::validate() const {
    if (!(rho > 0.0)) throw Error("air density must be positive");
    if (!(cda > 0.0)) throw Error("drag area must be positive");
    if (!(p_evse_w > 0.0)) throw Error("charger power must be positive");
    if (!(alpha > 0.0 && alpha < 1.0))
        throw AlphaOutOfRange("charge fraction must lie strictly inside (0, 1), got " +
                              std::to_string(alpha));
}

double driving_speed_mps(const DriveCycleParams& p) {
    p.validate();
    return std::cbrt(p.alpha / (1.0 - p.alpha) * 2.0 / (p.rho * p.cda) * p.p_evse_w);
}

double average_speed_mps(const DriveCycleParams& p) {
    return driving_speed_mps(p) * (1.0 - p.alpha);
}

double charge_fraction(double v_mps, double p_evse_w, double rho, double cda) {
    if (!(v_mps > 0.0)) throw Error("charge_fraction: speed must be positive");
    if (!(p_evse_w > 0.0)) throw Error("charge_fraction: charger power must be positive");
    const double p_drive = 0.5 * rho * cda * v_mps * v_mps * v_mps;
    return p_drive / (p_drive + p_evse_w);
}

double required_power_w(double v_mps, double alpha, double rho, double cda) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw AlphaOutOfRange("required_power: charge fraction must lie strictly inside (0, 1)");
    if (!(v_mps > 0.0)) throw Error("required_power: speed must be positive");
    const double p_drive = 0.5 * rho * cda * v_mps * v_mps * v_mps;
    return (1.0 - alpha) / alpha * p_drive;
}

std::vector<SweepRow> sweep_curves(const std::vector<double>& power_levels_w,
                                   const std::vector<double>& alpha_grid, double rho, double cda) {
    if (power_levels_w.empty()) throw Error("sweep_curves: no power levels given");
    if (alpha_grid.empty()) throw Error("sweep_curves: empty alpha grid");
    std::vector<SweepRow> rows;
    rows.reserve(power_levels_w.size() * alpha_grid.size());
    DriveCycleParams p{rho, cda, 0.0, 0.5};
    for (double power : power_levels_w) {
        for (double alpha : alpha_grid) {
            p.p_evse_w = power;
            p.alpha = alpha;
            SweepRow row;
            row.power_w = power;
            row.alpha = alpha;
            row.v_mps = driving_speed_mps(p);
            row.vbar_mps = row.v_mps * (1.0 - alpha);
            row.upper_bound_only = row.v_mps < kLowSpeedMps;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace evscale

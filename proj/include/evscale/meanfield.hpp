#pragma once

#include <vector>

namespace evscale {

// 1 m/s in mph; conversion applied only when rendering output.
inline constexpr double kMpsToMph = 2.23694;

// All quantities SI: kg/m^3, m^2, W. alpha is the fraction of a continuous
// drive cycle spent stationary and charging, open interval (0, 1).
struct DriveCycleParams {
    double rho = 1.225;   // air density
    double cda = 0.75;    // drag area Cd * A
    double p_evse_w = 0;  // charger power
    double alpha = 1.0 / 3.0;

    void validate() const;  // throws AlphaOutOfRange / Error
};

// Driving speed sustaining the energy balance P_D (1 - alpha) = alpha P_EVSE
// with P_D = 1/2 rho CdA v^3:
//   v = cbrt( alpha/(1-alpha) * 2/(rho CdA) * P_EVSE )
double driving_speed_mps(const DriveCycleParams& p);

// vbar = v (1 - alpha); the vehicle is stationary while charging.
double average_speed_mps(const DriveCycleParams& p);

// Maximizer of vbar(alpha) ~ alpha^{1/3} (1 - alpha)^{2/3}.
constexpr double optimal_alpha() { return 1.0 / 3.0; }

// Charge fraction required to sustain driving speed v:
//   alpha = P_D / (P_D + P_EVSE).
double charge_fraction(double v_mps, double p_evse_w, double rho = 1.225, double cda = 0.75);

// Charger power required for driving speed v at charge fraction alpha;
// inverse of driving_speed_mps at fixed alpha.
double required_power_w(double v_mps, double alpha, double rho = 1.225, double cda = 0.75);

struct SweepRow {
    double power_w = 0;
    double alpha = 0;
    double v_mps = 0;
    double vbar_mps = 0;
    // Aerodynamic-only power draw overstates feasible speed below ~10 m/s
    // where rolling resistance dominates; such rows are upper bounds only.
    bool upper_bound_only = false;
};

// Cartesian sweep over charger powers and charge fractions.
std::vector<SweepRow> sweep_curves(const std::vector<double>& power_levels_w,
                                   const std::vector<double>& alpha_grid,
                                   double rho = 1.225, double cda = 0.75);

}  // namespace evscale

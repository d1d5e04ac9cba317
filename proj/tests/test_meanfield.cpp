#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "evscale/errors.hpp"
#include "evscale/meanfield.hpp"

using namespace evscale;

namespace {

DriveCycleParams params(double p_w, double alpha) { return {1.225, 0.75, p_w, alpha}; }

double drive_power_w(double v_mps, double rho = 1.225, double cda = 0.75) {
    return 0.5 * rho * cda * v_mps * v_mps * v_mps;
}

}  // namespace

TEST_SUITE_BEGIN("meanfield");

TEST_CASE("driving speed at the reference charger powers") {
    const double v_192 = driving_speed_mps(params(1920.0, 1.0 / 3.0)) * kMpsToMph;
    CHECK(std::fabs(v_192 - 28.6) / 28.6 < 0.005);

    const double v_400k = driving_speed_mps(params(400e3, 1.0 / 3.0)) * kMpsToMph;
    CHECK(v_400k >= 169.0);
    CHECK(v_400k <= 171.0);

    // Cube-root homogeneity in charger power.
    const double v1 = driving_speed_mps(params(7200.0, 0.2));
    const double v2 = driving_speed_mps(params(14400.0, 0.2));
    CHECK(v2 / v1 == doctest::Approx(std::cbrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(driving_speed_mps(params(1920.0, 0.0)), AlphaOutOfRange);
    CHECK_THROWS_AS(driving_speed_mps(params(1920.0, 1.0)), AlphaOutOfRange);
    CHECK_THROWS_AS(driving_speed_mps(params(-5.0, 0.5)), Error);
}

TEST_CASE("average speed") {
    const double vbar = average_speed_mps(params(1920.0, 1.0 / 3.0)) * kMpsToMph;
    CHECK(std::fabs(vbar - 19.0) / 19.0 < 0.005);

    // alpha -> 0+ starves the cycle of energy: vbar ~ alpha^(1/3) -> 0.
    CHECK(average_speed_mps(params(1920.0, 1e-9)) < 0.02);
    CHECK(average_speed_mps(params(1920.0, 1e-12)) <
          average_speed_mps(params(1920.0, 1e-9)));

    const DriveCycleParams half = params(50e3, 0.5);
    CHECK(average_speed_mps(half) == doctest::Approx(driving_speed_mps(half) / 2.0).epsilon(1e-15));
}

TEST_CASE("optimal alpha") {
    CHECK(optimal_alpha() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

    // Grid sweep: no alpha beats 1/3 for any power level.
    for (double p_w : {1920.0, 11500.0, 400e3}) {
        const double best = average_speed_mps(params(p_w, optimal_alpha()));
        for (double a = 0.1; a < 0.95; a += 0.1)
            CHECK(best >= average_speed_mps(params(p_w, a)));
    }

    // At the optimum the charger delivers twice the driving power draw.
    const DriveCycleParams p = params(11500.0, optimal_alpha());
    const double v = driving_speed_mps(p);
    CHECK(p.p_evse_w == doctest::Approx(2.0 * drive_power_w(v)).epsilon(1e-12));

    // Stationary point: symmetric finite difference of vbar vanishes at 1/3.
    const double h = 1e-5;
    const double fd = (average_speed_mps(params(11500.0, 1.0 / 3.0 + h)) -
                       average_speed_mps(params(11500.0, 1.0 / 3.0 - h))) /
                      (2.0 * h);
    CHECK(std::fabs(fd) < 1e-6);
}

TEST_CASE("charge fraction") {
    const double v30 = 30.0 / kMpsToMph;
    // Hand arithmetic: P_D = 0.5 * 1.225 * 0.75 * (13.4112 m/s)^3 = 1108.1 W.
    const double pd = drive_power_w(v30);
    CHECK(pd == doctest::Approx(1108.1).epsilon(1e-3));

    const double a_home = charge_fraction(v30, 11500.0);
    CHECK(a_home == doctest::Approx(pd / (pd + 11500.0)).epsilon(1e-12));
    CHECK(a_home == doctest::Approx(0.08789).epsilon(1e-3));

    const double a_xfc = charge_fraction(v30, 400e3);
    CHECK(a_xfc >= 0.0015);
    CHECK(a_xfc <= 0.0035);

    // P_EVSE equal to the driving power splits the cycle in half.
    CHECK(charge_fraction(20.0, drive_power_w(20.0)) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("required power inverts driving speed") {
    for (double alpha : {0.05, 1.0 / 3.0, 0.8}) {
        for (double p_w : {1920.0, 11500.0, 400e3}) {
            const double v = driving_speed_mps(params(p_w, alpha));
            CHECK(required_power_w(v, alpha) == doctest::Approx(p_w).epsilon(1e-9));
        }
    }

    const double v_286 = 28.6 / kMpsToMph;
    CHECK(required_power_w(v_286, 1.0 / 3.0) == doctest::Approx(1920.0).epsilon(0.01));

    // alpha -> 1-: nearly always charging, any trickle of power sustains v.
    CHECK(required_power_w(25.0, 1.0 - 1e-9) < 1e-4);

    CHECK_THROWS_AS(required_power_w(25.0, 0.0), AlphaOutOfRange);
    CHECK_THROWS_AS(required_power_w(25.0, 1.0), AlphaOutOfRange);
}

TEST_CASE("sweep curves") {
    std::vector<double> alphas;
    for (int i = 1; i <= 999; ++i) alphas.push_back(i / 1000.0);
    const std::vector<double> powers = {1920.0, 7200.0, 11500.0, 50000.0, 400e3};
    const auto rows = sweep_curves(powers, alphas);
    REQUIRE(rows.size() == powers.size() * alphas.size());

    for (std::size_t p = 0; p < powers.size(); ++p) {
        const auto begin = rows.begin() + static_cast<std::ptrdiff_t>(p * alphas.size());
        const auto best = std::max_element(begin, begin + 999, [](const auto& a, const auto& b) {
            return a.vbar_mps < b.vbar_mps;
        });
        CHECK(best->alpha == doctest::Approx(0.333));  // grid point nearest 1/3
    }

    for (const SweepRow& row : rows) {
        // Energy balance, the defining identity of the model.
        const double pd = drive_power_w(row.v_mps);
        CHECK(pd * (1.0 - row.alpha) ==
              doctest::Approx(row.alpha * row.power_w).epsilon(1e-9));
        CHECK(row.vbar_mps == doctest::Approx(row.v_mps * (1.0 - row.alpha)).epsilon(1e-15));
        CHECK(row.upper_bound_only == (row.v_mps < 10.0));
    }

    // vbar scales as P^(1/3) at fixed alpha.
    const auto rows2 = sweep_curves({1000.0, 8000.0}, {0.25});
    CHECK(rows2[1].vbar_mps / rows2[0].vbar_mps == doctest::Approx(2.0).epsilon(1e-9));

    // At fixed alpha, more power means faster.
    const auto rows3 = sweep_curves({1000.0, 2000.0, 4000.0}, {0.4});
    CHECK(rows3[0].vbar_mps < rows3[1].vbar_mps);
    CHECK(rows3[1].vbar_mps < rows3[2].vbar_mps);

    CHECK_THROWS_AS(sweep_curves({}, {0.5}), Error);
    CHECK_THROWS_AS(sweep_curves({1000.0}, {}), Error);
    CHECK_THROWS_AS(sweep_curves({1000.0}, {0.0}), AlphaOutOfRange);
    CHECK_THROWS_AS(sweep_curves({1000.0}, {1.0}), AlphaOutOfRange);
}

TEST_SUITE_END();

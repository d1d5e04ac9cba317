#include <doctest.h>

#include <cmath>

#include "evscale/gap.hpp"
#include "evscale/ingest.hpp"

using namespace evscale;

namespace {

ScalingFit gs_fit_stub(double log_y0, double beta) {
    ScalingFit fit;
    fit.family = Family::PowerLawNegBin;
    fit.dataset = "Gasoline";
    fit.param_names = {"log_y0", "beta"};
    fit.params.resize(2);
    fit.params << log_y0, beta;
    fit.converged = true;
    return fit;
}

}  // namespace

TEST_SUITE_BEGIN("gap");

TEST_CASE("pump power") {
    ParityParams p;
    // 10 gal/min * 60 * 33.705 kWh/gal * 1000 = 20.223 MW
    CHECK(pump_power_w(p) == doctest::Approx(20.223e6).epsilon(1e-12));

    p.pump_flow_gpm = 5.0;
    CHECK(pump_power_w(p) == doctest::Approx(10.1115e6).epsilon(1e-12));

    p.pump_flow_gpm = 1.0;
    p.energy_density_kwh_per_gal = 1.0;
    CHECK(pump_power_w(p) == doctest::Approx(60e3).epsilon(1e-12));
}

TEST_CASE("parity ratio") {
    ParityParams p;
    p.p_evse_w = 400e3;
    const double xfc = parity_ratio(p);
    CHECK(xfc >= 16.8);
    CHECK(xfc <= 16.9);
    CHECK(std::llround(xfc) == 17);

    p.p_evse_w = 11.5e3;
    const double home = parity_ratio(p);
    CHECK(home >= 585.0);
    CHECK(home <= 587.0);

    // Charger as strong as a consumption-adjusted pump: one port per pump.
    p.p_evse_w = pump_power_w(p) * p.consumption_ratio;
    CHECK(parity_ratio(p) == doctest::Approx(1.0).epsilon(1e-12));

    // Homogeneity of degree -1 in charger power.
    ParityParams a;
    a.p_evse_w = 250e3;
    ParityParams b = a;
    b.p_evse_w = a.p_evse_w * 8.0;
    CHECK(parity_ratio(b) == doctest::Approx(parity_ratio(a) / 8.0).epsilon(1e-12));

    ParityParams bad;
    bad.consumption_ratio = 0.0;
    CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("predicted EVSE stations") {
    ParityParams p;
    p.p_evse_w = 400e3;
    const ScalingFit gs = gs_fit_stub(0.0, 0.77);

    const double expected = parity_ratio(p) * std::pow(10.0, 0.77 * 6.0);
    CHECK(predicted_evse(1e6, gs, p) == doctest::Approx(expected).epsilon(1e-12));

    // parity ratio 1 with equal pumps/ports reduces to the gasoline curve.
    ParityParams unit;
    unit.p_evse_w = pump_power_w(unit) * unit.consumption_ratio;
    CHECK(predicted_evse(5e4, gs, unit) == doctest::Approx(predict(gs, 5e4)).epsilon(1e-12));

    // Monotone in N for a positive exponent.
    double last = 0.0;
    for (double n : {1e3, 1e4, 1e5, 1e6, 1e7}) {
        const double cur = predicted_evse(n, gs, p);
        CHECK(cur >= last);
        last = cur;
    }

    ScalingFit unconverged = gs;
    unconverged.converged = false;
    CHECK_THROWS_AS(predicted_evse(1e6, unconverged, p), UnconvergedFit);
}

TEST_CASE("station gap") {
    ParityParams p;
    p.p_evse_w = 400e3;
    const ScalingFit gs = gs_fit_stub(0.0, 0.77);

    // observed == predicted -> exactly zero.
    const double pred = predicted_evse(12345.0, gs, p);
    const CountyGap zero = station_gap("01001", 12345, pred, gs, p);
    CHECK(zero.gap == 0.0);

    // Hand-evaluated synthetic county: N = 1e4, 5 observed stations.
    const CountyGap g = station_gap("01003", 10000, 5.0, gs, p);
    const double by_hand = parity_ratio(p) * std::pow(10.0, 0.77 * 4.0) - 5.0;
    CHECK(g.gap == doctest::Approx(by_hand).epsilon(1e-12));
    CHECK(g.gap == g.predicted_evse - g.observed_evse);

    // A county beyond parity reports a negative gap, not zero.
    const CountyGap surplus = station_gap("01005", 100, 1e9, gs, p);
    CHECK(surplus.gap < 0.0);

    // CountyRecord overload, fitted curve vs observed-count substitution.
    CountyRecord rec;
    rec.fips = "01007";
    rec.population = 40000;
    rec.gas_stations = 30;
    rec.evse_stations = 4;
    const CountyGap fitted = station_gap(rec, gs, p);
    CHECK(fitted.predicted_evse == doctest::Approx(predicted_evse(40000.0, gs, p)));
    const CountyGap observed = station_gap(rec, gs, p, /*use_observed_gs=*/true);
    CHECK(observed.predicted_evse == doctest::Approx(parity_ratio(p) * 30.0));
}

TEST_CASE("county power") {
    ChargerLevelCounts counts;
    counts.level1 = 1;
    counts.level2 = 1;
    counts.dcfast = 1;
    CHECK(county_power_w(counts) == doctest::Approx(58.6e3).epsilon(1e-12));

    CHECK(county_power_w(ChargerLevelCounts{}) == 0.0);

    ChargerLevelCounts fast;
    fast.dcfast = 2;
    CHECK(county_power_w(fast) == doctest::Approx(100e3).epsilon(1e-12));

    // Additivity under element-wise combination.
    ChargerLevelCounts a{3, 7, 1};
    ChargerLevelCounts b{2, 0, 5};
    ChargerLevelCounts sum{5, 7, 6};
    CHECK(county_power_w(sum) ==
          doctest::Approx(county_power_w(a) + county_power_w(b)).epsilon(1e-12));
}

TEST_CASE("power parity curve") {
    ParityParams p;  // defaults: 12 pumps, 1/3 consumption ratio
    const ScalingFit gs = gs_fit_stub(0.0, 0.0);  // predicts exactly 1 station everywhere

    const auto curve = power_parity_curve(gs, p, {1e3, 1e6});
    REQUIRE(curve.size() == 2);
    // 1 station * 12 pumps * 20.223 MW * 1/3 = 80.892 MW
    CHECK(curve[0].second == doctest::Approx(80.892e6).epsilon(1e-9));
    CHECK(curve[1].second == doctest::Approx(80.892e6).epsilon(1e-9));

    ParityParams no_pumps = p;
    no_pumps.pumps_per_station = 0;
    const auto flat = power_parity_curve(gs, no_pumps, {1e4});
    CHECK(flat[0].second == 0.0);
}

TEST_SUITE_END();

// evscale: scaling-law fits, model comparison and EVSE infrastructure gap
// forecasts over county count data.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "evscale/commands.hpp"
#include "evscale/errors.hpp"

namespace {

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const evscale::IoError*>(&e)) return 3;
    if (dynamic_cast<const evscale::UnconvergedFit*>(&e)) return 2;
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"power-law scaling fits and EVSE infrastructure gap forecasts"};
    app.require_subcommand(1);

    using namespace evscale;

    // ingest
    cmd::IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "join population, gas and station snapshots");
    ingest_cmd->add_option("--population", ingest.population_csv, "population CSV (fips,population)")
        ->required();
    ingest_cmd->add_option("--gas", ingest.gas_csv, "gas station CSV (fips,gas_stations)")
        ->required();
    ingest_cmd->add_option("--stations", ingest.stations_json, "EVSE stations JSON array")
        ->required();
    ingest_cmd->add_option("--counties", ingest.counties_geojson, "county polygons GeoJSON")
        ->required();
    ingest_cmd->add_option("--out", ingest.out_dir, "output directory")->required();

    // fit
    cmd::FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "maximum-likelihood scaling fits");
    fit_cmd->add_option("--input", fit.input, "counties.csv or population,count CSV");
    fit_cmd->add_option("--dataset", fit.dataset, "evse | gas | csv | synthetic")
        ->default_val("evse");
    fit_cmd->add_option("--family", fit.family, "poisson | nb | linear | quadratic | loglog | all")
        ->default_val("all");
    fit_cmd->add_option("--label", fit.label, "dataset label for --dataset csv");
    fit_cmd->add_option("--out", fit.out_dir, "output directory")->required();
    fit_cmd->add_option("--max-iterations", fit.options.max_iterations, "IRLS iteration cap");
    fit_cmd->add_option("--tolerance", fit.options.tolerance, "relative deviance tolerance");
    fit_cmd->add_option("--seed", fit.synth.seed, "seed for --dataset synthetic");
    fit_cmd->add_option("--y0", fit.synth.y0, "synthetic Y0");
    fit_cmd->add_option("--beta", fit.synth.beta, "synthetic beta");
    fit_cmd->add_option("--r", fit.synth.r, "synthetic dispersion r");
    fit_cmd->add_option("--rows", fit.synth.n_rows, "synthetic row count");
    fit_cmd->add_option("--n-min", fit.synth.n_min, "synthetic min population");
    fit_cmd->add_option("--n-max", fit.synth.n_max, "synthetic max population");

    // compare
    cmd::CompareArgs compare;
    auto* compare_cmd = app.add_subcommand("compare", "model comparison table");
    compare_cmd->add_option("--input", compare.input, "dataset the fits came from")->required();
    compare_cmd->add_option("--dataset", compare.dataset, "evse | gas | csv | synthetic")
        ->default_val("evse");
    compare_cmd->add_option("--label", compare.label, "dataset label for --dataset csv");
    compare_cmd->add_option("--fits", compare.fits_dir, "directory holding fit JSONs")->required();
    compare_cmd->add_option("--out", compare.out_dir, "output directory")->required();

    // gap
    cmd::GapArgs gap;
    auto* gap_cmd = app.add_subcommand("gap", "per-county EVSE station gap");
    gap_cmd->add_option("--input", gap.input, "counties.csv")->required();
    gap_cmd->add_option("--gs-fit", gap.gs_fit, "gasoline power-law fit JSON")->required();
    gap_cmd->add_option("--out", gap.out_dir, "output directory")->required();
    gap_cmd->add_option("--p-evse", gap.parity.p_evse_w, "charger power per port, watts");
    gap_cmd->add_option("--pumps-per-station", gap.parity.pumps_per_station, "pumps per gas station");
    gap_cmd->add_option("--ports-per-station", gap.parity.ports_per_station, "ports per EVSE station");
    gap_cmd->add_option("--consumption-ratio", gap.parity.consumption_ratio,
                        "EV/ICE energy per mile ratio");
    gap_cmd->add_flag("--use-observed-gs", gap.use_observed_gs,
                      "predict from observed gas counts instead of the fitted curve");

    // meanfield
    cmd::MeanfieldArgs meanfield;
    auto* mf_cmd = app.add_subcommand("meanfield", "charger power vs vehicle speed sweeps");
    mf_cmd->add_option("--power-levels", meanfield.power_levels_w, "charger powers, watts")
        ->delimiter(',');
    mf_cmd->add_option("--alpha-grid", meanfield.alpha_grid, "lo:hi:points or comma list");
    mf_cmd->add_option("--rho", meanfield.rho, "air density kg/m^3");
    mf_cmd->add_option("--cda", meanfield.cda, "drag area m^2");
    mf_cmd->add_option("--out", meanfield.out_dir, "output directory")->required();

    // report
    cmd::ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "full pipeline plus figure data files");
    report_cmd->add_option("--input", report.input, "counties.csv")->required();
    report_cmd->add_option("--out", report.out_dir, "output directory")->required();
    report_cmd->add_option("--p-evse", report.parity.p_evse_w, "charger power per port, watts");
    report_cmd->add_option("--pumps-per-station", report.parity.pumps_per_station,
                           "pumps per gas station");
    report_cmd->add_option("--consumption-ratio", report.parity.consumption_ratio,
                           "EV/ICE energy per mile ratio");

    CLI11_PARSE(app, argc, argv);

    try {
        if (ingest_cmd->parsed()) cmd::run_ingest(ingest, std::cout);
        if (fit_cmd->parsed()) cmd::run_fit(fit, std::cout);
        if (compare_cmd->parsed()) cmd::run_compare(compare, std::cout);
        if (gap_cmd->parsed()) {
            // Ports default to the pump count unless set explicitly.
            if (!gap_cmd->count("--ports-per-station"))
                gap.parity.ports_per_station = gap.parity.pumps_per_station;
            cmd::run_gap(gap, std::cout);
        }
        if (mf_cmd->parsed()) cmd::run_meanfield(meanfield, std::cout);
        if (report_cmd->parsed()) {
            report.parity.ports_per_station = report.parity.pumps_per_station;
            cmd::run_report(report, std::cout);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 0;
}

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "evscale/gap.hpp"
#include "evscale/glm.hpp"
#include "evscale/synthetic.hpp"

namespace evscale::cmd {

// Subcommand bodies, separated from argv parsing so tests can drive them
// directly. All emit deterministic artifacts: identical inputs and seeds
// produce byte-identical files.

struct IngestArgs {
    std::string population_csv;
    std::string gas_csv;
    std::string stations_json;
    std::string counties_geojson;
    std::string out_dir;
};
void run_ingest(const IngestArgs& args, std::ostream& log);

struct FitArgs {
    std::string input;            // counties.csv, or population,count CSV, unused for synthetic
    std::string dataset = "evse"; // evse | gas | csv | synthetic
    std::string family = "all";   // poisson | nb | linear | quadratic | loglog | all
    std::string label = "Custom"; // dataset label for --dataset csv
    std::string out_dir;
    FitOptions options;
    SyntheticSpec synth;
};
void run_fit(const FitArgs& args, std::ostream& log);

struct CompareArgs {
    std::string input;
    std::string dataset = "evse";  // evse | gas | csv | synthetic
    std::string label = "Custom";
    std::string fits_dir;
    std::string out_dir;
};
void run_compare(const CompareArgs& args, std::ostream& log);

struct GapArgs {
    std::string input;    // counties.csv
    std::string gs_fit;   // gasoline power-law fit JSON
    std::string out_dir;
    ParityParams parity;
    bool use_observed_gs = false;
};
void run_gap(const GapArgs& args, std::ostream& log);

struct MeanfieldArgs {
    std::vector<double> power_levels_w = {1920.0, 7200.0, 11500.0, 50000.0, 400000.0};
    std::string alpha_grid = "0.001:0.999:999";  // lo:hi:points, or comma list
    std::string out_dir;
    double rho = 1.225;
    double cda = 0.75;
};
void run_meanfield(const MeanfieldArgs& args, std::ostream& log);

struct ReportArgs {
    std::string input;  // counties.csv
    std::string out_dir;
    FitOptions options;
    ParityParams parity;
    MeanfieldArgs meanfield;
};
// Full pipeline downstream of ingestion: every fit, both comparisons, the
// county gap table and the mean-field sweeps, plus one data file per figure
// and a manifest listing them.
void run_report(const ReportArgs& args, std::ostream& log);

// "lo:hi:points" inclusive linear grid, or an explicit comma list.
std::vector<double> parse_alpha_grid(const std::string& spec);

}  // namespace evscale::cmd

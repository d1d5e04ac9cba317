#pragma once

#include <string>
#include <vector>

#include "evscale/gap.hpp"
#include "evscale/glm.hpp"
#include "evscale/ingest.hpp"
#include "evscale/meanfield.hpp"
#include "evscale/stats.hpp"

namespace evscale {

// Shortest round-trip decimal form of a double; all machine-readable output
// goes through this so files are full precision and byte-stable.
std::string format_double(double v);

// --- fit artifacts -------------------------------------------------------

void write_fit_json(const ScalingFit& fit, const std::string& path);
ScalingFit read_fit_json(const std::string& path);

// --- county records ------------------------------------------------------

void write_counties_csv(const std::vector<CountyRecord>& records, const std::string& path);
std::vector<CountyRecord> read_counties_csv(const std::string& path);

void write_unmatched_json(const std::vector<StationRecord>& unmatched, const std::string& path);

// Dataset views of the joined records.
Dataset evse_dataset(const std::vector<CountyRecord>& records);
Dataset gas_dataset(const std::vector<CountyRecord>& records);

// Two-column CSV with header `population,count`.
Dataset read_dataset_csv(const std::string& path, const std::string& label);

// --- reports -------------------------------------------------------------

void write_comparison_csv(const ModelComparison& cmp, const std::string& path);
void write_comparison_json(const ModelComparison& cmp, const std::string& dataset,
                           const std::string& path);
// Human-readable table; lambda_LR and BIC rendered in thousands.
std::string render_comparison_table(const ModelComparison& cmp, const std::string& dataset);

void write_gap_csv(const std::vector<CountyGap>& gaps, const std::string& path);
void write_gap_summary_json(const std::vector<CountyGap>& gaps, const ParityParams& params,
                            const std::string& path);

void write_meanfield_csv(const std::vector<SweepRow>& rows, const std::string& path);

}  // namespace evscale

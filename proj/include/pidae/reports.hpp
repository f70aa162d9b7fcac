#pragma once

#include <filesystem>
#include <ostream>
#include <vector>

#include "pidae/correlation.hpp"
#include "pidae/harness.hpp"
#include "pidae/tuning.hpp"

namespace pidae {

// Per-CR rows give mean/std of RMSE over split seeds. Two pooled rows follow
// per (case, model, tr, variable): "all" averages seeds within each CR first,
// "all_seed_first" averages CRs within each seed first. std is population.
void write_rmse_table(std::ostream& out, const AblationRun& run);

// Population std over CRs of the per-CR mean RMSE.
void write_cr_std(std::ostream& out, const AblationRun& run);

// Mean PI-DAE coefficients per (case, tr) over all CRs and split seeds.
void write_coefficient_table(std::ostream& out, const AblationRun& run);

// One row per cell and variable, failed cells included.
void write_cells(std::ostream& out, const AblationRun& run);

void write_masks(std::ostream& out, const AblationRun& run);
void write_specs(std::ostream& out, const AblationRun& run);

// Writes rmse.csv, cr_std.csv, coefficients.csv, cells.csv, masks.csv,
// specs.csv and notes.txt into dir. Timings are kept out of these files so
// that reruns with the same seed are byte-identical; they go to timings.csv.
void write_ablation_reports(const std::filesystem::path& dir, const AblationRun& run);

void write_coefficient_study(std::ostream& out, const CoefficientStudy& study);
void write_timing_report(std::ostream& out, const std::vector<TimingRow>& rows);

}  // namespace pidae

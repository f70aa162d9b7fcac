#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "pidae/config.hpp"
#include "pidae/corruption.hpp"
#include "pidae/models.hpp"
#include "pidae/types.hpp"

namespace pidae {

struct SplitIndices {
  std::vector<std::size_t> train, val, eval;  // each sorted ascending
};

// |train| = floor(tr N), |val| = max(1, floor(val_rate N)), eval = rest;
// uniform without replacement from `seed`. Throws ArgumentError unless
// 0 < tr <= 0.5 and all three parts are nonempty.
SplitIndices split_indices(std::size_t n, double tr, std::uint64_t seed, double val_rate = 0.1);

struct DataSplit {
  Dataset train, val, eval;
};
DataSplit split(const Dataset& data, double tr, std::uint64_t seed, double val_rate = 0.1);

// The split used by every harness entry point for (case, tr, split seed).
// The permutation depends on (cfg.seed, case, split seed) only, so larger
// training rates extend smaller ones.
DataSplit case_split(const HarnessConfig& cfg, CaseId case_id, const Dataset& data, double tr,
                     int split_seed);

using VariableErrors = std::map<Variable, double>;

// Root mean squared error over masked entries only, pooled over days, per
// variable. Throws ArgumentError if no entry is masked.
VariableErrors rmse(std::span<const DailyProfile> imputed, std::span<const DailyProfile> truth,
                    std::span<const CorruptionMask> masks, std::span<const Variable> variables);

// Case datasets in physical units. Case 2 is Case 1 filtered at the configured
// IQR thresholds. Cases whose source data is not configured are omitted.
std::map<CaseId, Dataset> load_cases(const HarnessConfig& cfg, std::vector<std::string>* notes = nullptr);

// One eval-set mask per day for a given (split seed, cr).
std::vector<CorruptionMask> evaluation_masks(std::size_t days, double cr, int split_seed,
                                             std::uint64_t base_seed);

struct ExperimentCell {
  CaseId case_id = CaseId::Synthetic;
  std::string model;  // model kind name, "LIN" or "KNN"
  double tr = 0.1;
  double cr = 0.2;
  int split_seed = 0;

  int model_rank() const;  // LIN, KNN, then kAllModelKinds order
  friend bool operator<(const ExperimentCell& a, const ExperimentCell& b);
};

struct ExperimentResult {
  ExperimentCell cell;
  VariableErrors rmse;
  std::optional<PhysicsCoefficients> coefficients;
  int best_restart = 0;
  double running_time_s = 0.0;
  double inference_time_per_day_s = 0.0;
  bool failed = false;
  std::string error;
};

struct RestartOutcome {
  TrainedModel trained;
  int restart = 0;
};

// Trains `restarts` models from independent initializations on one split and
// keeps the lowest-validation one. Seeds depend on (case, tr, cr, split seed,
// restart) but not on the model kind, so kinds with identical specs share
// their random streams.
RestartOutcome train_with_restarts(const HarnessConfig& cfg, CaseId case_id, const DataSplit& data,
                                   const ModelSpec& spec, double tr, double cr, int split_seed,
                                   int restarts, const PhysicsCoefficients& coefficient_init = {});

// Single restart `restart` of the protocol above.
TrainedModel train_one(const HarnessConfig& cfg, CaseId case_id, const DataSplit& data,
                       const ModelSpec& spec, double tr, double cr, int split_seed, int restart,
                       const PhysicsCoefficients& coefficient_init = {});

struct MaskRecord {
  CaseId case_id = CaseId::Synthetic;
  double tr = 0.0;
  double cr = 0.0;
  int split_seed = 0;
  std::string date;
  std::size_t start = 0;
  std::size_t length = 0;
};

using SpecKey = std::tuple<CaseId, ModelKind, double>;

struct AblationRun {
  std::vector<ExperimentResult> results;  // sorted by cell
  std::map<SpecKey, ModelSpec> specs_used;
  std::vector<MaskRecord> masks;          // evaluation masks, for audit
  std::vector<std::string> notes;
  int failures = 0;
};

using ProgressCallback = std::function<void(const ExperimentResult&)>;

AblationRun run_ablation(const HarnessConfig& cfg, const std::map<CaseId, Dataset>& cases,
                         const ProgressCallback& progress = {});

struct CoefficientTrial {
  PhysicsCoefficients start;
  PhysicsCoefficients final;
};

struct CoefficientStudy {
  CaseId case_id = CaseId::Synthetic;
  double tr = 0.5;
  double cr = 0.2;
  std::vector<CoefficientTrial> trials;
  PhysicsCoefficients mean, stddev;

  // stddev / |mean| per coefficient.
  std::array<double, 3> relative_dispersion() const;
};

// PI-DAE trained from each start (split seed 0, restart 0). With `starts`
// empty, `trials` starts are drawn uniformly from [0, 1).
CoefficientStudy coefficient_study(const HarnessConfig& cfg, CaseId case_id, const Dataset& data,
                                   double tr, double cr, int trials,
                                   std::vector<PhysicsCoefficients> starts = {});

struct TimingRow {
  ModelKind model;
  std::size_t days = 0;
  double running_time_s = 0.0;    // whole restart protocol
  double inference_time_s = 0.0;  // imputing the first `days` eval days
};

// Inference times are cumulative over days and the minimum over `repeats`
// passes, so they never decrease with the day count.
std::vector<TimingRow> timing_report(const HarnessConfig& cfg, CaseId case_id, const Dataset& data,
                                     std::span<const ModelKind> models, double tr, double cr,
                                     int repeats = 5);

}  // namespace pidae

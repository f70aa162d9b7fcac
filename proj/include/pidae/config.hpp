#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pidae/models.hpp"
#include "pidae/tuning.hpp"

namespace pidae {

enum class CaseId { Case1, Case2, Synthetic };

std::string to_string(CaseId id);
CaseId parse_case(const std::string& name);  // throws ArgumentError

// Everything the harness and CLI read from the INI-style config file.
//
//   [data]        dataset, raw, raw_units, synthetic_days, synthetic_a/b/c,
//                 synthetic_noise, case2_iqr_cool, case2_iqr_heat
//   [corruption]  rates, copies
//   [model.<kind>] and [model.<kind>@<cr>]
//                 filters_external, filters_internal, kernel, learning_rate,
//                 batch_size, physics_weight
//   [tuning]      enabled, budget, max_epochs, min/max_filters,
//                 min/max_kernel, min/max_learning_rate, min/max_batch
//   [harness]     cases, models, split_seeds, restarts, training_rates,
//                 validation_rate, max_epochs, patience, min_delta, knn_k,
//                 workers, seed
struct HarnessConfig {
  // [data]
  std::string dataset_path;
  std::string raw_path;
  std::string raw_units = "si";
  std::size_t synthetic_days = 40;
  PhysicsCoefficients synthetic_truth{0.1, 0.02, 0.05};
  double synthetic_noise = 0.0;
  double case2_iqr_cool = 50.0;
  double case2_iqr_heat = 20.0;

  // [corruption]
  std::vector<double> corruption_rates{0.2, 0.8};
  int augment_copies = 4;

  // [model.*]
  std::map<ModelKind, ModelSpec> specs;
  std::map<std::pair<ModelKind, double>, ModelSpec> tuned_specs;

  // [tuning]
  bool tune = false;
  int tuning_budget = 25;
  int tuning_max_epochs = 60;
  SearchSpace search_space;

  // [harness]
  std::vector<CaseId> cases{CaseId::Case2, CaseId::Synthetic};
  std::vector<ModelKind> models{kAllModelKinds.begin(), kAllModelKinds.end()};
  int split_seeds = 3;
  int restarts = 3;
  std::vector<double> training_rates{0.1, 0.5};
  double validation_rate = 0.1;
  TrainingLimits limits;  // corruption_rates are set per cell
  std::size_t knn_k = 5;
  int workers = 1;
  std::uint64_t seed = 0;

  HarnessConfig();

  // Spec for (kind, cr): tuned override if present, else the per-kind spec.
  // PI_DAE falls back to Multivariate_DAE_2's hyperparameters.
  ModelSpec spec_for(ModelKind kind, double cr) const;
};

// 10 split seeds, 10 restarts, TR 0.1..0.5, CR 0.2..0.8, Case 1 + Case 2,
// up to 1000 epochs.
void apply_paper_scale(HarnessConfig& cfg);

// Overlays the file's values on `base`. Throws DataError on parse failure
// and ArgumentError on invalid values.
HarnessConfig load_config(const std::string& path, HarnessConfig base = {});
HarnessConfig parse_config(std::istream& in, HarnessConfig base = {});

// Writes [model.<kind>@<cr>] sections for tuned specs (and [model.<kind>]
// for the base specs).
void write_model_sections(std::ostream& out, const HarnessConfig& cfg);

std::string format_rate(double r);
std::vector<double> parse_number_list(const std::string& text);

}  // namespace pidae

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include "pidae/models.hpp"

namespace pidae {

// Inclusive sampling bounds; defaults are the full hyperparameter box.
struct SearchSpace {
  std::size_t min_filters = HyperparameterBounds::kMinFilters;
  std::size_t max_filters = HyperparameterBounds::kMaxFilters;
  std::size_t min_kernel = HyperparameterBounds::kMinKernel;
  std::size_t max_kernel = HyperparameterBounds::kMaxKernel;
  double min_learning_rate = HyperparameterBounds::kMinLearningRate;
  double max_learning_rate = HyperparameterBounds::kMaxLearningRate;
  std::size_t min_batch = HyperparameterBounds::kMinBatch;
  std::size_t max_batch = HyperparameterBounds::kMaxBatch;

  // Throws ArgumentError if the space leaves the hyperparameter box.
  void validate() const;
};

// Integer-uniform filters, kernel and batch; log-uniform learning rate.
ModelSpec sample_spec(ModelKind kind, const SearchSpace& space, Rng& rng);

struct Trial {
  int index = 0;
  ModelSpec spec;
  double objective = 0.0;
};

struct SearchResult {
  ModelSpec best;
  double best_objective = 0.0;
  std::vector<Trial> trials;  // ordered by index
};

using Objective = std::function<double(const ModelSpec&, int trial_index)>;

// All specs are drawn up front from `seed`, so the trial sequence does not
// depend on `workers`. Ties go to the lower trial index.
SearchResult random_search(ModelKind kind, const SearchSpace& space, int budget,
                           const Objective& objective, std::uint64_t seed, int workers = 1);

void write_trial_log(std::ostream& out, const SearchResult& result);

}  // namespace pidae

#pragma once

#include <span>

#include "pidae/corruption.hpp"
#include "pidae/types.hpp"

namespace pidae {

// Straight line between the observations bounding the masked run; a run that
// touches the day boundary holds the nearest observed value. Throws
// ArgumentError for a fully masked day.
Series linear_interpolate(const Series& values, const CorruptionMask& mask);
DailyProfile linear_interpolate(const DailyProfile& profile, const CorruptionMask& mask,
                                std::span<const Variable> variables);

struct KnnOptions {
  std::size_t k = 5;
  // Inverse-distance weights; uniform weights when false.
  bool distance_weighted = true;
};

// Euclidean distance over the query's observed entries of all its variables;
// masked entries of `variables` are filled with the weighted average of the k
// nearest reference days. Zero-distance neighbours, when present, share all
// the weight. k larger than the reference set is clamped (the clamp is
// reported through `k_clamped`).
DailyProfile knn_impute(const DailyProfile& query, const CorruptionMask& mask,
                        std::span<const DailyProfile> reference, std::span<const Variable> variables,
                        const KnnOptions& options = {}, bool* k_clamped = nullptr);

}  // namespace pidae

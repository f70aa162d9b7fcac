#include "pidae/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "pidae/errors.hpp"

namespace pidae {

Series linear_interpolate(const Series& values, const CorruptionMask& mask) {
  if (mask.length() == kStepsPerDay) throw ArgumentError("linear interpolation of a fully masked day");
  Series out = values;
  if (mask.empty()) return out;
  const std::size_t first = mask.start();
  const std::size_t last = mask.start() + mask.length();  // one past the run
  const bool has_left = first > 0;
  const bool has_right = last < kStepsPerDay;
  if (has_left && has_right) {
    const double y0 = values[first - 1];
    const double y1 = values[last];
    const double span = static_cast<double>(last - (first - 1));
    for (std::size_t t = first; t < last; ++t) {
      const double frac = static_cast<double>(t - (first - 1)) / span;
      out[t] = y0 + frac * (y1 - y0);
    }
  } else {
    const double hold = has_left ? values[first - 1] : values[last];
    for (std::size_t t = first; t < last; ++t) out[t] = hold;
  }
  return out;
}

DailyProfile linear_interpolate(const DailyProfile& profile, const CorruptionMask& mask,
                                std::span<const Variable> variables) {
  DailyProfile out = profile;
  for (Variable v : variables) out.at(v) = linear_interpolate(profile.at(v), mask);
  return out;
}

DailyProfile knn_impute(const DailyProfile& query, const CorruptionMask& mask,
                        std::span<const DailyProfile> reference, std::span<const Variable> variables,
                        const KnnOptions& options, bool* k_clamped) {
  if (reference.empty()) throw ArgumentError("knn_impute: empty reference set");
  if (options.k < 1) throw ArgumentError("knn_impute: k must be >= 1");
  const std::size_t k = std::min(options.k, reference.size());
  if (k_clamped) *k_clamped = k < options.k;
  if (mask.empty()) return query;

  std::vector<double> dist(reference.size(), 0.0);
  for (std::size_t r = 0; r < reference.size(); ++r) {
    double sum = 0.0;
    for (const auto& [v, q] : query.values) {
      const bool corrupted = v != Variable::TOaAvg &&
                             std::find(variables.begin(), variables.end(), v) != variables.end();
      const Series& ref = reference[r].at(v);
      for (std::size_t t = 0; t < kStepsPerDay; ++t) {
        if (corrupted && mask[t]) continue;
        const double d = q[t] - ref[t];
        sum += d * d;
      }
    }
    dist[r] = std::sqrt(sum);
  }

  std::vector<std::size_t> idx(reference.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return dist[a] < dist[b]; });
  idx.resize(k);

  std::vector<double> weight(k, 1.0);
  const bool exact = dist[idx.front()] == 0.0;
  if (options.distance_weighted) {
    for (std::size_t i = 0; i < k; ++i) {
      const double d = dist[idx[i]];
      weight[i] = exact ? (d == 0.0 ? 1.0 : 0.0) : 1.0 / d;
    }
  }
  const double total = std::accumulate(weight.begin(), weight.end(), 0.0);

  DailyProfile out = query;
  for (Variable v : variables) {
    if (v == Variable::TOaAvg) continue;
    Series& s = out.at(v);
    for (std::size_t t = 0; t < kStepsPerDay; ++t) {
      if (!mask[t]) continue;
      double acc = 0.0;
      for (std::size_t i = 0; i < k; ++i) acc += weight[i] * reference[idx[i]].at(v)[t];
      s[t] = acc / total;
    }
  }
  return out;
}

}  // namespace pidae

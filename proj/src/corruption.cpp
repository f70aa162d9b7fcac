#include "pidae/corruption.hpp"

#include <cmath>
#include <string>

#include "pidae/errors.hpp"

namespace pidae {

CorruptionMask CorruptionMask::run(std::size_t start, std::size_t length) {
  if (start + length > kStepsPerDay) {
    throw ArgumentError("missing run [" + std::to_string(start) + ", " +
                        std::to_string(start + length) + ") exceeds the day");
  }
  CorruptionMask m;
  m.start_ = start;
  m.length_ = length;
  for (std::size_t t = start; t < start + length; ++t) m.missing_[t] = true;
  return m;
}

std::size_t run_length(double cr) {
  if (!(cr > 0.0 && cr <= 1.0)) {
    throw ArgumentError("corruption rate must lie in (0, 1], got " + std::to_string(cr));
  }
  // The epsilon absorbs products such as 0.2 * 48 = 9.600000000000001 landing
  // just below an exact half.
  const double scaled = cr * static_cast<double>(kStepsPerDay);
  return static_cast<std::size_t>(std::floor(scaled + 0.5 + 1e-9));
}

CorruptionMask make_mask(double cr, Rng& rng) {
  const std::size_t len = run_length(cr);
  std::uniform_int_distribution<std::size_t> start_dist(0, kStepsPerDay - len);
  return CorruptionMask::run(start_dist(rng), len);
}

CorruptionMask make_mask(double cr, std::uint64_t seed) {
  Rng rng(seed);
  return make_mask(cr, rng);
}

DailyProfile corrupt(const DailyProfile& profile, const CorruptionMask& mask,
                     std::span<const Variable> variables) {
  DailyProfile out = profile;
  for (Variable v : variables) {
    if (v == Variable::TOaAvg) continue;
    Series& s = out.at(v);
    for (std::size_t t = 0; t < kStepsPerDay; ++t) {
      if (mask[t]) s[t] = 0.0;
    }
  }
  return out;
}

std::vector<TrainingPair> augment(std::span<const DailyProfile> training, int copies,
                                  std::span<const double> cr_set,
                                  std::span<const Variable> variables, std::uint64_t seed) {
  if (copies < 0) throw ArgumentError("augmentation copy count must be >= 0");
  if (copies > 0 && cr_set.empty()) throw ArgumentError("augmentation needs a corruption rate set");

  std::vector<TrainingPair> out;
  out.reserve(training.size() * static_cast<std::size_t>(copies + 1));
  for (const auto& day : training) out.push_back({day, day, CorruptionMask{}, false});

  Rng rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, cr_set.empty() ? 0 : cr_set.size() - 1);
  for (const auto& day : training) {
    for (int c = 0; c < copies; ++c) {
      const double cr = cr_set[pick(rng)];
      CorruptionMask m = make_mask(cr, rng);
      out.push_back({corrupt(day, m, variables), day, m, true});
    }
  }
  return out;
}

}  // namespace pidae

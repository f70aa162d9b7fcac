#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "pidae/rng.hpp"
#include "pidae/types.hpp"

namespace pidae {

// Contiguous missing run inside one day; true = missing.
class CorruptionMask {
 public:
  CorruptionMask() = default;
  // Throws ArgumentError when the run does not fit in the day.
  static CorruptionMask run(std::size_t start, std::size_t length);

  bool operator[](std::size_t t) const { return missing_[t]; }
  std::size_t start() const noexcept { return start_; }
  std::size_t length() const noexcept { return length_; }
  bool empty() const noexcept { return length_ == 0; }
  const std::array<bool, kStepsPerDay>& bits() const noexcept { return missing_; }

  friend bool operator==(const CorruptionMask&, const CorruptionMask&) = default;

 private:
  std::array<bool, kStepsPerDay> missing_{};
  std::size_t start_ = 0;
  std::size_t length_ = 0;
};

// round_half_up(cr * 48). Throws ArgumentError unless 0 < cr <= 1.
std::size_t run_length(double cr);

// Start index uniform over {0, ..., 48 - L}.
CorruptionMask make_mask(double cr, Rng& rng);
CorruptionMask make_mask(double cr, std::uint64_t seed);

// Zeroes masked entries of `variables`. The outdoor temperature is never
// corrupted, even if listed.
DailyProfile corrupt(const DailyProfile& profile, const CorruptionMask& mask,
                     std::span<const Variable> variables);

struct TrainingPair {
  DailyProfile input;   // corrupted (normalized space)
  DailyProfile target;  // clean
  CorruptionMask mask;
  bool synthetic = false;  // true for masked copies, false for the original day
};

// Originals are kept as identity pairs; each day then gets `copies` masked
// copies, each with its own seeded mask at a CR drawn uniformly from cr_set.
// Output size is (copies + 1) * input size.
std::vector<TrainingPair> augment(std::span<const DailyProfile> training, int copies,
                                  std::span<const double> cr_set,
                                  std::span<const Variable> variables, std::uint64_t seed);

}  // namespace pidae

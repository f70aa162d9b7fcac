#pragma once

#include <cstdint>

#include "pidae/physics.hpp"
#include "pidae/types.hpp"

namespace pidae {

struct SyntheticOptions {
  PhysicsCoefficients truth{0.1, 0.02, 0.05};
  std::size_t days = 100;
  // Half-width of the uniform zero-mean noise added to T_ra after integration.
  double noise = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr double kSyntheticStartTemperature = 21.0;
inline constexpr double kSyntheticMinTemperature = 0.0;
inline constexpr double kSyntheticMaxTemperature = 45.0;

// Daily profiles that satisfy the discretized thermal balance exactly (before
// noise). T_oa is a diurnal sinusoid with a per-day offset; Q_cool and Q_hw
// are seeded Gaussian pulses (afternoon / morning); T_ra is integrated forward
// continuously across days from 21 degC. Throws ArgumentError for
// non-contracting coefficients (a outside (0, 2)) or T_ra leaving [0, 45].
Dataset generate_synthetic(const SyntheticOptions& options);

}  // namespace pidae

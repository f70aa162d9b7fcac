#pragma once

#include <array>
#include <span>
#include <vector>

#include "pidae/types.hpp"

namespace pidae {

// Learnable scalars of the discretized thermal balance
//   T[t+1] - T[t] = a (T_oa[t] - T[t]) - b Q_cool[t] + c Q_hw[t]
// with the time step folded into a, b and c. Not constrained to be positive.
struct PhysicsCoefficients {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;

  std::array<double, 3> as_array() const { return {a, b, c}; }
  static PhysicsCoefficients from_array(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }
  friend bool operator==(const PhysicsCoefficients&, const PhysicsCoefficients&) = default;
};

// Physical-unit views of one day (degC, kW). All spans share a length n >= 2.
struct ThermalSeries {
  std::span<const double> t_ra;
  std::span<const double> t_oa;
  std::span<const double> q_cool;
  std::span<const double> q_hw;

  static ThermalSeries of(const DailyProfile& day);
};

// r_t = (T_ra[t+1] - T_ra[t]) - (a (T_oa[t] - T_ra[t]) - b Q_cool[t] + c Q_hw[t]),
// t = 0 .. n-2.
std::vector<double> residual(const ThermalSeries& s, const PhysicsCoefficients& k);

// Mean squared residual.
double physics_loss(const ThermalSeries& s, const PhysicsCoefficients& k);
double physics_loss(const DailyProfile& physical_day, const PhysicsCoefficients& k);

struct PhysicsLossGradient {
  double loss = 0.0;
  std::vector<double> d_t_ra, d_t_oa, d_q_cool, d_q_hw;
  std::array<double, 3> d_coeffs{};  // d/da, d/db, d/dc
};

PhysicsLossGradient physics_loss_gradient(const ThermalSeries& s, const PhysicsCoefficients& k);

// Least-squares (a, b, c) minimizing the summed squared residual over all
// days. Throws SingularityError when the regressors are rank deficient.
PhysicsCoefficients fit_coefficients_ols(const Dataset& physical);

}  // namespace pidae

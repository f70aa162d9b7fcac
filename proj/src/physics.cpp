#include "pidae/physics.hpp"

#include <Eigen/Dense>

#include "pidae/errors.hpp"

namespace pidae {

namespace {

std::size_t checked_length(const ThermalSeries& s) {
  const std::size_t n = s.t_ra.size();
  if (n < 2 || s.t_oa.size() != n || s.q_cool.size() != n || s.q_hw.size() != n) {
    throw ArgumentError("thermal series must share a length of at least 2");
  }
  return n;
}

}  // namespace

ThermalSeries ThermalSeries::of(const DailyProfile& day) {
  return {day.at(Variable::TRaAvg), day.at(Variable::TOaAvg), day.at(Variable::QCoolTot),
          day.at(Variable::QHw)};
}

std::vector<double> residual(const ThermalSeries& s, const PhysicsCoefficients& k) {
  const std::size_t n = checked_length(s);
  std::vector<double> r(n - 1);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    const double drive = k.a * (s.t_oa[t] - s.t_ra[t]) - k.b * s.q_cool[t] + k.c * s.q_hw[t];
    r[t] = (s.t_ra[t + 1] - s.t_ra[t]) - drive;
  }
  return r;
}

double physics_loss(const ThermalSeries& s, const PhysicsCoefficients& k) {
  const auto r = residual(s, k);
  double sum = 0.0;
  for (double x : r) sum += x * x;
  return sum / static_cast<double>(r.size());
}

double physics_loss(const DailyProfile& physical_day, const PhysicsCoefficients& k) {
  return physics_loss(ThermalSeries::of(physical_day), k);
}

PhysicsLossGradient physics_loss_gradient(const ThermalSeries& s, const PhysicsCoefficients& k) {
  const std::size_t n = checked_length(s);
  const auto r = residual(s, k);
  const double m = static_cast<double>(r.size());

  PhysicsLossGradient g;
  g.d_t_ra.assign(n, 0.0);
  g.d_t_oa.assign(n, 0.0);
  g.d_q_cool.assign(n, 0.0);
  g.d_q_hw.assign(n, 0.0);
  for (std::size_t t = 0; t + 1 < n; ++t) {
    g.loss += r[t] * r[t];
    const double dr = 2.0 * r[t] / m;
    g.d_t_ra[t + 1] += dr;
    g.d_t_ra[t] += dr * (k.a - 1.0);
    g.d_t_oa[t] += -dr * k.a;
    g.d_q_cool[t] += dr * k.b;
    g.d_q_hw[t] += -dr * k.c;
    g.d_coeffs[0] += -dr * (s.t_oa[t] - s.t_ra[t]);
    g.d_coeffs[1] += dr * s.q_cool[t];
    g.d_coeffs[2] += -dr * s.q_hw[t];
  }
  g.loss /= m;
  return g;
}

PhysicsCoefficients fit_coefficients_ols(const Dataset& physical) {
  std::size_t rows = 0;
  for (const auto& day : physical.days) rows += day.at(Variable::TRaAvg).size() - 1;
  if (rows < 3) throw ArgumentError("OLS fit needs at least 3 interior timesteps");

  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows), 3);
  Eigen::VectorXd y(static_cast<Eigen::Index>(rows));
  Eigen::Index i = 0;
  for (const auto& day : physical.days) {
    const auto s = ThermalSeries::of(day);
    for (std::size_t t = 0; t + 1 < s.t_ra.size(); ++t, ++i) {
      y(i) = s.t_ra[t + 1] - s.t_ra[t];
      x(i, 0) = s.t_oa[t] - s.t_ra[t];
      x(i, 1) = -s.q_cool[t];
      x(i, 2) = s.q_hw[t];
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < 3) {
    throw SingularityError("thermal balance regressors are rank deficient (rank " +
                           std::to_string(qr.rank()) + "); coefficients are not identifiable");
  }
  const Eigen::Vector3d theta = qr.solve(y);
  return {theta(0), theta(1), theta(2)};
}

}  // namespace pidae

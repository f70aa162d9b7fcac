#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <vector>

#include "pidae/types.hpp"

namespace pidae {

// Sample Pearson coefficient. Throws ArgumentError on length mismatch or
// fewer than two samples, UndefinedCorrelationError on zero variance.
double pearson(std::span<const double> x, std::span<const double> y);

// Quantile with linear interpolation between order statistics.
double quantile_linear(std::vector<double> values, double q);

// Q3 - Q1 of one variable over a day.
double daily_iqr(const DailyProfile& profile, Variable v);

// Keeps days with IQR(Q_cool_tot) > thr_cool and IQR(Q_hw) > thr_heat; a zero
// threshold leaves its variable unconstrained.
Dataset filter_days(const Dataset& data, double thr_cool_kw, double thr_heat_kw);

// Pairs in reporting order:
//   1 T_ra/Q_cool  2 T_ra/Q_hw  3 Q_hw/Q_cool  4 T_oa/Q_cool  5 T_oa/Q_hw  6 T_oa/T_ra
inline constexpr std::array<std::pair<Variable, Variable>, 6> kCorrelationPairs = {{
    {Variable::TRaAvg, Variable::QCoolTot},
    {Variable::TRaAvg, Variable::QHw},
    {Variable::QHw, Variable::QCoolTot},
    {Variable::TOaAvg, Variable::QCoolTot},
    {Variable::TOaAvg, Variable::QHw},
    {Variable::TOaAvg, Variable::TRaAvg},
}};

// All six PCCs pooled over every timestep of every day.
std::array<double, 6> pooled_correlations(const Dataset& data);

struct CorrelationRow {
  double iqr_cool_threshold = 0.0;
  double iqr_heat_threshold = 0.0;
  std::size_t days = 0;
  std::array<double, 6> pcc{};
};

// One row per (cool, heat) combination whose filtered dataset is nonempty.
// Rows are ordered by cooling threshold, then heating threshold.
std::vector<CorrelationRow> correlation_table(const Dataset& data,
                                              std::span<const double> cool_thresholds,
                                              std::span<const double> heat_thresholds);

// 0, 10, ..., 50 kW.
std::vector<double> default_threshold_grid();

void write_correlation_table(std::ostream& out, const std::vector<CorrelationRow>& rows);

}  // namespace pidae

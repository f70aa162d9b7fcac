#include "pidae/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "pidae/errors.hpp"

namespace pidae {

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ArgumentError("pearson: sequences differ in length");
  if (x.size() < 2) throw ArgumentError("pearson: need at least two samples");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw UndefinedCorrelationError("pearson: zero variance");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double quantile_linear(std::vector<double> values, double q) {
  if (values.empty()) throw ArgumentError("quantile of an empty sequence");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

double daily_iqr(const DailyProfile& profile, Variable v) {
  const Series& s = profile.at(v);
  std::vector<double> vals(s.begin(), s.end());
  return quantile_linear(vals, 0.75) - quantile_linear(vals, 0.25);
}

Dataset filter_days(const Dataset& data, double thr_cool_kw, double thr_heat_kw) {
  if (thr_cool_kw < 0.0 || thr_heat_kw < 0.0) throw ArgumentError("IQR thresholds must be >= 0");
  Dataset out;
  out.stats = data.stats;
  for (const auto& day : data.days) {
    const bool cool_ok = thr_cool_kw == 0.0 || daily_iqr(day, Variable::QCoolTot) > thr_cool_kw;
    const bool heat_ok = thr_heat_kw == 0.0 || daily_iqr(day, Variable::QHw) > thr_heat_kw;
    if (cool_ok && heat_ok) out.days.push_back(day);
  }
  return out;
}

std::array<double, 6> pooled_correlations(const Dataset& data) {
  std::map<Variable, std::vector<double>> pooled;
  for (Variable v : kAllVariables) pooled[v].reserve(data.size() * kStepsPerDay);
  for (const auto& day : data.days) {
    for (Variable v : kAllVariables) {
      const Series& s = day.at(v);
      pooled[v].insert(pooled[v].end(), s.begin(), s.end());
    }
  }
  std::array<double, 6> out{};
  for (std::size_t i = 0; i < kCorrelationPairs.size(); ++i) {
    const auto& [a, b] = kCorrelationPairs[i];
    out[i] = pearson(pooled[a], pooled[b]);
  }
  return out;
}

std::vector<CorrelationRow> correlation_table(const Dataset& data,
                                              std::span<const double> cool_thresholds,
                                              std::span<const double> heat_thresholds) {
  if (cool_thresholds.empty() || heat_thresholds.empty()) {
    throw ArgumentError("correlation_table: threshold grid is empty");
  }
  std::vector<CorrelationRow> rows;
  for (double tc : cool_thresholds) {
    for (double th : heat_thresholds) {
      Dataset filtered = filter_days(data, tc, th);
      if (filtered.empty()) continue;
      rows.push_back({tc, th, filtered.size(), pooled_correlations(filtered)});
    }
  }
  return rows;
}

std::vector<double> default_threshold_grid() { return {0, 10, 20, 30, 40, 50}; }

void write_correlation_table(std::ostream& out, const std::vector<CorrelationRow>& rows) {
  out << "iqr_cool_kw,iqr_heat_kw,days,pcc1,pcc2,pcc3,pcc4,pcc5,pcc6\n";
  for (const auto& r : rows) {
    out << r.iqr_cool_threshold << ',' << r.iqr_heat_threshold << ',' << r.days;
    out << std::fixed << std::setprecision(4);
    for (double p : r.pcc) out << ',' << p;
    out << std::defaultfloat << std::setprecision(6) << '\n';
  }
}

}  // namespace pidae

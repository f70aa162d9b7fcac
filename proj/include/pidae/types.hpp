#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pidae {

inline constexpr std::size_t kStepsPerDay = 48;
inline constexpr std::size_t kInteriorSteps = kStepsPerDay - 1;

using Series = std::array<double, kStepsPerDay>;

// Building-level variables after aggregation. Temperatures in degC, flows in kW.
enum class Variable { TRaAvg, TOaAvg, QCoolTot, QHw };

inline constexpr std::array<Variable, 4> kAllVariables = {
    Variable::TRaAvg, Variable::TOaAvg, Variable::QCoolTot, Variable::QHw};

std::string_view to_string(Variable v);
std::optional<Variable> parse_variable(std::string_view name);

struct DailyProfile {
  std::string date;  // YYYY-MM-DD
  std::map<Variable, Series> values;

  bool has(Variable v) const { return values.count(v) != 0; }
  const Series& at(Variable v) const;
  Series& at(Variable v);
};

struct MinMax {
  double min = 0.0;
  double max = 0.0;
  double range() const { return max - min; }
};

using NormalizationStats = std::map<Variable, MinMax>;

struct Dataset {
  std::vector<DailyProfile> days;
  // Empty until fit via fit_normalization.
  NormalizationStats stats;

  std::size_t size() const { return days.size(); }
  bool empty() const { return days.empty(); }

  // Throws DataError if profiles disagree on their variable set.
  std::vector<Variable> variables() const;

  Dataset subset(const std::vector<std::size_t>& indices) const;
};

namespace constants {
inline constexpr double kAirDensity = 1.204;          // kg/m3
inline constexpr double kAirSpecificHeat = 1006.0;    // J/(kg K)
inline constexpr double kWaterDensity = 1000.0;       // kg/m3
inline constexpr double kWaterSpecificHeat = 4200.0;  // J/(kg K)
}  // namespace constants

}  // namespace pidae

#include "pidae/types.hpp"

#include "pidae/errors.hpp"

namespace pidae {

std::string_view to_string(Variable v) {
  switch (v) {
    case Variable::TRaAvg:
      return "T_ra_avg";
    case Variable::TOaAvg:
      return "T_oa_avg";
    case Variable::QCoolTot:
      return "Q_cool_tot";
    case Variable::QHw:
      return "Q_hw";
  }
  return "?";
}

std::optional<Variable> parse_variable(std::string_view name) {
  for (Variable v : kAllVariables) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

const Series& DailyProfile::at(Variable v) const {
  auto it = values.find(v);
  if (it == values.end()) {
    throw DataError("profile " + date + " has no variable " + std::string(to_string(v)));
  }
  return it->second;
}

Series& DailyProfile::at(Variable v) {
  auto it = values.find(v);
  if (it == values.end()) {
    throw DataError("profile " + date + " has no variable " + std::string(to_string(v)));
  }
  return it->second;
}

std::vector<Variable> Dataset::variables() const {
  std::vector<Variable> vars;
  if (days.empty()) return vars;
  for (const auto& [v, _] : days.front().values) vars.push_back(v);
  for (const auto& day : days) {
    if (day.values.size() != vars.size()) {
      throw DataError("inconsistent variable set on day " + day.date);
    }
    for (Variable v : vars) {
      if (!day.has(v)) throw DataError("inconsistent variable set on day " + day.date);
    }
  }
  return vars;
}

Dataset Dataset::subset(const std::vector<std::size_t>& indices) const {
  Dataset out;
  out.stats = stats;
  out.days.reserve(indices.size());
  for (std::size_t i : indices) out.days.push_back(days.at(i));
  return out;
}

}  // namespace pidae

#include "pidae/data_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <unordered_map>

#include "pidae/errors.hpp"

namespace pidae {

namespace {

using namespace std::chrono;

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c) && c != '"'; };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::vector<std::string> split(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, delim)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

char sniff_delimiter(const std::string& header) {
  for (char c : {'\t', ';', ','}) {
    if (header.find(c) != std::string::npos) return c;
  }
  return ',';
}

Reading parse_reading(const std::string& cell) {
  if (cell.empty()) return std::nullopt;
  std::string lower = cell;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "nan" || lower == "na" || lower == "null") return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0') {
    throw DataError("cannot parse numeric value '" + cell + "'");
  }
  if (!std::isfinite(v)) return std::nullopt;
  return v;
}

Reading fahrenheit_to_celsius(Reading f) {
  if (!f) return f;
  return (*f - 32.0) * 5.0 / 9.0;
}

constexpr double kCubicFeetPerMinuteToM3s = 0.028316846592 / 60.0;
constexpr double kGallonsPerMinuteToM3h = 0.003785411784 * 60.0;

Reading scale(Reading r, double k) {
  if (!r) return r;
  return *r * k;
}

int bin_of(Timestamp ts, sys_days first_day) {
  return static_cast<int>(duration_cast<minutes>(ts - first_day).count() / 30);
}

}  // namespace

Timestamp parse_timestamp(const std::string& text) {
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double sec = 0.0;
  char sep = 0;
  int n = std::sscanf(text.c_str(), "%d-%d-%d%c%d:%d:%lf", &y, &mo, &d, &sep, &h, &mi, &sec);
  if (n < 3 || (n > 3 && n < 6) || (n >= 4 && sep != 'T' && sep != ' ')) {
    throw DataError("cannot parse timestamp '" + text + "'");
  }
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok() || h < 0 || h > 23 || mi < 0 || mi > 59) {
    throw DataError("invalid timestamp '" + text + "'");
  }
  return sys_days{ymd} + hours{h} + minutes{mi} + seconds{static_cast<int>(sec)};
}

std::vector<RawRecord> read_raw_records(std::istream& in, SourceUnits units) {
  std::string header_line;
  if (!std::getline(in, header_line)) throw DataError("raw data file is empty");
  if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();
  const char delim = sniff_delimiter(header_line);
  const auto header = split(header_line, delim);

  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name = header[i];
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    col[name] = i;
  }
  auto require = [&](const std::string& name) {
    auto it = col.find(name);
    if (it == col.end()) throw DataError("missing required column '" + name + "'");
    return it->second;
  };

  std::size_t ts_col = 0;
  if (auto it = col.find("timestamp"); it != col.end()) {
    ts_col = it->second;
  } else if (auto it2 = col.find("time"); it2 != col.end()) {
    ts_col = it2->second;
  } else {
    throw DataError("missing required column 'timestamp'");
  }

  std::array<std::size_t, kRtuCount> c_tsa{}, c_tra{}, c_tma{}, c_toa{}, c_vsa{};
  for (std::size_t i = 0; i < kRtuCount; ++i) {
    const std::string k = std::to_string(i + 1);
    c_tsa[i] = require("t_sa_" + k);
    c_tra[i] = require("t_ra_" + k);
    c_tma[i] = require("t_ma_" + k);
    c_toa[i] = require("t_oa_" + k);
    c_vsa[i] = require("v_sa_" + k);
  }
  const std::size_t c_tshw = require("t_shw");
  const std::size_t c_trhw = require("t_rhw");
  const std::size_t c_vshw = require("v_shw");

  const bool imperial = units == SourceUnits::Imperial;
  auto temp = [&](Reading r) { return imperial ? fahrenheit_to_celsius(r) : r; };

  std::vector<RawRecord> records;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    auto cells = split(line, delim);
    cells.resize(std::max(cells.size(), header.size()));
    auto cell = [&](std::size_t c) -> Reading {
      try {
        return parse_reading(cells[c]);
      } catch (const DataError& e) {
        throw DataError("line " + std::to_string(line_no) + ", column '" + header[c] +
                        "': " + e.what());
      }
    };

    RawRecord r;
    r.timestamp = parse_timestamp(cells[ts_col]);
    if (!records.empty() && r.timestamp <= records.back().timestamp) {
      throw DataError("timestamps not strictly increasing at line " + std::to_string(line_no));
    }
    for (std::size_t i = 0; i < kRtuCount; ++i) {
      r.t_sa[i] = temp(cell(c_tsa[i]));
      r.t_ra[i] = temp(cell(c_tra[i]));
      r.t_ma[i] = temp(cell(c_tma[i]));
      r.t_oa[i] = temp(cell(c_toa[i]));
      r.v_sa[i] = imperial ? scale(cell(c_vsa[i]), kCubicFeetPerMinuteToM3s) : cell(c_vsa[i]);
    }
    r.t_shw = temp(cell(c_tshw));
    r.t_rhw = temp(cell(c_trhw));
    r.v_shw = imperial ? scale(cell(c_vshw), kGallonsPerMinuteToM3h) : cell(c_vshw);
    records.push_back(r);
  }
  return records;
}

std::vector<RawRecord> read_raw_records_file(const std::string& path, SourceUnits units) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open raw data file '" + path + "'");
  return read_raw_records(in, units);
}

double cooling_flow_w(double v_sa_m3s, double t_sa, double t_ma) {
  return v_sa_m3s * constants::kAirDensity * constants::kAirSpecificHeat * (t_sa - t_ma);
}

double hot_water_flow_w(double v_shw_m3h, double t_shw, double t_rhw) {
  const double v_m3s = v_shw_m3h / 3600.0;
  return v_m3s * constants::kWaterDensity * constants::kWaterSpecificHeat * (t_shw - t_rhw);
}

std::vector<FlowSample> derive_flows(const std::vector<RawRecord>& records) {
  std::vector<FlowSample> flows;
  flows.reserve(records.size());
  for (const auto& r : records) {
    FlowSample f;
    f.timestamp = r.timestamp;
    for (std::size_t i = 0; i < kRtuCount; ++i) {
      if (r.v_sa[i] && r.t_sa[i] && r.t_ma[i]) {
        f.q_cool[i] = cooling_flow_w(*r.v_sa[i], *r.t_sa[i], *r.t_ma[i]);
      }
    }
    if (r.v_shw && r.t_shw && r.t_rhw) f.q_hw = hot_water_flow_w(*r.v_shw, *r.t_shw, *r.t_rhw);
    flows.push_back(f);
  }
  return flows;
}

HalfHourSeries aggregate_and_resample(const std::vector<RawRecord>& records,
                                      const std::vector<FlowSample>& flows) {
  if (records.size() != flows.size()) {
    throw DataError("records and flows are not aligned");
  }
  HalfHourSeries series;
  if (records.empty()) return series;

  series.first_day = floor<days>(records.front().timestamp);
  const int n_bins = bin_of(records.back().timestamp, series.first_day) + 1;
  // Pad to whole days so slice_days sees complete calendar days.
  const int padded = (n_bins + static_cast<int>(kStepsPerDay) - 1) /
                     static_cast<int>(kStepsPerDay) * static_cast<int>(kStepsPerDay);

  std::vector<std::array<double, 4>> sum(padded, {0, 0, 0, 0});
  std::vector<std::array<int, 4>> count(padded, {0, 0, 0, 0});

  auto accumulate = [&](int bin, Variable v, Reading value) {
    if (!value) return;
    sum[bin][static_cast<std::size_t>(v)] += *value;
    count[bin][static_cast<std::size_t>(v)] += 1;
  };
  auto all_mean = [](const RtuReadings& rs) -> Reading {
    double s = 0.0;
    for (const auto& r : rs) {
      if (!r) return std::nullopt;
      s += *r;
    }
    return s / static_cast<double>(rs.size());
  };
  auto all_sum_kw = [](const RtuReadings& rs) -> Reading {
    double s = 0.0;
    for (const auto& r : rs) {
      if (!r) return std::nullopt;
      s += *r;
    }
    return s / 1000.0;
  };

  for (std::size_t i = 0; i < records.size(); ++i) {
    if (flows[i].timestamp != records[i].timestamp) {
      throw DataError("records and flows are not aligned");
    }
    const int bin = bin_of(records[i].timestamp, series.first_day);
    accumulate(bin, Variable::TRaAvg, all_mean(records[i].t_ra));
    accumulate(bin, Variable::TOaAvg, all_mean(records[i].t_oa));
    accumulate(bin, Variable::QCoolTot, all_sum_kw(flows[i].q_cool));
    if (flows[i].q_hw) accumulate(bin, Variable::QHw, *flows[i].q_hw / 1000.0);
  }

  series.bins.resize(padded);
  for (int b = 0; b < padded; ++b) {
    for (std::size_t v = 0; v < 4; ++v) {
      if (count[b][v] > 0) series.bins[b][v] = sum[b][v] / count[b][v];
    }
  }
  return series;
}

std::string format_date(sys_days d) {
  year_month_day ymd{d};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

SliceReport slice_days(const HalfHourSeries& series) {
  SliceReport report;
  const std::size_t n_days = series.bins.size() / kStepsPerDay;
  for (std::size_t d = 0; d < n_days; ++d) {
    DailyProfile day;
    day.date = format_date(series.first_day + days{static_cast<int>(d)});
    bool complete = true;
    for (Variable v : kAllVariables) {
      Series s{};
      for (std::size_t t = 0; t < kStepsPerDay && complete; ++t) {
        Reading r = series.value(d * kStepsPerDay + t, v);
        if (!r) {
          complete = false;
        } else {
          s[t] = *r;
        }
      }
      if (!complete) break;
      day.values[v] = s;
    }
    if (complete) {
      report.dataset.days.push_back(std::move(day));
    } else {
      report.dropped_days.push_back(day.date);
    }
  }
  return report;
}

SliceReport prepare_dataset(const std::vector<RawRecord>& records) {
  return slice_days(aggregate_and_resample(records, derive_flows(records)));
}

NormalizationStats fit_normalization(const Dataset& fit_subset) {
  if (fit_subset.empty()) throw ArgumentError("normalization fit subset is empty");
  NormalizationStats stats;
  for (Variable v : fit_subset.variables()) {
    MinMax mm{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& day : fit_subset.days) {
      for (double x : day.at(v)) {
        mm.min = std::min(mm.min, x);
        mm.max = std::max(mm.max, x);
      }
    }
    stats[v] = mm;
  }
  return stats;
}

double normalize_value(double x, const MinMax& mm) {
  const double r = mm.range();
  if (r == 0.0) return 0.0;
  return (x - mm.min) / r;
}

double denormalize_value(double x, const MinMax& mm) { return x * mm.range() + mm.min; }

DailyProfile normalize(const DailyProfile& day, const NormalizationStats& stats) {
  DailyProfile out = day;
  for (auto& [v, s] : out.values) {
    const auto it = stats.find(v);
    if (it == stats.end()) throw DataError("no normalization statistics for " + std::string(to_string(v)));
    for (double& x : s) x = normalize_value(x, it->second);
  }
  return out;
}

DailyProfile denormalize(const DailyProfile& day, const NormalizationStats& stats) {
  DailyProfile out = day;
  for (auto& [v, s] : out.values) {
    const auto it = stats.find(v);
    if (it == stats.end()) throw DataError("no normalization statistics for " + std::string(to_string(v)));
    for (double& x : s) x = denormalize_value(x, it->second);
  }
  return out;
}

Dataset normalize(const Dataset& data, const NormalizationStats& stats) {
  Dataset out;
  out.stats = stats;
  out.days.reserve(data.size());
  for (const auto& d : data.days) out.days.push_back(normalize(d, stats));
  return out;
}

void write_dataset(std::ostream& out, const Dataset& data) {
  out << "date,variable";
  for (std::size_t t = 0; t < kStepsPerDay; ++t) {
    out << ",v" << std::setw(2) << std::setfill('0') << t;
  }
  out << '\n' << std::setfill(' ');
  out << std::setprecision(17);
  for (const auto& day : data.days) {
    for (const auto& [v, s] : day.values) {
      out << day.date << ',' << to_string(v);
      for (double x : s) out << ',' << x;
      out << '\n';
    }
  }
}

void write_dataset_file(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write dataset file '" + path + "'");
  write_dataset(out, data);
}

Dataset read_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw DataError("dataset file is empty");
  Dataset data;
  std::map<std::string, std::size_t> index_of_date;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = split(line, ',');
    if (cells.size() != kStepsPerDay + 2) {
      throw DataError("dataset line " + std::to_string(line_no) + ": expected " +
                      std::to_string(kStepsPerDay + 2) + " columns");
    }
    auto var = parse_variable(cells[1]);
    if (!var) throw DataError("dataset line " + std::to_string(line_no) + ": unknown variable '" + cells[1] + "'");
    Series s{};
    for (std::size_t t = 0; t < kStepsPerDay; ++t) {
      auto r = parse_reading(cells[t + 2]);
      if (!r) throw DataError("dataset line " + std::to_string(line_no) + ": missing value");
      s[t] = *r;
    }
    auto [it, inserted] = index_of_date.try_emplace(cells[0], data.days.size());
    if (inserted) {
      data.days.push_back(DailyProfile{cells[0], {}});
    }
    data.days[it->second].values[*var] = s;
  }
  data.variables();  // validates a consistent variable set
  return data;
}

Dataset read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open dataset file '" + path + "'");
  return read_dataset(in);
}

}  // namespace pidae

#pragma once

#include <array>
#include <chrono>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "pidae/types.hpp"

namespace pidae {

inline constexpr std::size_t kRtuCount = 4;

using Timestamp = std::chrono::sys_seconds;
using Reading = std::optional<double>;
using RtuReadings = std::array<Reading, kRtuCount>;

// One row of HVAC operational data. Temperatures in degC, air volume flow in
// m3/s, hot-water volume flow in m3/h (as logged). Empty cells stay empty.
struct RawRecord {
  Timestamp timestamp{};
  RtuReadings t_sa, t_ra, t_ma, t_oa, v_sa;
  Reading t_shw, t_rhw, v_shw;
};

enum class SourceUnits {
  Si,        // degC, m3/s, m3/h
  Imperial,  // degF, cfm, gpm
};

// Parses a delimiter-separated file with a header row. The delimiter is
// sniffed from the header (',', ';' or tab). Throws DataError naming the
// first missing required column, or on non-increasing timestamps.
std::vector<RawRecord> read_raw_records(std::istream& in, SourceUnits units = SourceUnits::Si);
std::vector<RawRecord> read_raw_records_file(const std::string& path,
                                             SourceUnits units = SourceUnits::Si);

Timestamp parse_timestamp(const std::string& text);

// Heat flows in W, per timestamp.
struct FlowSample {
  Timestamp timestamp{};
  RtuReadings q_cool;  // per RTU
  Reading q_hw;
};

// Q_cool_i = V_sa_i * rho_a * cp_a * (T_sa_i - T_ma_i)
// Q_hw     = V_shw * rho_w * cp_w * (T_shw - T_rhw), V_shw converted m3/h -> m3/s.
std::vector<FlowSample> derive_flows(const std::vector<RawRecord>& records);

double cooling_flow_w(double v_sa_m3s, double t_sa, double t_ma);
double hot_water_flow_w(double v_shw_m3h, double t_shw, double t_rhw);

// Building-level series at 30-minute resolution. bins[i] covers
// [first_day + 30 min * i, first_day + 30 min * (i + 1)).
struct HalfHourSeries {
  std::chrono::sys_days first_day{};
  std::vector<std::array<Reading, 4>> bins;  // indexed by Variable

  Reading value(std::size_t bin, Variable v) const { return bins[bin][static_cast<std::size_t>(v)]; }
};

// Means of RTU temperatures, sum of RTU cooling flows (kW), Q_hw in kW; each
// bin is the arithmetic mean of the raw samples inside it. A variable whose
// inputs are incomplete on a row contributes nothing from that row.
HalfHourSeries aggregate_and_resample(const std::vector<RawRecord>& records,
                                      const std::vector<FlowSample>& flows);

struct SliceReport {
  Dataset dataset;
  std::vector<std::string> dropped_days;
};

// Keeps calendar days with all 48 bins of all four variables present.
SliceReport slice_days(const HalfHourSeries& series);

// Runs the full raw-file -> daily-profile chain.
SliceReport prepare_dataset(const std::vector<RawRecord>& records);

// Min-max statistics from fit_subset. Throws ArgumentError when empty.
NormalizationStats fit_normalization(const Dataset& fit_subset);

double normalize_value(double x, const MinMax& mm);
double denormalize_value(double x, const MinMax& mm);

DailyProfile normalize(const DailyProfile& day, const NormalizationStats& stats);
DailyProfile denormalize(const DailyProfile& day, const NormalizationStats& stats);
Dataset normalize(const Dataset& data, const NormalizationStats& stats);

// Processed dataset file: header "date,variable,v00..v47", one row per
// day-variable, values at round-trip precision.
void write_dataset(std::ostream& out, const Dataset& data);
void write_dataset_file(const std::string& path, const Dataset& data);
Dataset read_dataset(std::istream& in);
Dataset read_dataset_file(const std::string& path);

std::string format_date(std::chrono::sys_days day);

}  // namespace pidae

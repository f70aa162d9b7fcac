#include "pidae/reports.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <tuple>

#include "pidae/errors.hpp"

namespace pidae {

namespace {

struct Stat {
  double mean = 0.0, stddev = 0.0;
  std::size_t n = 0;
};

Stat stat_of(const std::vector<double>& xs) {
  Stat s;
  s.n = xs.size();
  if (xs.empty()) return s;
  for (double x : xs) s.mean += x;
  s.mean /= static_cast<double>(xs.size());
  double sq = 0.0;
  for (double x : xs) sq += (x - s.mean) * (x - s.mean);
  s.stddev = std::sqrt(sq / static_cast<double>(xs.size()));
  return s;
}

// (case rank, model rank, model, tr, variable) -> cr -> split seed -> rmse
using GroupKey = std::tuple<int, int, std::string, double, int>;
using Grouped = std::map<GroupKey, std::map<double, std::map<int, double>>>;

Grouped group(const AblationRun& run) {
  Grouped g;
  for (const auto& r : run.results) {
    if (r.failed) continue;
    for (const auto& [v, e] : r.rmse) {
      g[{static_cast<int>(r.cell.case_id), r.cell.model_rank(), r.cell.model, r.cell.tr,
         static_cast<int>(v)}][r.cell.cr][r.cell.split_seed] = e;
    }
  }
  return g;
}

std::string num(double x, int precision = 6) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(precision) << x;
  return s.str();
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw DataError("cannot write " + p.string());
  return f;
}

}  // namespace

void write_rmse_table(std::ostream& out, const AblationRun& run) {
  out << "case,model,tr,cr,variable,rmse_mean,rmse_std,n\n";
  for (const auto& [key, by_cr] : group(run)) {
    const auto& [c, rank, model, tr, v] = key;
    const std::string prefix = to_string(static_cast<CaseId>(c)) + "," + model + "," + format_rate(tr) + ",";
    const std::string var{to_string(static_cast<Variable>(v))};

    std::vector<double> cr_means;
    std::map<int, std::vector<double>> by_seed;
    std::size_t total = 0;
    for (const auto& [cr, seeds] : by_cr) {
      std::vector<double> xs;
      for (const auto& [s, e] : seeds) {
        xs.push_back(e);
        by_seed[s].push_back(e);
      }
      const Stat st = stat_of(xs);
      total += st.n;
      cr_means.push_back(st.mean);
      out << prefix << format_rate(cr) << "," << var << "," << num(st.mean) << "," << num(st.stddev) << ","
          << st.n << "\n";
    }
    const Stat cr_first = stat_of(cr_means);
    out << prefix << "all," << var << "," << num(cr_first.mean) << "," << num(cr_first.stddev) << ","
        << total << "\n";
    std::vector<double> seed_means;
    for (const auto& [s, xs] : by_seed) seed_means.push_back(stat_of(xs).mean);
    const Stat seed_first = stat_of(seed_means);
    out << prefix << "all_seed_first," << var << "," << num(seed_first.mean) << ","
        << num(seed_first.stddev) << "," << total << "\n";
  }
}

void write_cr_std(std::ostream& out, const AblationRun& run) {
  out << "case,model,tr,variable,std_over_cr,n_cr\n";
  for (const auto& [key, by_cr] : group(run)) {
    const auto& [c, rank, model, tr, v] = key;
    std::vector<double> cr_means;
    for (const auto& [cr, seeds] : by_cr) {
      std::vector<double> xs;
      for (const auto& [s, e] : seeds) xs.push_back(e);
      cr_means.push_back(stat_of(xs).mean);
    }
    out << to_string(static_cast<CaseId>(c)) << "," << model << "," << format_rate(tr) << ","
        << to_string(static_cast<Variable>(v)) << "," << num(stat_of(cr_means).stddev) << ","
        << cr_means.size() << "\n";
  }
}

void write_coefficient_table(std::ostream& out, const AblationRun& run) {
  out << "case,tr,a,b,c,n\n";
  std::map<std::pair<int, double>, std::vector<PhysicsCoefficients>> g;
  for (const auto& r : run.results) {
    if (r.failed || !r.coefficients) continue;
    g[{static_cast<int>(r.cell.case_id), r.cell.tr}].push_back(*r.coefficients);
  }
  for (const auto& [key, ks] : g) {
    std::array<double, 3> sum{};
    for (const auto& k : ks) {
      const auto a = k.as_array();
      for (std::size_t i = 0; i < 3; ++i) sum[i] += a[i];
    }
    const double n = static_cast<double>(ks.size());
    out << to_string(static_cast<CaseId>(key.first)) << "," << format_rate(key.second) << ","
        << num(sum[0] / n, 8) << "," << num(sum[1] / n, 8) << "," << num(sum[2] / n, 8) << "," << ks.size()
        << "\n";
  }
}

void write_cells(std::ostream& out, const AblationRun& run) {
  out << "case,model,tr,cr,split_seed,variable,rmse,best_restart,a,b,c,status\n";
  for (const auto& r : run.results) {
    const std::string prefix = to_string(r.cell.case_id) + "," + r.cell.model + "," + format_rate(r.cell.tr) +
                               "," + format_rate(r.cell.cr) + "," + std::to_string(r.cell.split_seed) + ",";
    std::string coeffs = ",,";
    if (r.coefficients) {
      coeffs = num(r.coefficients->a, 8) + "," + num(r.coefficients->b, 8) + "," + num(r.coefficients->c, 8);
    }
    if (r.failed) {
      std::string msg = r.error;
      for (char& ch : msg) {
        if (ch == ',' || ch == '\n') ch = ';';
      }
      out << prefix << ",,,,,,failed: " << msg << "\n";
      continue;
    }
    for (const auto& [v, e] : r.rmse) {
      out << prefix << to_string(v) << "," << num(e) << "," << r.best_restart << "," << coeffs << ",ok\n";
    }
  }
}

void write_masks(std::ostream& out, const AblationRun& run) {
  out << "case,tr,cr,split_seed,date,start,length\n";
  for (const auto& m : run.masks) {
    out << to_string(m.case_id) << "," << format_rate(m.tr) << "," << format_rate(m.cr) << "," << m.split_seed
        << "," << m.date << "," << m.start << "," << m.length << "\n";
  }
}

void write_specs(std::ostream& out, const AblationRun& run) {
  out << "case,model,cr,filters_external,filters_internal,kernel,learning_rate,batch_size,physics_weight\n";
  for (const auto& [key, s] : run.specs_used) {
    const auto& [c, k, cr] = key;
    out << to_string(c) << "," << to_string(k) << "," << format_rate(cr) << "," << s.filters_external << ","
        << s.filters_internal << "," << s.kernel << "," << std::setprecision(10) << s.learning_rate << ","
        << s.batch_size << "," << s.physics_weight << "\n";
  }
}

void write_ablation_reports(const std::filesystem::path& dir, const AblationRun& run) {
  std::filesystem::create_directories(dir);
  {
    auto f = open_out(dir / "rmse.csv");
    write_rmse_table(f, run);
  }
  {
    auto f = open_out(dir / "cr_std.csv");
    write_cr_std(f, run);
  }
  {
    auto f = open_out(dir / "coefficients.csv");
    write_coefficient_table(f, run);
  }
  {
    auto f = open_out(dir / "cells.csv");
    write_cells(f, run);
  }
  {
    auto f = open_out(dir / "masks.csv");
    write_masks(f, run);
  }
  {
    auto f = open_out(dir / "specs.csv");
    write_specs(f, run);
  }
  {
    auto f = open_out(dir / "notes.txt");
    for (const auto& n : run.notes) f << n << "\n";
    f << "failures: " << run.failures << "\n";
  }
  auto f = open_out(dir / "timings.csv");
  f << "case,model,tr,cr,split_seed,running_time_s,inference_time_per_day_s\n";
  for (const auto& r : run.results) {
    if (r.failed || r.running_time_s == 0.0) continue;
    f << to_string(r.cell.case_id) << "," << r.cell.model << "," << format_rate(r.cell.tr) << ","
      << format_rate(r.cell.cr) << "," << r.cell.split_seed << "," << num(r.running_time_s, 4) << ","
      << std::scientific << std::setprecision(4) << r.inference_time_per_day_s << std::defaultfloat << "\n";
  }
}

void write_coefficient_study(std::ostream& out, const CoefficientStudy& study) {
  out << "trial,a0,b0,c0,a,b,c\n";
  for (std::size_t i = 0; i < study.trials.size(); ++i) {
    const auto& t = study.trials[i];
    out << i << "," << num(t.start.a, 8) << "," << num(t.start.b, 8) << "," << num(t.start.c, 8) << ","
        << num(t.final.a, 8) << "," << num(t.final.b, 8) << "," << num(t.final.c, 8) << "\n";
  }
  const auto rd = study.relative_dispersion();
  out << "mean,,,," << num(study.mean.a, 8) << "," << num(study.mean.b, 8) << "," << num(study.mean.c, 8) << "\n";
  out << "std,,,," << num(study.stddev.a, 8) << "," << num(study.stddev.b, 8) << "," << num(study.stddev.c, 8)
      << "\n";
  out << "std_over_mean,,,," << num(rd[0]) << "," << num(rd[1]) << "," << num(rd[2]) << "\n";
}

void write_timing_report(std::ostream& out, const std::vector<TimingRow>& rows) {
  out << "model,days,running_time_s,inference_time_s\n";
  for (const auto& r : rows) {
    out << to_string(r.model) << "," << r.days << "," << num(r.running_time_s, 4) << "," << std::scientific
        << std::setprecision(6) << r.inference_time_s << std::defaultfloat << "\n";
  }
}

}  // namespace pidae

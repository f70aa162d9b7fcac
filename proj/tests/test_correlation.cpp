#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "pidae/correlation.hpp"
#include "pidae/errors.hpp"

using namespace pidae;

namespace {

// Days whose Q_cool IQR is `cool_iqr` and Q_hw IQR is `heat_iqr`: 24 steps
// at 0 then 24 at the full value, so both quartiles land on a plateau.
DailyProfile day_with_iqr(const std::string& date, double cool_iqr, double heat_iqr, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  DailyProfile p;
  p.date = date;
  Series ra{}, oa{}, qc{}, qh{};
  for (std::size_t t = 0; t < 48; ++t) {
    const double step = t < 24 ? 0.0 : 1.0;
    qc[t] = cool_iqr * step;
    qh[t] = heat_iqr * step;
    oa[t] = 15.0 + 0.1 * qc[t] + n(rng);
    ra[t] = 22.0 + n(rng);
  }
  p.values = {{Variable::TRaAvg, ra}, {Variable::TOaAvg, oa}, {Variable::QCoolTot, qc}, {Variable::QHw, qh}};
  return p;
}

}  // namespace

TEST_CASE("pearson basics") {
  std::vector<double> x{1, 2, 4, 8, 3}, neg, shifted;
  for (double v : x) {
    neg.push_back(-v);
    shifted.push_back(3.0 * v + 7.0);
  }
  CHECK(pearson(x, x) == doctest::Approx(1.0));
  CHECK(pearson(x, neg) == doctest::Approx(-1.0));
  std::vector<double> y{2, 1, 5, 3, 3};
  CHECK(pearson(shifted, y) == doctest::Approx(pearson(x, y)));
  // Independent two-pass evaluation.
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < 5; ++i) mx += x[i] / 5, my += y[i] / 5;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < 5; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  CHECK(pearson(x, y) == doctest::Approx(sxy / std::sqrt(sxx * syy)).epsilon(1e-12));

  std::vector<double> c{2, 2, 2, 2, 2};
  CHECK_THROWS_AS(pearson(x, c), UndefinedCorrelationError);
  CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), ArgumentError);
  CHECK_THROWS_AS(pearson(x, std::vector<double>{1, 2}), ArgumentError);
}

TEST_CASE("linear quantiles and IQR") {
  CHECK(quantile_linear({1, 2, 3, 4, 5, 6, 7, 8}, 0.25) == doctest::Approx(2.75));
  CHECK(quantile_linear({8, 7, 6, 5, 4, 3, 2, 1}, 0.75) == doctest::Approx(6.25));
  DailyProfile p;
  Series s{};
  for (std::size_t i = 0; i < 48; ++i) s[i] = static_cast<double>(i % 8 + 1);
  p.values[Variable::QHw] = s;
  CHECK(daily_iqr(p, Variable::QHw) == doctest::Approx(quantile_linear(std::vector<double>(s.begin(), s.end()), 0.75) -
                                                         quantile_linear(std::vector<double>(s.begin(), s.end()), 0.25)));
  Series flat{};
  flat.fill(4.0);
  p.values[Variable::QHw] = flat;
  CHECK(daily_iqr(p, Variable::QHw) == 0.0);
}

TEST_CASE("filter_days: strict thresholds, zero unconstrained, monotone") {
  Dataset ds;
  ds.days.push_back(day_with_iqr("2018-01-01", 0.0, 0.0, 1));
  ds.days.push_back(day_with_iqr("2018-01-02", 30.0, 5.0, 2));
  ds.days.push_back(day_with_iqr("2018-01-03", 60.0, 25.0, 3));
  ds.days.push_back(day_with_iqr("2018-01-04", 50.0, 20.0, 4));
  CHECK(daily_iqr(ds.days[3], Variable::QCoolTot) == doctest::Approx(50.0));

  CHECK(filter_days(ds, 0, 0).size() == 4);
  CHECK(filter_days(ds, 50, 20).size() == 1);  // 50/20 itself is not strictly above
  CHECK(filter_days(ds, 20, 0).size() == 3);
  CHECK(filter_days(ds, 0, 10).size() == 2);
  CHECK(filter_days(ds, 1e9, 1e9).empty());

  std::size_t last = ds.size();
  for (double thr : {0.0, 10.0, 20.0, 30.0, 40.0, 50.0, 60.0}) {
    const std::size_t n = filter_days(ds, thr, 0).size();
    CHECK(n <= last);
    last = n;
  }
}

TEST_CASE("correlation table pools timesteps and skips empty rows") {
  Dataset ds;
  for (int d = 0; d < 6; ++d) {
    ds.days.push_back(day_with_iqr("2018-02-0" + std::to_string(d + 1), 10.0 * d + 5.0, 4.0 * d + 1.0, 10 + d));
  }
  const auto grid = default_threshold_grid();
  CHECK(grid == std::vector<double>{0, 10, 20, 30, 40, 50});
  const auto rows = correlation_table(ds, grid, grid);
  REQUIRE_FALSE(rows.empty());
  CHECK(rows.front().days == 6);
  for (const auto& r : rows) {
    CHECK(r.days > 0);
    for (double p : r.pcc) CHECK(std::abs(p) <= 1.0);
  }
  // Pooled, not per-day: compare with concatenated series.
  std::vector<double> oa, qc;
  for (const auto& d : ds.days) {
    oa.insert(oa.end(), d.at(Variable::TOaAvg).begin(), d.at(Variable::TOaAvg).end());
    qc.insert(qc.end(), d.at(Variable::QCoolTot).begin(), d.at(Variable::QCoolTot).end());
  }
  CHECK(rows.front().pcc[3] == doctest::Approx(pearson(oa, qc)));

  std::ostringstream out;
  write_correlation_table(out, rows);
  CHECK(out.str().rfind("iqr_cool", 0) == 0);
}

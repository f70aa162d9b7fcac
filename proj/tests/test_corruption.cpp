#include <doctest.h>

#include <map>

#include "pidae/corruption.hpp"
#include "pidae/errors.hpp"

using namespace pidae;

namespace {

DailyProfile ramp_profile() {
  DailyProfile p;
  p.date = "2018-07-01";
  for (Variable v : kAllVariables) {
    Series s{};
    for (std::size_t i = 0; i < 48; ++i) s[i] = 1.0 + static_cast<double>(i) + 100.0 * static_cast<int>(v);
    p.values[v] = s;
  }
  return p;
}

const std::vector<Variable> kTargets = {Variable::TRaAvg, Variable::QCoolTot, Variable::QHw};

}  // namespace

TEST_CASE("run length rounds half up") {
  CHECK(run_length(0.2) == 10);  // 9.6
  CHECK(run_length(0.4) == 19);  // 19.2
  CHECK(run_length(0.6) == 29);  // 28.8
  CHECK(run_length(0.8) == 38);  // 38.4
  CHECK(run_length(1.0) == 48);
  CHECK(run_length(0.5 / 48.0) == 1);  // exactly 0.5 rounds up
  CHECK_THROWS_AS(run_length(0.0), ArgumentError);
  CHECK_THROWS_AS(run_length(1.01), ArgumentError);
  CHECK_THROWS_AS(run_length(-0.2), ArgumentError);
}

TEST_CASE("masks are contiguous, in range and of the rounded length") {
  Rng rng(5);
  std::map<std::size_t, int> starts;
  for (int i = 0; i < 10000; ++i) {
    const double cr = (i % 4 + 1) * 0.2;
    const CorruptionMask m = make_mask(cr, rng);
    const std::size_t len = run_length(cr);
    REQUIRE(m.length() == len);
    REQUIRE(m.start() + len <= 48);
    std::size_t count = 0;
    for (std::size_t t = 0; t < 48; ++t) {
      const bool inside = t >= m.start() && t < m.start() + len;
      REQUIRE(m[t] == inside);
      count += m[t];
    }
    REQUIRE(count == len);
    if (cr == 0.2) ++starts[m.start()];
  }
  // All 39 admissible starts for L = 10 are reached.
  CHECK(starts.size() == 39);
}

TEST_CASE("full corruption and determinism") {
  const CorruptionMask all = make_mask(1.0, 3);
  for (std::size_t t = 0; t < 48; ++t) CHECK(all[t]);
  CHECK(make_mask(0.4, 17) == make_mask(0.4, 17));
  CHECK_THROWS_AS(CorruptionMask::run(40, 10), ArgumentError);
}

TEST_CASE("corrupt zeroes the run and never touches T_oa") {
  const DailyProfile p = ramp_profile();
  const DailyProfile same = corrupt(p, CorruptionMask{}, kTargets);
  CHECK(same.values == p.values);

  const CorruptionMask m = CorruptionMask::run(10, 10);
  const std::vector<Variable> all(kAllVariables.begin(), kAllVariables.end());
  const DailyProfile c = corrupt(p, m, all);
  for (Variable v : kTargets) {
    for (std::size_t t = 0; t < 48; ++t) {
      if (t >= 10 && t < 20) {
        CHECK(c.at(v)[t] == 0.0);
      } else {
        CHECK(c.at(v)[t] == p.at(v)[t]);
      }
    }
  }
  CHECK(c.at(Variable::TOaAvg) == p.at(Variable::TOaAvg));
}

TEST_CASE("augment sizes, originals first, determinism") {
  std::vector<DailyProfile> days(9, ramp_profile());
  const std::vector<double> crs{0.2, 0.8};
  const auto none = augment(days, 0, crs, kTargets, 1);
  REQUIRE(none.size() == 9);
  for (const auto& pr : none) {
    CHECK_FALSE(pr.synthetic);
    CHECK(pr.input.values == pr.target.values);
  }

  const auto a = augment(days, 4, crs, kTargets, 42);
  REQUIRE(a.size() == 45);
  std::size_t synthetic = 0;
  for (const auto& pr : a) {
    if (!pr.synthetic) continue;
    ++synthetic;
    CHECK((pr.mask.length() == 10 || pr.mask.length() == 38));
    CHECK(pr.input.values == corrupt(pr.target, pr.mask, kTargets).values);
  }
  CHECK(synthetic == 36);
  for (std::size_t i = 0; i < 9; ++i) CHECK_FALSE(a[i].synthetic);

  const auto b = augment(days, 4, crs, kTargets, 42);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].mask == b[i].mask);
}

#include <doctest.h>

#include "pidae/errors.hpp"
#include "pidae/physics.hpp"
#include "pidae/synthetic.hpp"

using namespace pidae;

TEST_CASE("noiseless oracle satisfies the balance at every step") {
  SyntheticOptions opt;
  opt.days = 30;
  opt.seed = 12;
  const Dataset ds = generate_synthetic(opt);
  REQUIRE(ds.size() == 30);
  CHECK(ds.days[0].date == "2000-01-01");
  CHECK(ds.days[0].at(Variable::TRaAvg)[0] == 21.0);
  for (const auto& d : ds.days) {
    for (double r : residual(ThermalSeries::of(d), opt.truth)) CHECK(std::abs(r) <= 1e-12);
    for (double q : d.at(Variable::QCoolTot)) CHECK((q >= 0.0 && q <= 60.0));
    for (double q : d.at(Variable::QHw)) CHECK((q >= 0.0 && q <= 20.0));
  }
  // T_ra is continuous across the day boundary.
  const auto& d0 = ds.days[0];
  const double next = d0.at(Variable::TRaAvg)[47] +
                      opt.truth.a * (d0.at(Variable::TOaAvg)[47] - d0.at(Variable::TRaAvg)[47]) -
                      opt.truth.b * d0.at(Variable::QCoolTot)[47] + opt.truth.c * d0.at(Variable::QHw)[47];
  CHECK(ds.days[1].at(Variable::TRaAvg)[0] == doctest::Approx(next).epsilon(1e-14));
}

TEST_CASE("determinism and noise isolation") {
  SyntheticOptions opt;
  opt.days = 5;
  opt.seed = 3;
  const Dataset a = generate_synthetic(opt);
  const Dataset b = generate_synthetic(opt);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a.days[i].values == b.days[i].values);

  opt.noise = 0.05;
  const Dataset n = generate_synthetic(opt);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(n.days[i].at(Variable::QCoolTot) == a.days[i].at(Variable::QCoolTot));
    CHECK(n.days[i].at(Variable::TOaAvg) == a.days[i].at(Variable::TOaAvg));
    for (std::size_t t = 0; t < 48; ++t) {
      CHECK(std::abs(n.days[i].at(Variable::TRaAvg)[t] - a.days[i].at(Variable::TRaAvg)[t]) <= 0.05);
    }
  }
}

TEST_CASE("divergent or out-of-range coefficients are rejected") {
  SyntheticOptions opt;
  opt.days = 10;
  opt.truth = {2.5, 0.02, 0.05};
  CHECK_THROWS_AS(generate_synthetic(opt), ArgumentError);
  opt.truth = {0.0, 0.02, 0.05};
  CHECK_THROWS_AS(generate_synthetic(opt), ArgumentError);
  CHECK_THROWS_AS(generate_synthetic(SyntheticOptions{{0.1, 0.02, 0.05}, 0, 0.0, 0}), ArgumentError);
}

TEST_CASE("over the default coefficient box, output never leaves [0, 45] degC") {
  int accepted = 0;
  for (double a : {0.05, 0.1, 0.2, 0.3}) {
    for (double b : {0.005, 0.02, 0.05, 0.1}) {
      for (double c : {0.005, 0.05, 0.1}) {
        SyntheticOptions opt;
        opt.days = 20;
        opt.truth = {a, b, c};
        try {
          const Dataset ds = generate_synthetic(opt);
          ++accepted;
          for (const auto& d : ds.days) {
            for (double t : d.at(Variable::TRaAvg)) CHECK((t >= 0.0 && t <= 45.0));
          }
        } catch (const ArgumentError&) {
          // Generation aborts rather than returning out-of-range data.
        }
      }
    }
  }
  CHECK(accepted > 0);
}

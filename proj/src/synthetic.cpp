#include "pidae/synthetic.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <string>

#include "pidae/data_pipeline.hpp"
#include "pidae/errors.hpp"
#include "pidae/rng.hpp"

namespace pidae {

Dataset generate_synthetic(const SyntheticOptions& opt) {
  const auto& k = opt.truth;
  if (opt.days < 1) throw ArgumentError("synthetic dataset needs at least one day");
  if (opt.noise < 0.0 || !std::isfinite(opt.noise)) throw ArgumentError("noise amplitude must be >= 0");
  if (!(k.a > 0.0 && k.a < 2.0)) {
    throw ArgumentError("coefficient a = " + std::to_string(k.a) +
                        " gives |1 - a| >= 1; forward integration would not contract");
  }

  Rng rng(opt.seed);
  std::uniform_real_distribution<double> offset(-4.0, 4.0);
  std::uniform_real_distribution<double> cool_amp(0.0, 60.0), heat_amp(0.0, 20.0);
  std::uniform_real_distribution<double> cool_center(24.0, 32.0), heat_center(10.0, 18.0);
  std::uniform_real_distribution<double> cool_width(4.0, 7.0), heat_width(3.0, 6.0);
  std::uniform_real_distribution<double> noise(-opt.noise, opt.noise);
  // Separate stream so the clean signals do not depend on the noise level.
  Rng noise_rng(derive_seed(opt.seed, {7}));

  const auto first = std::chrono::sys_days{std::chrono::year{2000} / 1 / 1};
  Dataset data;
  double t_ra = kSyntheticStartTemperature;
  for (std::size_t d = 0; d < opt.days; ++d) {
    const double off = offset(rng);
    const double ac = cool_amp(rng), mc = cool_center(rng), wc = cool_width(rng);
    const double ah = heat_amp(rng), mh = heat_center(rng), wh = heat_width(rng);

    Series oa{}, cool{}, heat{}, ra{};
    for (std::size_t t = 0; t < kStepsPerDay; ++t) {
      const double x = static_cast<double>(t);
      oa[t] = 15.0 + 8.0 * std::sin(2.0 * std::numbers::pi * x / 48.0 - std::numbers::pi / 2.0) + off;
      cool[t] = ac * std::exp(-0.5 * std::pow((x - mc) / wc, 2));
      heat[t] = ah * std::exp(-0.5 * std::pow((x - mh) / wh, 2));
    }
    for (std::size_t t = 0; t < kStepsPerDay; ++t) {
      ra[t] = t_ra;
      if (t_ra < kSyntheticMinTemperature || t_ra > kSyntheticMaxTemperature || !std::isfinite(t_ra)) {
        throw ArgumentError("synthetic T_ra left [0, 45] degC on day " + std::to_string(d) +
                            " (value " + std::to_string(t_ra) + ")");
      }
      t_ra += k.a * (oa[t] - t_ra) - k.b * cool[t] + k.c * heat[t];
    }
    if (opt.noise > 0.0) {
      for (double& v : ra) v += noise(noise_rng);
    }

    DailyProfile day;
    day.date = format_date(first + std::chrono::days{static_cast<int>(d)});
    day.values[Variable::TRaAvg] = ra;
    day.values[Variable::TOaAvg] = oa;
    day.values[Variable::QCoolTot] = cool;
    day.values[Variable::QHw] = heat;
    data.days.push_back(std::move(day));
  }
  return data;
}

}  // namespace pidae

#include "pidae/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <numeric>
#include <thread>

#include "pidae/baselines.hpp"
#include "pidae/correlation.hpp"
#include "pidae/data_pipeline.hpp"
#include "pidae/rng.hpp"
#include "pidae/synthetic.hpp"
#include "pidae/tuning.hpp"

namespace pidae {

namespace {

using Clock = std::chrono::steady_clock;

const std::vector<Variable> kImputedVariables = {Variable::TRaAvg, Variable::QCoolTot, Variable::QHw};

std::uint64_t rate_key(double r) { return static_cast<std::uint64_t>(std::llround(r * 1e6)); }
std::uint64_t case_key(CaseId c) { return static_cast<std::uint64_t>(c) + 1; }

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

// Runs jobs[0..n) on `workers` threads; each job must only touch its own slot.
void run_jobs(std::size_t n, int workers, const std::function<void(std::size_t)>& job) {
  std::atomic<std::size_t> next{0};
  auto loop = [&] {
    for (std::size_t i = next++; i < n; i = next++) job(i);
  };
  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n)));
  if (threads == 1) {
    loop();
    return;
  }
  std::vector<std::jthread> pool;
  for (int t = 0; t < threads; ++t) pool.emplace_back(loop);
}

std::vector<DailyProfile> impute_eval(const DaeModel& model, const Dataset& eval,
                                      const std::vector<CorruptionMask>& masks) {
  std::vector<DailyProfile> out;
  out.reserve(eval.size());
  for (std::size_t i = 0; i < eval.size(); ++i) out.push_back(impute(model, eval.days[i], masks[i]));
  return out;
}

}  // namespace

SplitIndices split_indices(std::size_t n, double tr, std::uint64_t seed, double val_rate) {
  if (!(tr > 0.0 && tr <= 0.5)) throw ArgumentError("training rate must lie in (0, 0.5]");
  const auto n_train = static_cast<std::size_t>(std::floor(tr * static_cast<double>(n) + 1e-9));
  const auto n_val =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(val_rate * static_cast<double>(n) + 1e-9)));
  if (n_train < 1 || n_train + n_val >= n) {
    throw ArgumentError("dataset of " + std::to_string(n) + " days is too small for a split at tr = " +
                        format_rate(tr));
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(seed);
  std::shuffle(perm.begin(), perm.end(), rng);

  SplitIndices s;
  s.train.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
  s.val.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train),
               perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val));
  s.eval.assign(perm.begin() + static_cast<std::ptrdiff_t>(n_train + n_val), perm.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.eval.begin(), s.eval.end());
  return s;
}

DataSplit split(const Dataset& data, double tr, std::uint64_t seed, double val_rate) {
  const SplitIndices idx = split_indices(data.size(), tr, seed, val_rate);
  return {data.subset(idx.train), data.subset(idx.val), data.subset(idx.eval)};
}

DataSplit case_split(const HarnessConfig& cfg, CaseId case_id, const Dataset& data, double tr,
                     int split_seed) {
  const std::uint64_t seed =
      derive_seed(cfg.seed, {case_key(case_id), 0x5b117, static_cast<std::uint64_t>(split_seed)});
  return split(data, tr, seed, cfg.validation_rate);
}

VariableErrors rmse(std::span<const DailyProfile> imputed, std::span<const DailyProfile> truth,
                    std::span<const CorruptionMask> masks, std::span<const Variable> variables) {
  if (imputed.size() != truth.size() || masks.size() != truth.size()) {
    throw ArgumentError("rmse: imputed, truth and masks differ in length");
  }
  std::size_t masked = 0;
  for (const auto& m : masks) masked += m.length();
  if (masked == 0) throw ArgumentError("rmse: no masked entries");

  VariableErrors out;
  for (Variable v : variables) {
    double sum = 0.0;
    for (std::size_t d = 0; d < truth.size(); ++d) {
      const Series& p = imputed[d].at(v);
      const Series& t = truth[d].at(v);
      for (std::size_t s = 0; s < kStepsPerDay; ++s) {
        if (!masks[d][s]) continue;
        const double e = p[s] - t[s];
        sum += e * e;
      }
    }
    out[v] = std::sqrt(sum / static_cast<double>(masked));
  }
  return out;
}

std::map<CaseId, Dataset> load_cases(const HarnessConfig& cfg, std::vector<std::string>* notes) {
  std::map<CaseId, Dataset> cases;
  auto note = [&](const std::string& s) {
    if (notes) notes->push_back(s);
  };
  const bool want_real = std::any_of(cfg.cases.begin(), cfg.cases.end(),
                                     [](CaseId c) { return c != CaseId::Synthetic; });
  if (want_real) {
    std::optional<Dataset> full;
    if (!cfg.dataset_path.empty()) {
      full = read_dataset_file(cfg.dataset_path);
    } else if (!cfg.raw_path.empty()) {
      const auto units = cfg.raw_units == "imperial" ? SourceUnits::Imperial : SourceUnits::Si;
      full = prepare_dataset(read_raw_records_file(cfg.raw_path, units)).dataset;
    }
    if (!full) {
      note("no measured dataset configured; Case1/Case2 skipped");
    } else {
      for (CaseId c : cfg.cases) {
        if (c == CaseId::Case1) cases[c] = *full;
        if (c == CaseId::Case2) cases[c] = filter_days(*full, cfg.case2_iqr_cool, cfg.case2_iqr_heat);
      }
    }
  }
  if (std::find(cfg.cases.begin(), cfg.cases.end(), CaseId::Synthetic) != cfg.cases.end()) {
    SyntheticOptions opt;
    opt.truth = cfg.synthetic_truth;
    opt.days = cfg.synthetic_days;
    opt.noise = cfg.synthetic_noise;
    opt.seed = derive_seed(cfg.seed, {0x5e7});
    cases[CaseId::Synthetic] = generate_synthetic(opt);
  }
  return cases;
}

std::vector<CorruptionMask> evaluation_masks(std::size_t days, double cr, int split_seed,
                                             std::uint64_t base_seed) {
  Rng rng(derive_seed(base_seed, {0xe7a1, static_cast<std::uint64_t>(split_seed), rate_key(cr)}));
  std::vector<CorruptionMask> masks;
  masks.reserve(days);
  for (std::size_t i = 0; i < days; ++i) masks.push_back(make_mask(cr, rng));
  return masks;
}

int ExperimentCell::model_rank() const {
  if (model == "LIN") return 0;
  if (model == "KNN") return 1;
  for (std::size_t i = 0; i < kAllModelKinds.size(); ++i) {
    if (to_string(kAllModelKinds[i]) == model) return static_cast<int>(i) + 2;
  }
  return 100;
}

bool operator<(const ExperimentCell& a, const ExperimentCell& b) {
  return std::tuple(static_cast<int>(a.case_id), a.model_rank(), a.tr, a.cr, a.split_seed) <
         std::tuple(static_cast<int>(b.case_id), b.model_rank(), b.tr, b.cr, b.split_seed);
}

TrainedModel train_one(const HarnessConfig& cfg, CaseId case_id, const DataSplit& data,
                       const ModelSpec& spec, double tr, double cr, int split_seed, int restart,
                       const PhysicsCoefficients& coefficient_init) {
  const NormalizationStats stats = fit_normalization(data.train);
  const Dataset train_n = normalize(data.train, stats);
  const Dataset val_n = normalize(data.val, stats);
  const auto targets = target_variables(spec.kind);

  const std::uint64_t base = derive_seed(cfg.seed, {case_key(case_id), rate_key(tr), rate_key(cr),
                                                    static_cast<std::uint64_t>(split_seed),
                                                    static_cast<std::uint64_t>(restart)});
  const std::vector<double> rates{cr};
  auto pairs = augment(train_n.days, cfg.augment_copies, rates, targets, derive_seed(base, {1}));

  DaeModel model = DaeModel::build(spec, derive_seed(base, {2}), coefficient_init);
  model.set_stats(stats);
  TrainingLimits limits = cfg.limits;
  limits.corruption_rates = rates;
  return train(std::move(model), std::move(pairs), val_n.days, derive_seed(base, {3}), limits);
}

RestartOutcome train_with_restarts(const HarnessConfig& cfg, CaseId case_id, const DataSplit& data,
                                   const ModelSpec& spec, double tr, double cr, int split_seed,
                                   int restarts, const PhysicsCoefficients& coefficient_init) {
  std::optional<RestartOutcome> best;
  for (int r = 0; r < restarts; ++r) {
    TrainedModel t = train_one(cfg, case_id, data, spec, tr, cr, split_seed, r, coefficient_init);
    if (!best || t.best_val_loss < best->trained.best_val_loss) best = RestartOutcome{std::move(t), r};
  }
  return std::move(*best);
}

AblationRun run_ablation(const HarnessConfig& cfg, const std::map<CaseId, Dataset>& cases,
                         const ProgressCallback& progress) {
  AblationRun run;
  std::vector<CaseId> active;
  for (CaseId c : cfg.cases) {
    if (cases.count(c)) {
      active.push_back(c);
    } else {
      run.notes.push_back(to_string(c) + ": no data available, skipped");
    }
  }

  // Specs per (case, kind, cr), tuned in-harness when enabled.
  for (CaseId c : active) {
    for (double cr : cfg.corruption_rates) {
      for (ModelKind k : cfg.models) {
        run.specs_used[{c, k, cr}] = cfg.spec_for(k, cr);
      }
      if (!cfg.tune) continue;
      const double tr = *std::max_element(cfg.training_rates.begin(), cfg.training_rates.end());
      const DataSplit data = case_split(cfg, c, cases.at(c), tr, 0);
      HarnessConfig tcfg = cfg;
      tcfg.limits.max_epochs = cfg.tuning_max_epochs;
      for (ModelKind k : cfg.models) {
        if (k == ModelKind::PiDae) continue;
        auto objective = [&](const ModelSpec& s, int trial) {
          return train_one(tcfg, c, data, s, tr, cr, 0, 1000 + trial).best_val_loss;
        };
        const auto result = random_search(k, cfg.search_space, cfg.tuning_budget, objective,
                                          derive_seed(cfg.seed, {0x7e, case_key(c), rate_key(cr),
                                                                 static_cast<std::uint64_t>(k)}));
        run.specs_used[{c, k, cr}] = result.best;
      }
      if (run.specs_used.count({c, ModelKind::PiDae, cr})) {
        ModelSpec pi = run.specs_used.at({c, ModelKind::MultivariateDae2, cr}).with_kind(ModelKind::PiDae);
        pi.physics_weight = cfg.spec_for(ModelKind::PiDae, cr).physics_weight;
        run.specs_used[{c, ModelKind::PiDae, cr}] = pi;
      }
    }
  }

  struct Job {
    CaseId case_id;
    double tr, cr;
    int split_seed;
    std::optional<ModelKind> kind;  // empty = baselines
  };
  std::vector<Job> jobs;
  for (CaseId c : active) {
    for (double tr : cfg.training_rates) {
      for (double cr : cfg.corruption_rates) {
        for (int s = 0; s < cfg.split_seeds; ++s) {
          jobs.push_back({c, tr, cr, s, std::nullopt});
          for (ModelKind k : cfg.models) jobs.push_back({c, tr, cr, s, k});
        }
      }
    }
  }

  std::vector<std::vector<ExperimentResult>> slots(jobs.size());
  std::vector<std::vector<MaskRecord>> mask_slots(jobs.size());
  std::mutex progress_mutex;

  run_jobs(jobs.size(), cfg.workers, [&](std::size_t j) {
    const Job& job = jobs[j];
    const Dataset& data = cases.at(job.case_id);
    auto fresh = [&](const std::string& model) {
      ExperimentResult r;
      r.cell = {job.case_id, model, job.tr, job.cr, job.split_seed};
      return r;
    };
    std::vector<ExperimentResult>& out = slots[j];
    try {
      const DataSplit ds = case_split(cfg, job.case_id, data, job.tr, job.split_seed);
      const auto masks = evaluation_masks(ds.eval.size(), job.cr, job.split_seed,
                                          derive_seed(cfg.seed, {case_key(job.case_id), rate_key(job.tr)}));
      if (!job.kind) {
        for (std::size_t i = 0; i < masks.size(); ++i) {
          mask_slots[j].push_back({job.case_id, job.tr, job.cr, job.split_seed, ds.eval.days[i].date,
                                   masks[i].start(), masks[i].length()});
        }
        std::vector<DailyProfile> lin, knn;
        const NormalizationStats stats = fit_normalization(ds.train);
        const Dataset ref = normalize(ds.train, stats);
        KnnOptions kopt;
        kopt.k = cfg.knn_k;
        for (std::size_t i = 0; i < ds.eval.size(); ++i) {
          const DailyProfile& day = ds.eval.days[i];
          lin.push_back(linear_interpolate(day, masks[i], kImputedVariables));
          DailyProfile filled = denormalize(
              knn_impute(normalize(day, stats), masks[i], ref.days, kImputedVariables, kopt), stats);
          DailyProfile k_out = day;
          for (Variable v : kImputedVariables) {
            for (std::size_t t = 0; t < kStepsPerDay; ++t) {
              if (masks[i][t]) k_out.at(v)[t] = filled.at(v)[t];
            }
          }
          knn.push_back(std::move(k_out));
        }
        ExperimentResult r_lin = fresh("LIN"), r_knn = fresh("KNN");
        r_lin.rmse = rmse(lin, ds.eval.days, masks, kImputedVariables);
        r_knn.rmse = rmse(knn, ds.eval.days, masks, kImputedVariables);
        out.push_back(std::move(r_lin));
        out.push_back(std::move(r_knn));
      } else {
        const ModelKind kind = *job.kind;
        ExperimentResult r = fresh(to_string(kind));
        const ModelSpec& spec = run.specs_used.at({job.case_id, kind, job.cr});
        const auto t0 = Clock::now();
        RestartOutcome best = train_with_restarts(cfg, job.case_id, ds, spec, job.tr, job.cr,
                                                  job.split_seed, cfg.restarts);
        r.running_time_s = seconds_since(t0);
        const auto t1 = Clock::now();
        const auto imputed = impute_eval(best.trained.model, ds.eval, masks);
        r.inference_time_per_day_s = seconds_since(t1) / static_cast<double>(ds.eval.size());
        const auto targets = target_variables(kind);
        r.rmse = rmse(imputed, ds.eval.days, masks, targets);
        r.best_restart = best.restart;
        if (spec.physics) r.coefficients = best.trained.model.coefficients();
        out.push_back(std::move(r));
      }
    } catch (const std::exception& e) {
      out.clear();
      if (!job.kind) {
        for (const char* m : {"LIN", "KNN"}) {
          out.push_back(fresh(m));
          out.back().failed = true;
          out.back().error = e.what();
        }
      } else {
        out.push_back(fresh(to_string(*job.kind)));
        out.back().failed = true;
        out.back().error = e.what();
      }
    }
    if (progress) {
      std::lock_guard lock(progress_mutex);
      for (const auto& r : out) progress(r);
    }
  });

  for (auto& s : slots) {
    for (auto& r : s) {
      if (r.failed) ++run.failures;
      run.results.push_back(std::move(r));
    }
  }
  for (auto& m : mask_slots) run.masks.insert(run.masks.end(), m.begin(), m.end());
  std::stable_sort(run.results.begin(), run.results.end(),
                   [](const ExperimentResult& a, const ExperimentResult& b) { return a.cell < b.cell; });
  return run;
}

std::array<double, 3> CoefficientStudy::relative_dispersion() const {
  const auto m = mean.as_array();
  const auto s = stddev.as_array();
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3; ++i) out[i] = s[i] / std::abs(m[i]);
  return out;
}

CoefficientStudy coefficient_study(const HarnessConfig& cfg, CaseId case_id, const Dataset& data,
                                   double tr, double cr, int trials,
                                   std::vector<PhysicsCoefficients> starts) {
  if (starts.empty()) {
    if (trials < 1) throw ArgumentError("coefficient study needs at least one trial");
    Rng rng(derive_seed(cfg.seed, {0xc0ef, case_key(case_id), rate_key(tr)}));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < trials; ++i) {
      const double a = u(rng), b = u(rng), c = u(rng);
      starts.push_back({a, b, c});
    }
  }
  CoefficientStudy study;
  study.case_id = case_id;
  study.tr = tr;
  study.cr = cr;
  study.trials.resize(starts.size());

  const DataSplit ds = case_split(cfg, case_id, data, tr, 0);
  const ModelSpec spec = cfg.spec_for(ModelKind::PiDae, cr);
  run_jobs(starts.size(), cfg.workers, [&](std::size_t i) {
    const TrainedModel t = train_one(cfg, case_id, ds, spec, tr, cr, 0, 0, starts[i]);
    study.trials[i] = {starts[i], t.model.coefficients()};
  });

  std::array<double, 3> sum{}, sq{};
  for (const auto& t : study.trials) {
    const auto f = t.final.as_array();
    for (std::size_t i = 0; i < 3; ++i) sum[i] += f[i];
  }
  const double n = static_cast<double>(study.trials.size());
  std::array<double, 3> mean{};
  for (std::size_t i = 0; i < 3; ++i) mean[i] = sum[i] / n;
  for (const auto& t : study.trials) {
    const auto f = t.final.as_array();
    for (std::size_t i = 0; i < 3; ++i) sq[i] += (f[i] - mean[i]) * (f[i] - mean[i]);
  }
  std::array<double, 3> sd{};
  for (std::size_t i = 0; i < 3; ++i) sd[i] = std::sqrt(sq[i] / n);
  study.mean = PhysicsCoefficients::from_array(mean);
  study.stddev = PhysicsCoefficients::from_array(sd);
  return study;
}

std::vector<TimingRow> timing_report(const HarnessConfig& cfg, CaseId case_id, const Dataset& data,
                                     std::span<const ModelKind> models, double tr, double cr,
                                     int repeats) {
  const DataSplit ds = case_split(cfg, case_id, data, tr, 0);
  const auto masks = evaluation_masks(ds.eval.size(), cr, 0, derive_seed(cfg.seed, {case_key(case_id), rate_key(tr)}));
  std::vector<TimingRow> rows;
  for (ModelKind kind : models) {
    const ModelSpec spec = cfg.spec_for(kind, cr);
    const auto t0 = Clock::now();
    const RestartOutcome best = train_with_restarts(cfg, case_id, ds, spec, tr, cr, 0, cfg.restarts);
    const double running = seconds_since(t0);

    std::vector<double> cumulative(ds.eval.size(), std::numeric_limits<double>::infinity());
    for (int rep = 0; rep < std::max(1, repeats); ++rep) {
      const auto start = Clock::now();
      for (std::size_t d = 0; d < ds.eval.size(); ++d) {
        const DailyProfile out = impute(best.trained.model, ds.eval.days[d], masks[d]);
        (void)out;
        cumulative[d] = std::min(cumulative[d], seconds_since(start));
      }
    }
    // Elementwise minima of nondecreasing sequences can still dip; enforce
    // the running maximum so the cumulative curve stays monotone.
    for (std::size_t d = 1; d < cumulative.size(); ++d) cumulative[d] = std::max(cumulative[d], cumulative[d - 1]);
    for (std::size_t d = 0; d < ds.eval.size(); ++d) {
      rows.push_back({kind, d + 1, running, cumulative[d]});
    }
  }
  return rows;
}

}  // namespace pidae

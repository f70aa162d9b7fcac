#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pidae/config.hpp"
#include "pidae/errors.hpp"
#include "pidae/harness.hpp"
#include "pidae/reports.hpp"
#include "pidae/synthetic.hpp"

using namespace pidae;

namespace {

HarnessConfig tiny_config() {
  HarnessConfig cfg;
  cfg.cases = {CaseId::Synthetic};
  cfg.synthetic_days = 20;
  cfg.models = {ModelKind::UnivariateDae1, ModelKind::MultivariateDae2, ModelKind::PiDae};
  cfg.split_seeds = 2;
  cfg.restarts = 1;
  cfg.training_rates = {0.3};
  cfg.corruption_rates = {0.2, 0.6};
  cfg.augment_copies = 1;
  cfg.limits.max_epochs = 3;
  for (auto& [k, s] : cfg.specs) {
    s.filters_external = 5;
    s.filters_internal = 5;
    s.kernel = 3;
  }
  return cfg;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("split sizes, disjointness and determinism") {
  const SplitIndices s = split_indices(19, 0.1, 5);
  CHECK(s.train.size() == 1);
  CHECK(s.val.size() == 1);
  CHECK(s.eval.size() == 17);
  const SplitIndices t = split_indices(100, 0.5, 5);
  CHECK(t.train.size() == 50);
  CHECK(t.val.size() == 10);
  CHECK(t.eval.size() == 40);
  std::set<std::size_t> all;
  for (const auto* part : {&t.train, &t.val, &t.eval}) {
    CHECK(std::is_sorted(part->begin(), part->end()));
    all.insert(part->begin(), part->end());
  }
  CHECK(all.size() == 100);
  CHECK(split_indices(100, 0.5, 5).train == t.train);
  CHECK(split_indices(100, 0.5, 6).train != t.train);
  CHECK_THROWS_AS(split_indices(100, 0.6, 1), ArgumentError);
  CHECK_THROWS_AS(split_indices(3, 0.1, 1), ArgumentError);
}

TEST_CASE("rmse counts masked entries only") {
  DailyProfile truth, imputed;
  Series z{}, e{};
  for (std::size_t t = 0; t < 48; ++t) e[t] = t < 4 ? 2.0 : 100.0;  // errors outside the mask are ignored
  for (std::size_t t = 0; t < 2; ++t) e[t] = 4.0;
  truth.values[Variable::QHw] = z;
  imputed.values[Variable::QHw] = e;
  const std::vector<DailyProfile> a{imputed}, b{truth};
  const std::vector<CorruptionMask> m{CorruptionMask::run(0, 4)};
  const std::vector<Variable> v{Variable::QHw};
  // sqrt((16 + 16 + 4 + 4) / 4)
  CHECK(rmse(a, b, m, v).at(Variable::QHw) == doctest::Approx(std::sqrt(10.0)));
  const std::vector<CorruptionMask> none{CorruptionMask{}};
  CHECK_THROWS_AS(rmse(a, b, none, v), ArgumentError);
}

TEST_CASE("evaluation masks are deterministic per (split seed, cr)") {
  const auto a = evaluation_masks(10, 0.4, 1, 77);
  const auto b = evaluation_masks(10, 0.4, 1, 77);
  const auto c = evaluation_masks(10, 0.4, 2, 77);
  CHECK(a == b);
  CHECK(a != c);
  for (const auto& m : a) CHECK(m.length() == 19);
}

TEST_CASE("cell ordering") {
  ExperimentCell lin{CaseId::Case2, "LIN", 0.1, 0.2, 0};
  ExperimentCell pi{CaseId::Case2, "PI_DAE", 0.1, 0.2, 0};
  ExperimentCell syn{CaseId::Synthetic, "LIN", 0.1, 0.2, 0};
  CHECK(lin < pi);
  CHECK(pi < syn);
  CHECK_FALSE(pi < lin);
}

TEST_CASE("config parsing") {
  std::istringstream in(
      "[data]\nsynthetic_days = 30\n"
      "[corruption]\nrates = 0.2, 0.4\ncopies = 2\n"
      "[model.Multivariate_DAE_2]\nfilters_external = 12\n"
      "[model.Multivariate_DAE_2@0.4]\nkernel = 7\n"
      "[model.PI_DAE]\nphysics_weight = 0\n"
      "[tuning]\nbudget = 4\n"
      "[harness]\ncases = Synthetic\nrestarts = 2\nworkers = 3\nseed = 9\n");
  const HarnessConfig cfg = parse_config(in);
  CHECK(cfg.synthetic_days == 30);
  CHECK(cfg.corruption_rates == std::vector<double>{0.2, 0.4});
  CHECK(cfg.augment_copies == 2);
  CHECK(cfg.spec_for(ModelKind::MultivariateDae2, 0.2).filters_external == 12);
  CHECK(cfg.spec_for(ModelKind::MultivariateDae2, 0.4).kernel == 7);
  const ModelSpec pi = cfg.spec_for(ModelKind::PiDae, 0.4);
  CHECK(pi.kernel == 7);
  CHECK(pi.filters_external == 12);
  CHECK(pi.physics);
  CHECK(pi.physics_weight == 0.0);
  CHECK(cfg.tuning_budget == 4);
  CHECK(cfg.cases == std::vector<CaseId>{CaseId::Synthetic});
  CHECK(cfg.restarts == 2);
  CHECK(cfg.seed == 9);

  std::istringstream bad("[nope]\nx = 1\n");
  CHECK_THROWS_AS(parse_config(bad), ArgumentError);
  std::istringstream rate("[corruption]\nrates = 1.5\n");
  CHECK_THROWS_AS(parse_config(rate), ArgumentError);
  std::istringstream spec("[model.PI_DAE]\nkernel = 40\n");
  CHECK_THROWS_AS(parse_config(spec), SpecError);
}

TEST_CASE("load_cases without measured data") {
  HarnessConfig cfg = tiny_config();
  cfg.cases = {CaseId::Case2, CaseId::Synthetic};
  std::vector<std::string> notes;
  const auto cases = load_cases(cfg, &notes);
  CHECK(cases.count(CaseId::Synthetic) == 1);
  CHECK(cases.count(CaseId::Case2) == 0);
  CHECK(cases.at(CaseId::Synthetic).size() == 20);
  CHECK_FALSE(notes.empty());
}

TEST_CASE("ablation: scheduling-independent reports and physics-off equivalence") {
  HarnessConfig cfg = tiny_config();
  cfg.specs[ModelKind::PiDae].physics_weight = 0.0;
  const auto cases = load_cases(cfg);
  const AblationRun one = run_ablation(cfg, cases);
  cfg.workers = 3;
  const AblationRun three = run_ablation(cfg, cases);
  CHECK(one.failures == 0);
  // 2 seeds x 2 CRs x (LIN, KNN + 3 models)
  CHECK(one.results.size() == 20);

  std::ostringstream a, b;
  write_rmse_table(a, one);
  write_rmse_table(b, three);
  CHECK(a.str() == b.str());
  std::ostringstream ca, cb;
  write_cells(ca, one);
  write_cells(cb, three);
  CHECK(ca.str() == cb.str());

  for (const auto& r : one.results) {
    if (r.cell.model != "PI_DAE") continue;
    const auto twin = std::find_if(one.results.begin(), one.results.end(), [&](const ExperimentResult& o) {
      return o.cell.model == "Multivariate_DAE_2" && o.cell.cr == r.cell.cr && o.cell.split_seed == r.cell.split_seed;
    });
    REQUIRE(twin != one.results.end());
    CHECK(twin->rmse == r.rmse);
  }

  const auto dir = std::filesystem::temp_directory_path() / "pidae_harness_test";
  std::filesystem::remove_all(dir);
  write_ablation_reports(dir, one);
  for (const char* f : {"rmse.csv", "cr_std.csv", "coefficients.csv", "cells.csv", "masks.csv", "specs.csv"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  const std::string table = slurp(dir / "rmse.csv");
  CHECK(table.rfind("case,model,tr,cr,variable,rmse_mean,rmse_std,n\n", 0) == 0);
  CHECK(table.find("Synthetic,LIN,0.3,all,Q_cool_tot,") != std::string::npos);
  CHECK(table.find("Synthetic,LIN,0.3,all_seed_first,Q_cool_tot,") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("coefficient study from (1,1,1) matches the ablation's PI-DAE") {
  HarnessConfig cfg = tiny_config();
  cfg.models = {ModelKind::PiDae};
  cfg.split_seeds = 1;
  cfg.corruption_rates = {0.2};
  const auto cases = load_cases(cfg);
  const AblationRun run = run_ablation(cfg, cases);
  const auto pi = std::find_if(run.results.begin(), run.results.end(),
                               [](const ExperimentResult& r) { return r.cell.model == "PI_DAE"; });
  REQUIRE(pi != run.results.end());
  REQUIRE(pi->coefficients.has_value());
  const CoefficientStudy study =
      coefficient_study(cfg, CaseId::Synthetic, cases.at(CaseId::Synthetic), 0.3, 0.2, 1, {{1.0, 1.0, 1.0}});
  REQUIRE(study.trials.size() == 1);
  CHECK(study.trials[0].final == *pi->coefficients);
  CHECK(study.stddev == PhysicsCoefficients{0, 0, 0});
}

TEST_CASE("timing report is cumulative and monotone") {
  HarnessConfig cfg = tiny_config();
  const auto cases = load_cases(cfg);
  const std::vector<ModelKind> kinds{ModelKind::MultivariateDae2, ModelKind::PiDae};
  const auto rows = timing_report(cfg, CaseId::Synthetic, cases.at(CaseId::Synthetic), kinds, 0.3, 0.2, 2);
  REQUIRE_FALSE(rows.empty());
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].model != rows[i - 1].model) continue;
    CHECK(rows[i].days == rows[i - 1].days + 1);
    CHECK(rows[i].inference_time_s >= rows[i - 1].inference_time_s);
  }
}

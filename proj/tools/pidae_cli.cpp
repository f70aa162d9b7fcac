// pidae: command-line front end for the imputation library.
//
// Exit codes: 0 success, 1 usage or invalid argument, 2 data error,
// 3 one or more experiment cells failed.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "pidae/baselines.hpp"
#include "pidae/config.hpp"
#include "pidae/correlation.hpp"
#include "pidae/data_pipeline.hpp"
#include "pidae/errors.hpp"
#include "pidae/harness.hpp"
#include "pidae/reports.hpp"
#include "pidae/synthetic.hpp"
#include "pidae/tuning.hpp"

using namespace pidae;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitCells = 3;

struct Globals {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int workers = 0;
  bool paper_scale = false;
  std::string dataset;
  int max_epochs = 0;
};

HarnessConfig make_config(const Globals& g) {
  HarnessConfig cfg;
  if (g.paper_scale) apply_paper_scale(cfg);
  if (!g.config.empty()) cfg = load_config(g.config, cfg);
  if (g.seed_set) cfg.seed = g.seed;
  if (g.workers > 0) cfg.workers = g.workers;
  if (!g.dataset.empty()) cfg.dataset_path = g.dataset;
  if (g.max_epochs > 0) cfg.limits.max_epochs = g.max_epochs;
  return cfg;
}

Dataset load_case(HarnessConfig cfg, CaseId id) {
  cfg.cases = {id};
  auto cases = load_cases(cfg);
  if (!cases.count(id)) throw DataError(to_string(id) + " needs --dataset or [data] dataset/raw");
  return cases.at(id);
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw DataError("cannot write " + path);
  return f;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Physics-informed denoising autoencoders for building energy data"};
  app.require_subcommand(1);

  Globals g;
  app.add_option("--config", g.config, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option_function<std::uint64_t>(
      "--seed", [&](std::uint64_t s) { g.seed = s, g.seed_set = true; }, "Base seed");
  app.add_option("--workers", g.workers, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--paper-scale", g.paper_scale, "Full experimental protocol (slow)");
  app.add_option("--dataset", g.dataset, "Prepared daily dataset (CSV)");
  app.add_option("--max-epochs", g.max_epochs, "Override the epoch limit")->check(CLI::PositiveNumber);

  // prepare
  auto* prepare = app.add_subcommand("prepare", "Raw 1-minute records to daily profiles");
  std::string raw, units = "si", out, dropped;
  prepare->add_option("raw", raw, "Raw CSV")->required()->check(CLI::ExistingFile);
  prepare->add_option("--units", units)->check(CLI::IsMember({"si", "imperial"}));
  prepare->add_option("-o,--out", out)->required();
  prepare->add_option("--dropped", dropped, "Write dropped dates here");

  // filter / correlate
  auto* filter = app.add_subcommand("filter", "Keep days whose IQRs exceed the thresholds");
  double thr_cool = 50.0, thr_heat = 20.0;
  filter->add_option("--iqr-cool", thr_cool, "kW")->check(CLI::NonNegativeNumber);
  filter->add_option("--iqr-heat", thr_heat, "kW")->check(CLI::NonNegativeNumber);
  filter->add_option("-o,--out", out)->required();
  std::string table_out;
  filter->add_option("--table", table_out, "Also write the pooled PCC table over the threshold grid");

  auto* correlate = app.add_subcommand("correlate", "Pooled PCC table over an IQR threshold grid");
  correlate->add_option("-o,--out", out)->required();

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic dataset with known coefficients");
  SyntheticOptions sopt;
  synth->add_option("--days", sopt.days)->check(CLI::PositiveNumber);
  synth->add_option("--noise", sopt.noise)->check(CLI::NonNegativeNumber);
  synth->add_option("--a", sopt.truth.a);
  synth->add_option("--b", sopt.truth.b);
  synth->add_option("--c", sopt.truth.c);
  synth->add_option("-o,--out", out)->required();

  // tune
  auto* tune = app.add_subcommand("tune", "Random search; writes [model.<kind>@<cr>] sections");
  std::string case_name = "synthetic", model_name = "Multivariate_DAE_2", log_path;
  double tr = 0.5, cr = 0.2;
  int budget = 0;
  tune->add_option("--case", case_name);
  tune->add_option("--model", model_name);
  tune->add_option("--tr", tr);
  tune->add_option("--cr", cr);
  tune->add_option("--budget", budget)->check(CLI::PositiveNumber);
  tune->add_option("--log", log_path, "Trial log CSV");
  tune->add_option("-o,--out", out)->required();

  // train
  auto* trainc = app.add_subcommand("train", "Train one model and write a checkpoint");
  int split_seed = 0;
  std::string history, eval_out;
  trainc->add_option("--case", case_name);
  trainc->add_option("--model", model_name);
  trainc->add_option("--tr", tr);
  trainc->add_option("--cr", cr);
  trainc->add_option("--split-seed", split_seed)->check(CLI::NonNegativeNumber);
  trainc->add_option("--history", history, "Loss history CSV");
  trainc->add_option("--eval-out", eval_out, "Write the evaluation split here");
  trainc->add_option("-o,--out", out)->required();

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Impute masked runs of a dataset and report RMSE");
  std::string checkpoint, method = "model";
  std::uint64_t mask_seed = 0;
  evaluate->add_option("--checkpoint", checkpoint)->check(CLI::ExistingFile);
  evaluate->add_option("--method", method)->check(CLI::IsMember({"model", "LIN"}));
  evaluate->add_option("--cr", cr);
  evaluate->add_option("--mask-seed", mask_seed);
  evaluate->add_option("-o,--out", out, "Imputed dataset CSV");

  // ablation
  auto* ablation = app.add_subcommand("ablation", "Full experiment grid");
  ablation->add_option("-o,--out", out)->required();

  // coeff-study
  auto* coeff = app.add_subcommand("coeff-study", "PI-DAE coefficients from random starts");
  int trials = 10;
  coeff->add_option("--case", case_name);
  coeff->add_option("--tr", tr);
  coeff->add_option("--cr", cr);
  coeff->add_option("--trials", trials)->check(CLI::PositiveNumber);
  coeff->add_option("-o,--out", out)->required();

  // timing
  auto* timing = app.add_subcommand("timing", "Training and inference times");
  int repeats = 5;
  timing->add_option("--case", case_name);
  timing->add_option("--tr", tr);
  timing->add_option("--cr", cr);
  timing->add_option("--repeats", repeats)->check(CLI::PositiveNumber);
  timing->add_option("-o,--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const HarnessConfig cfg = make_config(g);

    if (*prepare) {
      const auto units_enum = units == "imperial" ? SourceUnits::Imperial : SourceUnits::Si;
      const SliceReport rep = prepare_dataset(read_raw_records_file(raw, units_enum));
      write_dataset_file(out, rep.dataset);
      if (!dropped.empty()) {
        auto f = open_out(dropped);
        for (const auto& d : rep.dropped_days) f << d << "\n";
      }
      std::cerr << rep.dataset.size() << " days kept, " << rep.dropped_days.size() << " dropped\n";
    } else if (*filter) {
      const Dataset all = load_case(cfg, CaseId::Case1);
      const Dataset kept = filter_days(all, thr_cool, thr_heat);
      write_dataset_file(out, kept);
      if (!table_out.empty()) {
        const auto grid = default_threshold_grid();
        auto f = open_out(table_out);
        write_correlation_table(f, correlation_table(all, grid, grid));
      }
      std::cerr << kept.size() << " days kept\n";
    } else if (*correlate) {
      const auto grid = default_threshold_grid();
      auto f = open_out(out);
      write_correlation_table(f, correlation_table(load_case(cfg, CaseId::Case1), grid, grid));
    } else if (*synth) {
      if (g.seed_set) sopt.seed = g.seed;
      write_dataset_file(out, generate_synthetic(sopt));
    } else if (*tune) {
      const CaseId c = parse_case(case_name);
      const ModelKind kind = parse_model_kind(model_name);
      const Dataset data = load_case(cfg, c);
      const DataSplit ds = case_split(cfg, c, data, tr, 0);
      HarnessConfig tcfg = cfg;
      tcfg.limits.max_epochs = cfg.tuning_max_epochs;
      auto objective = [&](const ModelSpec& s, int trial) {
        return train_one(tcfg, c, ds, s, tr, cr, 0, trial).best_val_loss;
      };
      const SearchResult res = random_search(kind, cfg.search_space, budget > 0 ? budget : cfg.tuning_budget,
                                             objective, derive_seed(cfg.seed, {0x7f}), cfg.workers);
      if (!log_path.empty()) {
        auto f = open_out(log_path);
        write_trial_log(f, res);
      }
      HarnessConfig outcfg;
      outcfg.specs.clear();
      outcfg.tuned_specs[{kind, cr}] = res.best;
      auto f = open_out(out);
      write_model_sections(f, outcfg);
    } else if (*trainc) {
      const CaseId c = parse_case(case_name);
      const ModelKind kind = parse_model_kind(model_name);
      const Dataset data = load_case(cfg, c);
      const DataSplit ds = case_split(cfg, c, data, tr, split_seed);
      const RestartOutcome best =
          train_with_restarts(cfg, c, ds, cfg.spec_for(kind, cr), tr, cr, split_seed, cfg.restarts);
      save_checkpoint_file(out, best.trained);
      if (!history.empty()) {
        auto f = open_out(history);
        write_history(f, best.trained.history);
      }
      if (!eval_out.empty()) write_dataset_file(eval_out, ds.eval);
      std::cerr << "best epoch " << best.trained.best_epoch << ", val loss " << best.trained.best_val_loss
                << ", restart " << best.restart << "\n";
    } else if (*evaluate) {
      if (cfg.dataset_path.empty()) throw ArgumentError("evaluate needs --dataset");
      const Dataset data = read_dataset_file(cfg.dataset_path);
      std::optional<TrainedModel> model;
      if (method == "model") {
        if (checkpoint.empty()) throw ArgumentError("--method model needs --checkpoint");
        model = load_checkpoint_file(checkpoint);
      }
      const std::vector<Variable> vars =
          model ? target_variables(model->model.spec().kind)
                : std::vector<Variable>{Variable::TRaAvg, Variable::QCoolTot, Variable::QHw};
      const auto masks = evaluation_masks(data.size(), cr, 0, mask_seed);
      Dataset imputed;
      imputed.stats = data.stats;
      for (std::size_t i = 0; i < data.size(); ++i) {
        imputed.days.push_back(model ? impute(model->model, data.days[i], masks[i])
                                     : linear_interpolate(data.days[i], masks[i], vars));
      }
      for (const auto& [v, e] : rmse(imputed.days, data.days, masks, vars)) {
        std::cout << to_string(v) << "," << e << "\n";
      }
      if (!out.empty()) write_dataset_file(out, imputed);
    } else if (*ablation) {
      std::vector<std::string> notes;
      const auto cases = load_cases(cfg, &notes);
      AblationRun run = run_ablation(cfg, cases, [](const ExperimentResult& r) {
        std::cerr << to_string(r.cell.case_id) << " " << r.cell.model << " tr=" << format_rate(r.cell.tr)
                  << " cr=" << format_rate(r.cell.cr) << " seed=" << r.cell.split_seed
                  << (r.failed ? " FAILED: " + r.error : "") << "\n";
      });
      run.notes.insert(run.notes.begin(), notes.begin(), notes.end());
      write_ablation_reports(out, run);
      if (run.failures > 0) {
        std::cerr << run.failures << " cell(s) failed\n";
        return kExitCells;
      }
    } else if (*coeff) {
      const CaseId c = parse_case(case_name);
      const CoefficientStudy study = coefficient_study(cfg, c, load_case(cfg, c), tr, cr, trials);
      auto f = open_out(out);
      write_coefficient_study(f, study);
    } else if (*timing) {
      const CaseId c = parse_case(case_name);
      const std::vector<ModelKind> kinds(cfg.models.begin(), cfg.models.end());
      const auto rows = timing_report(cfg, c, load_case(cfg, c), kinds, tr, cr, repeats);
      auto f = open_out(out);
      write_timing_report(f, rows);
    }
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const TrainingError& e) {
    std::cerr << "training failed: " << e.what() << "\n";
    return kExitCells;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}

#include "pidae/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cmath>
#include <cctype>
#include <iomanip>
#include <fstream>
#include <sstream>

namespace pidae {

namespace pt = boost::property_tree;

namespace {

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void read_spec_keys(const pt::ptree& sec, ModelSpec& s) {
  s.filters_external = sec.get("filters_external", s.filters_external);
  s.filters_internal = sec.get("filters_internal", s.filters_internal);
  s.kernel = sec.get("kernel", s.kernel);
  s.learning_rate = sec.get("learning_rate", s.learning_rate);
  s.batch_size = sec.get("batch_size", s.batch_size);
  s.physics_weight = sec.get("physics_weight", s.physics_weight);
}

void check_rates(const std::vector<double>& rates, const char* what, double lo_excl, double hi_incl) {
  if (rates.empty()) throw ArgumentError(std::string(what) + " list is empty");
  for (double r : rates) {
    if (!(r > lo_excl && r <= hi_incl)) {
      throw ArgumentError(std::string(what) + " value " + std::to_string(r) + " out of range");
    }
  }
}

}  // namespace

std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::Case1:
      return "Case1";
    case CaseId::Case2:
      return "Case2";
    case CaseId::Synthetic:
      return "Synthetic";
  }
  return "?";
}

CaseId parse_case(const std::string& name) {
  auto lower = [](std::string s) {
    for (char& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    return s;
  };
  for (CaseId c : {CaseId::Case1, CaseId::Case2, CaseId::Synthetic}) {
    if (lower(to_string(c)) == lower(name)) return c;
  }
  throw ArgumentError("unknown case '" + name + "'");
}

HarnessConfig::HarnessConfig() {
  for (ModelKind k : kAllModelKinds) specs[k] = ModelSpec::for_kind(k);
  limits.max_epochs = 1000;
  limits.patience = 20;
  limits.min_delta = 0.0;
}

ModelSpec HarnessConfig::spec_for(ModelKind kind, double cr) const {
  auto tuned = [&](ModelKind k) -> std::optional<ModelSpec> {
    for (const auto& [key, spec] : tuned_specs) {
      if (key.first == k && std::abs(key.second - cr) < 1e-9) return spec;
    }
    return std::nullopt;
  };
  if (auto s = tuned(kind)) return s->with_kind(kind);
  if (kind == ModelKind::PiDae) {
    // PI-DAE shares Multivariate_DAE_2's hyperparameters; only the physics
    // weight is its own.
    const double w = specs.at(ModelKind::PiDae).physics_weight;
    ModelSpec s = tuned(ModelKind::MultivariateDae2).value_or(specs.at(ModelKind::MultivariateDae2));
    s = s.with_kind(ModelKind::PiDae);
    s.physics_weight = w;
    return s;
  }
  return specs.at(kind).with_kind(kind);
}

void apply_paper_scale(HarnessConfig& cfg) {
  cfg.split_seeds = 10;
  cfg.restarts = 10;
  cfg.training_rates = {0.1, 0.2, 0.3, 0.4, 0.5};
  cfg.corruption_rates = {0.2, 0.4, 0.6, 0.8};
  cfg.cases = {CaseId::Case1, CaseId::Case2};
  cfg.limits.max_epochs = 1000;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  for (const auto& item : split_list(text)) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw ArgumentError("not a number: '" + item + "'");
    }
  }
  return out;
}

std::string format_rate(double r) {
  std::ostringstream ss;
  ss << r;
  return ss.str();
}

HarnessConfig parse_config(std::istream& in, HarnessConfig cfg) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw DataError(std::string("config: ") + e.what());
  }

  try {
    for (const auto& [name, sec] : tree) {
      if (name == "data") {
        cfg.dataset_path = sec.get("dataset", cfg.dataset_path);
        cfg.raw_path = sec.get("raw", cfg.raw_path);
        cfg.raw_units = sec.get("raw_units", cfg.raw_units);
        cfg.synthetic_days = sec.get("synthetic_days", cfg.synthetic_days);
        cfg.synthetic_truth.a = sec.get("synthetic_a", cfg.synthetic_truth.a);
        cfg.synthetic_truth.b = sec.get("synthetic_b", cfg.synthetic_truth.b);
        cfg.synthetic_truth.c = sec.get("synthetic_c", cfg.synthetic_truth.c);
        cfg.synthetic_noise = sec.get("synthetic_noise", cfg.synthetic_noise);
        cfg.case2_iqr_cool = sec.get("case2_iqr_cool", cfg.case2_iqr_cool);
        cfg.case2_iqr_heat = sec.get("case2_iqr_heat", cfg.case2_iqr_heat);
      } else if (name == "corruption") {
        if (auto r = sec.get_optional<std::string>("rates")) cfg.corruption_rates = parse_number_list(*r);
        cfg.augment_copies = sec.get("copies", cfg.augment_copies);
      } else if (name.rfind("model.", 0) == 0) {
        const std::string rest = name.substr(6);
        const auto at = rest.find('@');
        const ModelKind kind = parse_model_kind(rest.substr(0, at));
        if (at == std::string::npos) {
          read_spec_keys(sec, cfg.specs[kind]);
        } else {
          const double cr = std::stod(rest.substr(at + 1));
          ModelSpec s = cfg.spec_for(kind, cr);
          read_spec_keys(sec, s);
          cfg.tuned_specs[{kind, cr}] = s;
        }
      } else if (name == "tuning") {
        cfg.tune = sec.get("enabled", cfg.tune);
        cfg.tuning_budget = sec.get("budget", cfg.tuning_budget);
        cfg.tuning_max_epochs = sec.get("max_epochs", cfg.tuning_max_epochs);
        auto& sp = cfg.search_space;
        sp.min_filters = sec.get("min_filters", sp.min_filters);
        sp.max_filters = sec.get("max_filters", sp.max_filters);
        sp.min_kernel = sec.get("min_kernel", sp.min_kernel);
        sp.max_kernel = sec.get("max_kernel", sp.max_kernel);
        sp.min_learning_rate = sec.get("min_learning_rate", sp.min_learning_rate);
        sp.max_learning_rate = sec.get("max_learning_rate", sp.max_learning_rate);
        sp.min_batch = sec.get("min_batch", sp.min_batch);
        sp.max_batch = sec.get("max_batch", sp.max_batch);
      } else if (name == "harness") {
        if (auto c = sec.get_optional<std::string>("cases")) {
          cfg.cases.clear();
          for (const auto& item : split_list(*c)) cfg.cases.push_back(parse_case(item));
        }
        if (auto m = sec.get_optional<std::string>("models")) {
          cfg.models.clear();
          for (const auto& item : split_list(*m)) cfg.models.push_back(parse_model_kind(item));
        }
        cfg.split_seeds = sec.get("split_seeds", cfg.split_seeds);
        cfg.restarts = sec.get("restarts", cfg.restarts);
        if (auto t = sec.get_optional<std::string>("training_rates")) {
          cfg.training_rates = parse_number_list(*t);
        }
        cfg.validation_rate = sec.get("validation_rate", cfg.validation_rate);
        cfg.limits.max_epochs = sec.get("max_epochs", cfg.limits.max_epochs);
        cfg.limits.patience = sec.get("patience", cfg.limits.patience);
        cfg.limits.min_delta = sec.get("min_delta", cfg.limits.min_delta);
        cfg.knn_k = sec.get("knn_k", cfg.knn_k);
        cfg.workers = sec.get("workers", cfg.workers);
        cfg.seed = sec.get("seed", cfg.seed);
      } else {
        throw ArgumentError("config: unknown section [" + name + "]");
      }
    }
  } catch (const pt::ptree_bad_data& e) {
    throw ArgumentError(std::string("config: bad value: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }

  check_rates(cfg.corruption_rates, "corruption rate", 0.0, 1.0);
  check_rates(cfg.training_rates, "training rate", 0.0, 0.5);
  if (cfg.split_seeds < 1 || cfg.restarts < 1) throw ArgumentError("split_seeds and restarts must be >= 1");
  if (cfg.augment_copies < 0) throw ArgumentError("copies must be >= 0");
  if (cfg.knn_k < 1) throw ArgumentError("knn_k must be >= 1");
  if (cfg.limits.max_epochs < 1 || cfg.limits.patience < 1) throw ArgumentError("max_epochs and patience must be >= 1");
  for (const auto& [k, s] : cfg.specs) s.with_kind(k).validate();
  for (const auto& [k, s] : cfg.tuned_specs) s.validate();
  cfg.search_space.validate();
  return cfg;
}

HarnessConfig load_config(const std::string& path, HarnessConfig base) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

void write_model_sections(std::ostream& out, const HarnessConfig& cfg) {
  auto write = [&](const std::string& section, const ModelSpec& s) {
    out << '[' << section << "]\n"
        << "filters_external = " << s.filters_external << '\n'
        << "filters_internal = " << s.filters_internal << '\n'
        << "kernel = " << s.kernel << '\n'
        << "learning_rate = " << std::setprecision(10) << s.learning_rate << '\n'
        << "batch_size = " << s.batch_size << '\n'
        << "physics_weight = " << s.physics_weight << "\n\n";
  };
  for (const auto& [k, s] : cfg.specs) write("model." + to_string(k), s);
  for (const auto& [key, s] : cfg.tuned_specs) {
    write("model." + to_string(key.first) + "@" + format_rate(key.second), s);
  }
}

}  // namespace pidae

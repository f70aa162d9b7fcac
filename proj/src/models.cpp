#include "pidae/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <ostream>

#include "pidae/data_pipeline.hpp"
#include "pidae/nn/optim.hpp"

namespace pidae {

namespace {

constexpr int kCheckpointVersion = 1;

bool in_range(std::size_t v, std::size_t lo, std::size_t hi) { return v >= lo && v <= hi; }

}  // namespace

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::UnivariateDae1:
      return "Univariate_DAE_1";
    case ModelKind::UnivariateDae2:
      return "Univariate_DAE_2";
    case ModelKind::UnivariateDae3:
      return "Univariate_DAE_3";
    case ModelKind::MultivariateDae1:
      return "Multivariate_DAE_1";
    case ModelKind::MultivariateDae2:
      return "Multivariate_DAE_2";
    case ModelKind::PiDae:
      return "PI_DAE";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& name) {
  for (ModelKind k : kAllModelKinds) {
    if (to_string(k) == name) return k;
  }
  if (name == "PI-DAE") return ModelKind::PiDae;
  throw ArgumentError("unknown model kind '" + name + "'");
}

std::vector<Variable> input_variables(ModelKind kind) {
  switch (kind) {
    case ModelKind::UnivariateDae1:
      return {Variable::TRaAvg};
    case ModelKind::UnivariateDae2:
      return {Variable::QHw};
    case ModelKind::UnivariateDae3:
      return {Variable::QCoolTot};
    case ModelKind::MultivariateDae1:
      return {Variable::TRaAvg, Variable::QCoolTot, Variable::QHw};
    case ModelKind::MultivariateDae2:
    case ModelKind::PiDae:
      return {Variable::TRaAvg, Variable::QCoolTot, Variable::QHw, Variable::TOaAvg};
  }
  return {};
}

std::vector<Variable> target_variables(ModelKind kind) {
  auto vars = input_variables(kind);
  std::erase(vars, Variable::TOaAvg);
  return vars;
}

std::size_t expected_channels(ModelKind kind) { return input_variables(kind).size(); }

ModelSpec ModelSpec::for_kind(ModelKind kind) {
  ModelSpec s;
  return s.with_kind(kind);
}

ModelSpec ModelSpec::with_kind(ModelKind kind) const {
  ModelSpec s = *this;
  s.kind = kind;
  s.channels = expected_channels(kind);
  s.physics = kind == ModelKind::PiDae;
  return s;
}

void ModelSpec::validate() const {
  using B = HyperparameterBounds;
  const std::string name = to_string(kind);
  if (channels != expected_channels(kind)) {
    throw SpecError(name + " takes " + std::to_string(expected_channels(kind)) +
                    " channels, spec has " + std::to_string(channels));
  }
  if (physics != (kind == ModelKind::PiDae)) {
    throw SpecError(name + ": physics loss is only available for PI_DAE");
  }
  if (!in_range(filters_external, B::kMinFilters, B::kMaxFilters) ||
      !in_range(filters_internal, B::kMinFilters, B::kMaxFilters)) {
    throw SpecError(name + ": filter counts must lie in [5, 200]");
  }
  if (!in_range(kernel, B::kMinKernel, B::kMaxKernel)) {
    throw SpecError(name + ": kernel size must lie in [1, 10]");
  }
  if (!(learning_rate >= B::kMinLearningRate && learning_rate <= B::kMaxLearningRate)) {
    throw SpecError(name + ": learning rate must lie in [1e-4, 1e-1]");
  }
  if (!in_range(batch_size, B::kMinBatch, B::kMaxBatch)) {
    throw SpecError(name + ": batch size must lie in [32, 256]");
  }
  if (!std::isfinite(physics_weight) || physics_weight < 0.0) {
    throw SpecError(name + ": physics weight must be finite and >= 0");
  }
}

DaeModel DaeModel::build(const ModelSpec& spec, std::uint64_t init_seed,
                         PhysicsCoefficients coefficient_init) {
  spec.validate();
  DaeModel m;
  m.spec_ = spec;
  m.network_ = nn::Network::autoencoder(spec.channels, spec.filters_external,
                                        spec.filters_internal, spec.kernel, kStepsPerDay);
  Rng rng(init_seed);
  m.network_.initialize(rng);
  m.coefficients_ = coefficient_init;
  return m;
}

std::size_t DaeModel::trainable_parameter_count() const {
  return network_.parameter_count() + (spec_.physics ? 3 : 0);
}

nn::Tensor DaeModel::reconstruct(const nn::Tensor& normalized_input) const {
  return network_.predict(normalized_input);
}

nn::Tensor to_tensor(const DailyProfile& day, std::span<const Variable> channels) {
  nn::Tensor t(channels.size(), kStepsPerDay);
  for (std::size_t c = 0; c < channels.size(); ++c) {
    const Series& s = day.at(channels[c]);
    std::copy(s.begin(), s.end(), t.channel(c).begin());
  }
  return t;
}

LossBreakdown total_loss(const ModelSpec& spec, const nn::Tensor& output, const nn::Tensor& target,
                         const PhysicsCoefficients& coefficients, const NormalizationStats& stats) {
  if (output.channels() != target.channels() || output.length() != target.length()) {
    throw SpecError("total_loss: output and target shapes differ");
  }
  const auto inputs = input_variables(spec.kind);
  const std::size_t n_targets = target_variables(spec.kind).size();
  const std::size_t len = output.length();

  LossBreakdown r;
  r.grad_output = nn::Tensor(output.channels(), len);
  // Target channels come first in the channel order.
  const std::size_t n = n_targets * len;
  r.reconstruction = nn::mse(output.flat().subspan(0, n), target.flat().subspan(0, n),
                             r.grad_output.flat().subspan(0, n));
  r.total = r.reconstruction;

  if (spec.physics && spec.physics_weight != 0.0) {
    auto channel_of = [&](Variable v) {
      return static_cast<std::size_t>(std::find(inputs.begin(), inputs.end(), v) - inputs.begin());
    };
    const std::size_t c_ra = channel_of(Variable::TRaAvg);
    const std::size_t c_cool = channel_of(Variable::QCoolTot);
    const std::size_t c_hw = channel_of(Variable::QHw);
    const std::size_t c_oa = channel_of(Variable::TOaAvg);
    const MinMax& m_ra = stats.at(Variable::TRaAvg);
    const MinMax& m_cool = stats.at(Variable::QCoolTot);
    const MinMax& m_hw = stats.at(Variable::QHw);
    const MinMax& m_oa = stats.at(Variable::TOaAvg);

    std::vector<double> t_ra(len), t_oa(len), q_cool(len), q_hw(len);
    for (std::size_t t = 0; t < len; ++t) {
      t_ra[t] = denormalize_value(output(c_ra, t), m_ra);
      q_cool[t] = denormalize_value(output(c_cool, t), m_cool);
      q_hw[t] = denormalize_value(output(c_hw, t), m_hw);
      t_oa[t] = denormalize_value(target(c_oa, t), m_oa);
    }
    const auto g = physics_loss_gradient({t_ra, t_oa, q_cool, q_hw}, coefficients);
    const double w = spec.physics_weight;
    r.physics = g.loss;
    r.total += w * g.loss;
    for (std::size_t t = 0; t < len; ++t) {
      r.grad_output(c_ra, t) += w * g.d_t_ra[t] * m_ra.range();
      r.grad_output(c_cool, t) += w * g.d_q_cool[t] * m_cool.range();
      r.grad_output(c_hw, t) += w * g.d_q_hw[t] * m_hw.range();
    }
    for (std::size_t i = 0; i < 3; ++i) r.grad_coeffs[i] = w * g.d_coeffs[i];
  }
  return r;
}

TrainedModel train(DaeModel model, std::vector<TrainingPair> train_set,
                   std::span<const DailyProfile> val_days, std::uint64_t seed,
                   const TrainingLimits& limits) {
  if (train_set.empty()) throw ArgumentError("train: empty training set");
  if (val_days.empty()) throw ArgumentError("train: empty validation set");
  if (limits.corruption_rates.empty()) throw ArgumentError("train: no corruption rates configured");
  if (model.stats().empty()) throw ArgumentError("train: model carries no normalization statistics");

  const ModelSpec& spec = model.spec();
  const auto channels = input_variables(spec.kind);
  const auto targets = target_variables(spec.kind);
  nn::Network& net = model.network();

  Rng rng(derive_seed(seed, {1}));
  std::uniform_int_distribution<std::size_t> pick_cr(0, limits.corruption_rates.size() - 1);

  // Fixed validation corruption.
  std::vector<nn::Tensor> val_inputs, val_targets;
  {
    Rng val_rng(derive_seed(seed, {2}));
    for (const auto& day : val_days) {
      const CorruptionMask m = make_mask(limits.corruption_rates[pick_cr(val_rng)], val_rng);
      val_inputs.push_back(to_tensor(corrupt(day, m, targets), channels));
      val_targets.push_back(to_tensor(day, channels));
    }
  }
  std::vector<nn::Tensor> targets_t;
  targets_t.reserve(train_set.size());
  for (const auto& p : train_set) targets_t.push_back(to_tensor(p.target, channels));

  auto validation_loss = [&]() {
    double sum = 0.0;
    for (std::size_t i = 0; i < val_inputs.size(); ++i) {
      const nn::Tensor out = net.predict(val_inputs[i]);
      const std::size_t n = targets.size() * kStepsPerDay;
      sum += nn::mse(out.flat().subspan(0, n), val_targets[i].flat().subspan(0, n));
    }
    return sum / static_cast<double>(val_inputs.size());
  };

  nn::AdamState net_state, coeff_state;
  std::array<double, 3> coeffs = model.coefficients().as_array();
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch = std::max<std::size_t>(1, spec.batch_size);

  TrainedModel result{model, {}, -1, std::numeric_limits<double>::infinity()};
  int since_best = 0;

  for (int epoch = 0; epoch < limits.max_epochs; ++epoch) {
    if (epoch > 0) {
      for (auto& p : train_set) {
        if (!p.synthetic) continue;
        p.mask = make_mask(limits.corruption_rates[pick_cr(rng)], rng);
        p.input = corrupt(p.target, p.mask, targets);
      }
    }
    std::shuffle(order.begin(), order.end(), rng);

    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t end = std::min(order.size(), start + batch);
      const double inv_b = 1.0 / static_cast<double>(end - start);
      net.zero_gradients();
      std::array<double, 3> coeff_grad{};
      for (std::size_t s = start; s < end; ++s) {
        const std::size_t idx = order[s];
        const nn::Tensor& out = net.forward(to_tensor(train_set[idx].input, channels));
        LossBreakdown loss = total_loss(spec, out, targets_t[idx],
                                        PhysicsCoefficients::from_array(coeffs), model.stats());
        if (!std::isfinite(loss.total)) {
          throw TrainingError("non-finite training loss at epoch " + std::to_string(epoch),
                              result.history);
        }
        epoch_loss += loss.total;
        for (double& g : loss.grad_output.flat()) g *= inv_b;
        net.backward(loss.grad_output);
        for (std::size_t i = 0; i < 3; ++i) coeff_grad[i] += loss.grad_coeffs[i] * inv_b;
      }
      try {
        nn::adam_step(net.parameters(), net.gradients(), spec.learning_rate, net_state);
        if (spec.physics && spec.physics_weight != 0.0) {
          nn::adam_step(coeffs, coeff_grad, spec.learning_rate, coeff_state);
        }
      } catch (const std::domain_error& e) {
        throw TrainingError("training aborted at epoch " + std::to_string(epoch) + ": " + e.what(),
                            result.history);
      }
    }
    model.set_coefficients(PhysicsCoefficients::from_array(coeffs));

    const double val = validation_loss();
    result.history.push_back({epoch, epoch_loss / static_cast<double>(order.size()), val});
    if (!std::isfinite(val)) {
      throw TrainingError("non-finite validation loss at epoch " + std::to_string(epoch),
                          result.history);
    }
    if (val < result.best_val_loss - limits.min_delta) {
      result.best_val_loss = val;
      result.best_epoch = epoch;
      result.model = model;
      since_best = 0;
    } else if (++since_best >= limits.patience) {
      break;
    }
  }
  return result;
}

DailyProfile impute(const DaeModel& model, const DailyProfile& physical_profile,
                    const CorruptionMask& mask) {
  const auto channels = input_variables(model.spec().kind);
  const auto targets = target_variables(model.spec().kind);
  for (Variable v : channels) {
    if (!physical_profile.has(v)) {
      throw DataError(to_string(model.spec().kind) + " needs variable " +
                      std::string(to_string(v)) + " which the profile lacks");
    }
  }
  if (mask.empty()) return physical_profile;

  DailyProfile subset;
  subset.date = physical_profile.date;
  for (Variable v : channels) subset.values[v] = physical_profile.at(v);
  const DailyProfile normalized = corrupt(normalize(subset, model.stats()), mask, targets);
  const nn::Tensor out = model.reconstruct(to_tensor(normalized, channels));

  DailyProfile result = physical_profile;
  for (std::size_t c = 0; c < targets.size(); ++c) {
    const MinMax& mm = model.stats().at(targets[c]);
    Series& s = result.at(targets[c]);
    for (std::size_t t = 0; t < kStepsPerDay; ++t) {
      if (mask[t]) s[t] = denormalize_value(std::clamp(out(c, t), 0.0, 1.0), mm);
    }
  }
  return result;
}

void save_checkpoint(std::ostream& out, const TrainedModel& trained) {
  using nlohmann::json;
  const DaeModel& m = trained.model;
  const ModelSpec& s = m.spec();
  json j;
  j["format"] = "pidae-checkpoint";
  j["version"] = kCheckpointVersion;
  j["spec"] = {{"kind", to_string(s.kind)},
               {"channels", s.channels},
               {"filters_external", s.filters_external},
               {"filters_internal", s.filters_internal},
               {"kernel", s.kernel},
               {"learning_rate", s.learning_rate},
               {"batch_size", s.batch_size},
               {"physics", s.physics},
               {"physics_weight", s.physics_weight}};
  j["parameters"] = std::vector<double>(m.network().parameters().begin(), m.network().parameters().end());
  j["coefficients"] = {{"a", m.coefficients().a}, {"b", m.coefficients().b}, {"c", m.coefficients().c}};
  json stats = json::object();
  for (const auto& [v, mm] : m.stats()) stats[std::string(to_string(v))] = {{"min", mm.min}, {"max", mm.max}};
  j["normalization"] = stats;
  j["best_epoch"] = trained.best_epoch;
  j["best_val_loss"] = trained.best_val_loss;
  json hist = json::array();
  for (const auto& h : trained.history) hist.push_back({h.epoch, h.train_loss, h.val_loss});
  j["history"] = hist;
  out << j.dump(1) << '\n';
}

void save_checkpoint_file(const std::string& path, const TrainedModel& trained) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write checkpoint '" + path + "'");
  save_checkpoint(out, trained);
}

TrainedModel load_checkpoint(std::istream& in) {
  using nlohmann::json;
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
  if (j.value("format", "") != "pidae-checkpoint") throw DataError("not a checkpoint file");
  if (j.value("version", 0) != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(j.value("version", 0)));
  }
  try {
    const json& js = j.at("spec");
    ModelSpec s;
    s.kind = parse_model_kind(js.at("kind").get<std::string>());
    s.channels = js.at("channels").get<std::size_t>();
    s.filters_external = js.at("filters_external").get<std::size_t>();
    s.filters_internal = js.at("filters_internal").get<std::size_t>();
    s.kernel = js.at("kernel").get<std::size_t>();
    s.learning_rate = js.at("learning_rate").get<double>();
    s.batch_size = js.at("batch_size").get<std::size_t>();
    s.physics = js.at("physics").get<bool>();
    s.physics_weight = js.at("physics_weight").get<double>();

    DaeModel m = DaeModel::build(s, 0);
    const auto params = j.at("parameters").get<std::vector<double>>();
    if (params.size() != m.network().parameter_count()) {
      throw DataError("checkpoint parameter count does not match its spec");
    }
    std::copy(params.begin(), params.end(), m.network().parameters().begin());
    const json& jc = j.at("coefficients");
    m.set_coefficients({jc.at("a").get<double>(), jc.at("b").get<double>(), jc.at("c").get<double>()});
    NormalizationStats stats;
    for (const auto& [name, mm] : j.at("normalization").items()) {
      auto v = parse_variable(name);
      if (!v) throw DataError("checkpoint names unknown variable '" + name + "'");
      stats[*v] = {mm.at("min").get<double>(), mm.at("max").get<double>()};
    }
    m.set_stats(stats);

    TrainedModel t{m, {}, j.at("best_epoch").get<int>(), j.at("best_val_loss").get<double>()};
    for (const auto& h : j.at("history")) {
      t.history.push_back({h.at(0).get<int>(), h.at(1).get<double>(), h.at(2).get<double>()});
    }
    return t;
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
}

TrainedModel load_checkpoint_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  return load_checkpoint(in);
}

void write_history(std::ostream& out, const std::vector<EpochRecord>& history) {
  out << "epoch,train_loss,val_loss\n" << std::setprecision(10);
  for (const auto& h : history) out << h.epoch << ',' << h.train_loss << ',' << h.val_loss << '\n';
}

}  // namespace pidae

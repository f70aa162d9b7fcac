#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pidae/corruption.hpp"
#include "pidae/errors.hpp"
#include "pidae/nn/network.hpp"
#include "pidae/physics.hpp"
#include "pidae/types.hpp"

namespace pidae {

enum class ModelKind {
  UnivariateDae1,    // indoor air temperature
  UnivariateDae2,    // heating (Q_hw)
  UnivariateDae3,    // cooling (Q_cool_tot)
  MultivariateDae1,  // T_ra, Q_cool, Q_hw
  MultivariateDae2,  // T_ra, Q_cool, Q_hw + uncorrupted T_oa
  PiDae,             // MultivariateDae2 + thermal-balance loss
};

inline constexpr std::array<ModelKind, 6> kAllModelKinds = {
    ModelKind::UnivariateDae1,   ModelKind::UnivariateDae2,   ModelKind::UnivariateDae3,
    ModelKind::MultivariateDae1, ModelKind::MultivariateDae2, ModelKind::PiDae};

std::string to_string(ModelKind kind);
ModelKind parse_model_kind(const std::string& name);  // throws ArgumentError

// Network channel order. T_oa, when present, is always the last channel.
std::vector<Variable> input_variables(ModelKind kind);
// Channels that can be corrupted and enter the reconstruction loss.
std::vector<Variable> target_variables(ModelKind kind);
std::size_t expected_channels(ModelKind kind);

struct HyperparameterBounds {
  static constexpr std::size_t kMinFilters = 5, kMaxFilters = 200;
  static constexpr std::size_t kMinKernel = 1, kMaxKernel = 10;
  static constexpr double kMinLearningRate = 1e-4, kMaxLearningRate = 1e-1;
  static constexpr std::size_t kMinBatch = 32, kMaxBatch = 256;
};

struct ModelSpec {
  ModelKind kind = ModelKind::MultivariateDae2;
  std::size_t channels = 4;
  std::size_t filters_external = 16;
  std::size_t filters_internal = 8;
  std::size_t kernel = 5;
  double learning_rate = 3e-3;
  std::size_t batch_size = 32;
  bool physics = false;
  // Weight of the thermal-balance term; the composite loss uses 1.
  double physics_weight = 1.0;

  // Spec with the channel count and physics flag implied by `kind`.
  static ModelSpec for_kind(ModelKind kind);

  // Same hyperparameters re-targeted at another kind.
  ModelSpec with_kind(ModelKind kind) const;

  // Throws SpecError on kind/channel/physics mismatches or out-of-range values.
  void validate() const;

  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

class DaeModel {
 public:
  // Validates the spec, allocates the autoencoder and initializes its weights
  // from init_seed. Coefficients are only trained for PI-DAE.
  static DaeModel build(const ModelSpec& spec, std::uint64_t init_seed,
                        PhysicsCoefficients coefficient_init = {});

  const ModelSpec& spec() const noexcept { return spec_; }
  nn::Network& network() noexcept { return network_; }
  const nn::Network& network() const noexcept { return network_; }
  const PhysicsCoefficients& coefficients() const noexcept { return coefficients_; }
  void set_coefficients(const PhysicsCoefficients& k) { coefficients_ = k; }
  const NormalizationStats& stats() const noexcept { return stats_; }
  void set_stats(NormalizationStats stats) { stats_ = std::move(stats); }

  // Network weights and biases, plus 3 for PI-DAE.
  std::size_t trainable_parameter_count() const;

  // Normalized-space reconstruction of a normalized input.
  nn::Tensor reconstruct(const nn::Tensor& normalized_input) const;

 private:
  ModelSpec spec_;
  nn::Network network_;
  PhysicsCoefficients coefficients_;
  NormalizationStats stats_;
};

nn::Tensor to_tensor(const DailyProfile& day, std::span<const Variable> channels);

struct LossBreakdown {
  double total = 0.0;
  double reconstruction = 0.0;
  double physics = 0.0;
  nn::Tensor grad_output;                // dL/d(output)
  std::array<double, 3> grad_coeffs{};   // dL/d(a, b, c)
};

// Reconstruction MSE over every entry of the target channels plus, for
// physics-enabled specs, physics_weight times the mean squared thermal
// residual on denormalized outputs. T_oa in the residual is taken from the
// clean target since it is never corrupted.
LossBreakdown total_loss(const ModelSpec& spec, const nn::Tensor& output, const nn::Tensor& target,
                         const PhysicsCoefficients& coefficients, const NormalizationStats& stats);

struct TrainingLimits {
  int max_epochs = 1000;
  int patience = 20;
  double min_delta = 0.0;
  // Corruption rates used for per-epoch re-masking and validation masks.
  std::vector<double> corruption_rates{0.2, 0.4, 0.6, 0.8};
};

struct TrainedModel {
  DaeModel model;  // parameters of the best validation epoch
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  double best_val_loss = 0.0;
};

// Mini-batch Adam on augmented normalized pairs with fresh masks for the
// synthetic copies each epoch. Early stopping on validation reconstruction
// loss; returns the best-validation parameters. `model` must carry the
// normalization statistics the data was scaled with.
TrainedModel train(DaeModel model, std::vector<TrainingPair> train_set,
                   std::span<const DailyProfile> val_days, std::uint64_t seed,
                   const TrainingLimits& limits);

// Observed entries are copied from `physical_profile` verbatim; masked entries
// of the model's target variables come from the reconstruction, clamped to
// [0, 1] and denormalized.
DailyProfile impute(const DaeModel& model, const DailyProfile& physical_profile,
                    const CorruptionMask& mask);

void save_checkpoint(std::ostream& out, const TrainedModel& trained);
void save_checkpoint_file(const std::string& path, const TrainedModel& trained);
TrainedModel load_checkpoint(std::istream& in);
TrainedModel load_checkpoint_file(const std::string& path);

void write_history(std::ostream& out, const std::vector<EpochRecord>& history);

}  // namespace pidae

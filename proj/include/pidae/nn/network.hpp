#pragma once

#include <span>
#include <string>
#include <vector>

#include "pidae/nn/tensor.hpp"
#include "pidae/rng.hpp"

namespace pidae::nn {

enum class LayerKind {
  ConvDown,    // stride-2 convolution, "same" zero padding: L -> L/2
  ConvUp,      // nearest-neighbour x2 up-sampling, then stride-1 "same" convolution
  Activation,  // rectified linear
};

std::string to_string(LayerKind kind);

struct LayerSpec {
  LayerKind kind = LayerKind::Activation;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 1;

  // in * out * k + out for convolutions, 0 for activations.
  std::size_t parameter_count() const;
};

// Feed-forward stack of LayerSpecs over a flat parameter vector. forward()
// caches intermediates for a single subsequent backward().
class Network {
 public:
  Network() = default;
  Network(std::vector<LayerSpec> layers, std::size_t input_length);

  // down(C->ext), relu, down(ext->int), relu, up(int->ext), relu, up(ext->C).
  static Network autoencoder(std::size_t channels, std::size_t filters_external,
                             std::size_t filters_internal, std::size_t kernel,
                             std::size_t length);

  const std::vector<LayerSpec>& layers() const noexcept { return layers_; }
  std::size_t input_channels() const;
  std::size_t output_channels() const;
  std::size_t input_length() const noexcept { return input_length_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  std::span<double> parameters() noexcept { return params_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::span<double> gradients() noexcept { return grads_; }
  std::span<const double> gradients() const noexcept { return grads_; }
  void zero_gradients();

  // Weights uniform in +-sqrt(6 / fan_in), biases zero.
  void initialize(Rng& rng);

  // Throws SpecError naming the layer on a shape mismatch.
  const Tensor& forward(const Tensor& input);
  Tensor predict(const Tensor& input) const;

  // Accumulates parameter gradients for the cached forward pass and returns
  // the gradient with respect to the input. Throws StateError when no
  // forward pass is cached.
  Tensor backward(const Tensor& grad_output);

 private:
  struct Slot {
    std::size_t weight_offset = 0;
    std::size_t bias_offset = 0;
  };

  Tensor run_layer(std::size_t i, const Tensor& x) const;
  void check_input(std::size_t i, const Tensor& x) const;

  std::vector<LayerSpec> layers_;
  std::vector<Slot> slots_;
  std::size_t input_length_ = 0;
  std::vector<double> params_;
  std::vector<double> grads_;

  std::vector<Tensor> activations_;  // activations_[i] is the input of layer i
  bool cached_ = false;
};

}  // namespace pidae::nn

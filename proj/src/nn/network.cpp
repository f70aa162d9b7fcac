#include "pidae/nn/network.hpp"

#include <algorithm>
#include <cmath>

#include "pidae/errors.hpp"

namespace pidae::nn {

namespace {

struct ConvGeometry {
  std::size_t stride;
  std::size_t in_length;   // length seen by the convolution (after up-sampling)
  std::size_t out_length;
  std::ptrdiff_t pad_left;
};

ConvGeometry geometry(const LayerSpec& spec, std::size_t length) {
  if (spec.kind == LayerKind::ConvDown) {
    const std::size_t out = length / 2;
    const std::ptrdiff_t total = std::max<std::ptrdiff_t>(
        static_cast<std::ptrdiff_t>((out - 1) * 2 + spec.kernel) - static_cast<std::ptrdiff_t>(length), 0);
    return {2, length, out, total / 2};
  }
  const std::size_t up = length * 2;
  return {1, up, up, static_cast<std::ptrdiff_t>(spec.kernel - 1) / 2};
}

Tensor upsample(const Tensor& x) {
  Tensor u(x.channels(), x.length() * 2);
  for (std::size_t c = 0; c < x.channels(); ++c) {
    for (std::size_t t = 0; t < u.length(); ++t) u(c, t) = x(c, t / 2);
  }
  return u;
}

void conv_forward(const LayerSpec& spec, const ConvGeometry& g, const Tensor& x, const double* w,
                  const double* b, Tensor& y) {
  const std::size_t k = spec.kernel;
  const auto in_len = static_cast<std::ptrdiff_t>(g.in_length);
  for (std::size_t o = 0; o < spec.out_channels; ++o) {
    auto yo = y.channel(o);
    std::fill(yo.begin(), yo.end(), b[o]);
    for (std::size_t i = 0; i < spec.in_channels; ++i) {
      const double* wk = w + (o * spec.in_channels + i) * k;
      const auto xi = x.channel(i);
      for (std::size_t t = 0; t < g.out_length; ++t) {
        const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(t * g.stride) - g.pad_left;
        double acc = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
          const std::ptrdiff_t pos = base + static_cast<std::ptrdiff_t>(j);
          if (pos >= 0 && pos < in_len) acc += wk[j] * xi[static_cast<std::size_t>(pos)];
        }
        yo[t] += acc;
      }
    }
  }
}

void conv_backward(const LayerSpec& spec, const ConvGeometry& g, const Tensor& x, const double* w,
                   const Tensor& gy, double* dw, double* db, Tensor& dx) {
  const std::size_t k = spec.kernel;
  const auto in_len = static_cast<std::ptrdiff_t>(g.in_length);
  for (std::size_t o = 0; o < spec.out_channels; ++o) {
    const auto go = gy.channel(o);
    for (std::size_t t = 0; t < g.out_length; ++t) db[o] += go[t];
    for (std::size_t i = 0; i < spec.in_channels; ++i) {
      const double* wk = w + (o * spec.in_channels + i) * k;
      double* dwk = dw + (o * spec.in_channels + i) * k;
      const auto xi = x.channel(i);
      auto dxi = dx.channel(i);
      for (std::size_t t = 0; t < g.out_length; ++t) {
        const double gv = go[t];
        if (gv == 0.0) continue;
        const std::ptrdiff_t base = static_cast<std::ptrdiff_t>(t * g.stride) - g.pad_left;
        for (std::size_t j = 0; j < k; ++j) {
          const std::ptrdiff_t pos = base + static_cast<std::ptrdiff_t>(j);
          if (pos < 0 || pos >= in_len) continue;
          const auto p = static_cast<std::size_t>(pos);
          dwk[j] += gv * xi[p];
          dxi[p] += gv * wk[j];
        }
      }
    }
  }
}

}  // namespace

std::string to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::ConvDown:
      return "conv-down";
    case LayerKind::ConvUp:
      return "conv-up";
    case LayerKind::Activation:
      return "activation";
  }
  return "?";
}

std::size_t LayerSpec::parameter_count() const {
  if (kind == LayerKind::Activation) return 0;
  return in_channels * out_channels * kernel + out_channels;
}

Network::Network(std::vector<LayerSpec> layers, std::size_t input_length)
    : layers_(std::move(layers)), input_length_(input_length) {
  if (layers_.empty()) throw SpecError("network needs at least one layer");
  std::size_t offset = 0;
  std::size_t channels = layers_.front().in_channels;
  std::size_t length = input_length;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    auto& l = layers_[i];
    const std::string name = "layer " + std::to_string(i) + " (" + to_string(l.kind) + ")";
    if (l.kind == LayerKind::Activation) {
      if (l.in_channels == 0) l.in_channels = channels;
      l.out_channels = l.in_channels;
    }
    if (l.in_channels != channels) {
      throw SpecError(name + ": expects " + std::to_string(l.in_channels) +
                      " input channels but receives " + std::to_string(channels));
    }
    if (l.kind != LayerKind::Activation) {
      if (l.kernel < 1 || l.out_channels < 1) throw SpecError(name + ": empty kernel or channels");
    }
    if (l.kind == LayerKind::ConvDown) {
      if (length % 2 != 0 || length < 2) {
        throw SpecError(name + ": input length " + std::to_string(length) + " is not even");
      }
      length /= 2;
    } else if (l.kind == LayerKind::ConvUp) {
      length *= 2;
    }
    Slot s;
    s.weight_offset = offset;
    s.bias_offset = offset + l.in_channels * l.out_channels * l.kernel;
    offset += l.parameter_count();
    slots_.push_back(s);
    channels = l.out_channels;
  }
  params_.assign(offset, 0.0);
  grads_.assign(offset, 0.0);
}

Network Network::autoencoder(std::size_t channels, std::size_t filters_external,
                             std::size_t filters_internal, std::size_t kernel,
                             std::size_t length) {
  return Network({{LayerKind::ConvDown, channels, filters_external, kernel},
                  {LayerKind::Activation, filters_external, filters_external, 0},
                  {LayerKind::ConvDown, filters_external, filters_internal, kernel},
                  {LayerKind::Activation, filters_internal, filters_internal, 0},
                  {LayerKind::ConvUp, filters_internal, filters_external, kernel},
                  {LayerKind::Activation, filters_external, filters_external, 0},
                  {LayerKind::ConvUp, filters_external, channels, kernel}},
                 length);
}

std::size_t Network::input_channels() const { return layers_.front().in_channels; }
std::size_t Network::output_channels() const { return layers_.back().out_channels; }

void Network::zero_gradients() { std::fill(grads_.begin(), grads_.end(), 0.0); }

void Network::initialize(Rng& rng) {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& l = layers_[i];
    if (l.kind == LayerKind::Activation) continue;
    const double limit = std::sqrt(6.0 / static_cast<double>(l.in_channels * l.kernel));
    std::uniform_real_distribution<double> dist(-limit, limit);
    const std::size_t n_w = l.in_channels * l.out_channels * l.kernel;
    for (std::size_t p = 0; p < n_w; ++p) params_[slots_[i].weight_offset + p] = dist(rng);
    for (std::size_t p = 0; p < l.out_channels; ++p) params_[slots_[i].bias_offset + p] = 0.0;
  }
}

void Network::check_input(std::size_t i, const Tensor& x) const {
  const auto& l = layers_[i];
  std::size_t expected_len = input_length_;
  for (std::size_t j = 0; j < i; ++j) {
    if (layers_[j].kind == LayerKind::ConvDown) expected_len /= 2;
    if (layers_[j].kind == LayerKind::ConvUp) expected_len *= 2;
  }
  if (x.channels() != l.in_channels || x.length() != expected_len) {
    throw SpecError("layer " + std::to_string(i) + " (" + to_string(l.kind) + "): expected " +
                    std::to_string(l.in_channels) + "x" + std::to_string(expected_len) +
                    " input, got " + std::to_string(x.channels()) + "x" +
                    std::to_string(x.length()));
  }
}

Tensor Network::run_layer(std::size_t i, const Tensor& x) const {
  const auto& l = layers_[i];
  if (l.kind == LayerKind::Activation) {
    Tensor y = x;
    for (double& v : y.flat()) v = std::max(v, 0.0);
    return y;
  }
  const ConvGeometry g = geometry(l, x.length());
  Tensor y(l.out_channels, g.out_length);
  const double* w = params_.data() + slots_[i].weight_offset;
  const double* b = params_.data() + slots_[i].bias_offset;
  if (l.kind == LayerKind::ConvUp) {
    conv_forward(l, g, upsample(x), w, b, y);
  } else {
    conv_forward(l, g, x, w, b, y);
  }
  return y;
}

const Tensor& Network::forward(const Tensor& input) {
  check_input(0, input);
  activations_.resize(layers_.size() + 1);
  activations_[0] = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    activations_[i + 1] = run_layer(i, activations_[i]);
  }
  cached_ = true;
  return activations_.back();
}

Tensor Network::predict(const Tensor& input) const {
  check_input(0, input);
  Tensor x = input;
  for (std::size_t i = 0; i < layers_.size(); ++i) x = run_layer(i, x);
  return x;
}

Tensor Network::backward(const Tensor& grad_output) {
  if (!cached_) throw StateError("backward called without a cached forward pass");
  const Tensor& out = activations_.back();
  if (grad_output.channels() != out.channels() || grad_output.length() != out.length()) {
    throw SpecError("backward: gradient shape does not match the network output");
  }
  cached_ = false;

  Tensor g = grad_output;
  for (std::size_t idx = layers_.size(); idx-- > 0;) {
    const auto& l = layers_[idx];
    const Tensor& x = activations_[idx];
    if (l.kind == LayerKind::Activation) {
      auto gf = g.flat();
      const auto xf = x.flat();
      for (std::size_t p = 0; p < gf.size(); ++p) {
        if (xf[p] <= 0.0) gf[p] = 0.0;
      }
      continue;
    }
    const ConvGeometry geo = geometry(l, x.length());
    const double* w = params_.data() + slots_[idx].weight_offset;
    double* dw = grads_.data() + slots_[idx].weight_offset;
    double* db = grads_.data() + slots_[idx].bias_offset;
    if (l.kind == LayerKind::ConvUp) {
      const Tensor u = upsample(x);
      Tensor du(u.channels(), u.length());
      conv_backward(l, geo, u, w, g, dw, db, du);
      Tensor dx(x.channels(), x.length());
      for (std::size_t c = 0; c < dx.channels(); ++c) {
        for (std::size_t t = 0; t < du.length(); ++t) dx(c, t / 2) += du(c, t);
      }
      g = std::move(dx);
    } else {
      Tensor dx(x.channels(), x.length());
      conv_backward(l, geo, x, w, g, dw, db, dx);
      g = std::move(dx);
    }
  }
  return g;
}

}  // namespace pidae::nn

#include "pidae/nn/optim.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pidae::nn {

double mse(std::span<const double> output, std::span<const double> target, std::span<double> grad,
           double scale) {
  if (output.size() != target.size() || (!grad.empty() && grad.size() != output.size())) {
    throw std::invalid_argument("mse: size mismatch");
  }
  if (output.empty()) return 0.0;
  const double n = static_cast<double>(output.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < output.size(); ++i) {
    const double d = output[i] - target[i];
    sum += d * d;
    if (!grad.empty()) grad[i] = scale * 2.0 * d / n;
  }
  return scale * sum / n;
}

void adam_step(std::span<double> params, std::span<const double> grads, double learning_rate,
               AdamState& state) {
  if (params.size() != grads.size()) throw std::invalid_argument("adam_step: size mismatch");
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw std::domain_error("non-finite gradient at parameter " + std::to_string(i));
    }
  }
  if (state.m.size() != params.size()) {
    state.m.assign(params.size(), 0.0);
    state.v.assign(params.size(), 0.0);
    state.step = 0;
  }
  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * g;
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * g * g;
    const double m_hat = state.m[i] / bc1;
    const double v_hat = state.v[i] / bc2;
    params[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
  }
}

}  // namespace pidae::nn

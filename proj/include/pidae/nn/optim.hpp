#pragma once

#include <span>
#include <vector>

namespace pidae::nn {

// Mean squared error over paired entries; writes dL/d(output) into grad when
// it is nonempty. `scale` multiplies both the loss and the gradient.
double mse(std::span<const double> output, std::span<const double> target,
           std::span<double> grad = {}, double scale = 1.0);

struct AdamState {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  long step = 0;
  std::vector<double> m;
  std::vector<double> v;
};

// One Adam update in place. Throws std::domain_error on a non-finite gradient
// before touching any parameter.
void adam_step(std::span<double> params, std::span<const double> grads, double learning_rate,
               AdamState& state);

}  // namespace pidae::nn

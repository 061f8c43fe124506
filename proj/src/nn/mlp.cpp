#include "pbppo/nn/mlp.hpp"

#include <cmath>
#include <string>

#include "pbppo/error.hpp"

namespace pbppo::nn {

std::vector<double> mlp_forward(const ParameterSet& params,
                                std::span<const double> input) {
  if (params.num_layers() == 0) throw ConfigError("mlp_forward: empty network");
  if (input.size() != params.input_dim()) {
    throw ConfigError("mlp_forward: input dimension " + std::to_string(input.size()) +
                      " does not match first layer (" +
                      std::to_string(params.input_dim()) + ")");
  }
  std::vector<double> x(input.begin(), input.end());
  std::vector<double> y;
  for (std::size_t k = 0; k < params.num_layers(); ++k) {
    const auto& shape = params.layer(k);
    y.assign(shape.out, 0.0);
    serial::affine_forward(x, 1, shape.in, params.weights(k), params.bias(k),
                           shape.out, y);
    if (k + 1 < params.num_layers()) {
      for (double& v : y) v = std::tanh(v);
    }
    x.swap(y);
  }
  return x;
}

Var mlp_forward(Tape& tape, Var x, std::size_t handle, const ParameterSet& params) {
  Var h = x;
  for (std::size_t k = 0; k < params.num_layers(); ++k) {
    h = tape.affine(h, handle, k);
    if (k + 1 < params.num_layers()) h = tape.tanh(h);
  }
  return h;
}

}  // namespace pbppo::nn

#include "pbppo/nn/adam.hpp"

#include <cmath>

#include "pbppo/error.hpp"

namespace pbppo::nn {

void adam_step(AdamState& state, ParameterSet& params, const ParameterSet& grads) {
  if (!params.same_shape(grads) || state.first_moment.size() != params.size() ||
      state.second_moment.size() != params.size()) {
    throw ConfigError("adam_step: shape mismatch between params, grads and state");
  }
  if (!grads.all_finite()) {
    throw NumericalError("adam_step", "adam_step: non-finite gradient");
  }
  const auto& c = state.config;
  const std::uint64_t t = state.step + 1;
  const double bc1 = 1.0 - std::pow(c.beta1, static_cast<double>(t));
  const double bc2 = 1.0 - std::pow(c.beta2, static_cast<double>(t));
  auto p = params.values();
  auto g = grads.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    double& m = state.first_moment[i];
    double& v = state.second_moment[i];
    m = c.beta1 * m + (1.0 - c.beta1) * g[i];
    v = c.beta2 * v + (1.0 - c.beta2) * g[i] * g[i];
    const double m_hat = m / bc1;
    const double v_hat = v / bc2;
    p[i] -= c.learning_rate * m_hat / (std::sqrt(v_hat) + c.floor);
  }
  state.step = t;
}

}  // namespace pbppo::nn

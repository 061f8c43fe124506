#ifndef PBPPO_NN_ADAM_HPP_
#define PBPPO_NN_ADAM_HPP_

#include <cstdint>
#include <vector>

#include "pbppo/nn/parameters.hpp"

namespace pbppo::nn {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double floor = 1e-8;

  friend bool operator==(const AdamConfig&, const AdamConfig&) = default;
};

struct AdamState {
  AdamConfig config;
  std::vector<double> first_moment;
  std::vector<double> second_moment;
  std::uint64_t step = 0;

  AdamState() = default;
  AdamState(const ParameterSet& params, AdamConfig cfg)
      : config(cfg),
        first_moment(params.size(), 0.0),
        second_moment(params.size(), 0.0) {}

  friend bool operator==(const AdamState&, const AdamState&) = default;
};

// Bias-corrected Adam update in place. Throws NumericalError if any gradient
// entry is non-finite (params and state are left untouched) and ConfigError
// on shape mismatch.
void adam_step(AdamState& state, ParameterSet& params, const ParameterSet& grads);

}  // namespace pbppo::nn

#endif  // PBPPO_NN_ADAM_HPP_

#ifndef PBPPO_NN_MLP_HPP_
#define PBPPO_NN_MLP_HPP_

#include <span>
#include <vector>

#include "pbppo/nn/parameters.hpp"
#include "pbppo/nn/tape.hpp"

namespace pbppo::nn {

// tanh on hidden layers, identity on the output layer.
std::vector<double> mlp_forward(const ParameterSet& params,
                                std::span<const double> input);

// Batched equivalent recorded on a tape; x is rows x input_dim.
Var mlp_forward(Tape& tape, Var x, std::size_t handle, const ParameterSet& params);

}  // namespace pbppo::nn

#endif  // PBPPO_NN_MLP_HPP_

#ifndef PBPPO_NN_DISTRIBUTIONS_HPP_
#define PBPPO_NN_DISTRIBUTIONS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "pbppo/nn/tape.hpp"
#include "pbppo/rng.hpp"

namespace pbppo::nn {

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

// Diagonal Gaussian with state-independent log standard deviation.
struct GaussianHead {
  std::vector<double> mean;
  std::vector<double> log_std;
};

double gaussian_logprob(const GaussianHead& head, std::span<const double> action);
std::vector<double> gaussian_sample(const GaussianHead& head, Rng& rng);
double gaussian_entropy(std::span<const double> log_std);

std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);

struct CategoricalDraw {
  std::size_t action = 0;
  double logprob = 0.0;
};

// Inverse-CDF draw from softmax(logits) using one uniform from rng.
CategoricalDraw categorical_logprob_and_sample(std::span<const double> logits, Rng& rng);
double categorical_entropy(std::span<const double> logits);

// Batched tape forms. mean/actions are rows x d, log_std is 1 x d; the results
// are rows x 1.
Var gaussian_logprob(Tape& tape, Var mean, Var log_std, Var actions);
Var gaussian_entropy(Tape& tape, Var log_std, std::size_t rows);
Var categorical_logprob(Tape& tape, Var logits, std::vector<std::size_t> actions);
Var categorical_entropy(Tape& tape, Var logits);

}  // namespace pbppo::nn

#endif  // PBPPO_NN_DISTRIBUTIONS_HPP_

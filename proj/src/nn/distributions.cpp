#include "pbppo/nn/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "pbppo/error.hpp"

namespace pbppo::nn {

namespace {
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);
}

double gaussian_logprob(const GaussianHead& head, std::span<const double> action) {
  if (head.mean.size() != action.size() || head.log_std.size() != action.size()) {
    throw ConfigError("gaussian_logprob: dimension mismatch");
  }
  double lp = 0.0;
  for (std::size_t i = 0; i < action.size(); ++i) {
    const double z = (action[i] - head.mean[i]) * std::exp(-head.log_std[i]);
    lp += -0.5 * z * z - head.log_std[i] - kHalfLog2Pi;
  }
  return lp;
}

std::vector<double> gaussian_sample(const GaussianHead& head, Rng& rng) {
  std::vector<double> a(head.mean.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = head.mean[i] + std::exp(head.log_std[i]) * rng.normal();
  }
  return a;
}

double gaussian_entropy(std::span<const double> log_std) {
  double h = 0.0;
  for (double s : log_std) h += s + 0.5 + kHalfLog2Pi;
  return h;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  if (logits.empty()) throw ConfigError("log_softmax: empty logits");
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - m);
  const double lse = m + std::log(z);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = logits[i] - lse;
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  auto p = log_softmax(logits);
  for (double& v : p) v = std::exp(v);
  return p;
}

CategoricalDraw categorical_logprob_and_sample(std::span<const double> logits,
                                               Rng& rng) {
  const auto lp = log_softmax(logits);
  const double u = rng.uniform();
  double cdf = 0.0;
  std::size_t chosen = lp.size() - 1;
  for (std::size_t i = 0; i < lp.size(); ++i) {
    cdf += std::exp(lp[i]);
    if (u < cdf) {
      chosen = i;
      break;
    }
  }
  return {chosen, lp[chosen]};
}

double categorical_entropy(std::span<const double> logits) {
  const auto lp = log_softmax(logits);
  double h = 0.0;
  for (double v : lp) h -= std::exp(v) * v;
  return h;
}

Var gaussian_logprob(Tape& tape, Var mean, Var log_std, Var actions) {
  const std::size_t d = tape.value(log_std).cols;
  const Var z = tape.mul(tape.sub(actions, mean), tape.exp(tape.neg(log_std)));
  const Var quad = tape.row_sum(tape.scale(tape.square(z), -0.5));
  const Var norm = tape.add_scalar(tape.sum(log_std), static_cast<double>(d) * kHalfLog2Pi);
  return tape.sub(quad, norm);
}

Var gaussian_entropy(Tape& tape, Var log_std, std::size_t rows) {
  const std::size_t d = tape.value(log_std).cols;
  const Var h = tape.add_scalar(tape.sum(log_std),
                                static_cast<double>(d) * (0.5 + kHalfLog2Pi));
  return tape.add(tape.input(Matrix(rows, 1)), h);
}

Var categorical_logprob(Tape& tape, Var logits, std::vector<std::size_t> actions) {
  return tape.pick(tape.log_softmax(logits), std::move(actions));
}

Var categorical_entropy(Tape& tape, Var logits) {
  const Var lp = tape.log_softmax(logits);
  return tape.neg(tape.row_sum(tape.mul(tape.exp(lp), lp)));
}

}  // namespace pbppo::nn

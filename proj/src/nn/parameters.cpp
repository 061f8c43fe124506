#include "pbppo/nn/parameters.hpp"

#include <algorithm>
#include <cmath>

#include "pbppo/error.hpp"

namespace pbppo::nn {

ParameterSet ParameterSet::mlp(std::span<const std::size_t> sizes,
                               std::size_t extra_size) {
  if (sizes.size() < 2) {
    throw ConfigError("mlp: need at least input and output sizes");
  }
  ParameterSet p;
  std::size_t offset = 0;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    if (sizes[k] == 0 || sizes[k + 1] == 0) {
      throw ConfigError("mlp: layer sizes must be positive");
    }
    LayerShape s;
    s.in = sizes[k];
    s.out = sizes[k + 1];
    s.weight_offset = offset;
    offset += s.in * s.out;
    s.bias_offset = offset;
    offset += s.out;
    p.layers_.push_back(s);
  }
  p.extra_offset_ = offset;
  p.extra_size_ = extra_size;
  p.values_.assign(offset + extra_size, 0.0);
  return p;
}

ParameterSet ParameterSet::zeros_like() const {
  ParameterSet p = *this;
  p.fill(0.0);
  return p;
}

bool ParameterSet::same_shape(const ParameterSet& other) const {
  return layers_ == other.layers_ && extra_size_ == other.extra_size_ &&
         values_.size() == other.values_.size();
}

std::span<double> ParameterSet::weights(std::size_t k) {
  const auto& s = layers_.at(k);
  return {values_.data() + s.weight_offset, s.in * s.out};
}
std::span<const double> ParameterSet::weights(std::size_t k) const {
  const auto& s = layers_.at(k);
  return {values_.data() + s.weight_offset, s.in * s.out};
}
std::span<double> ParameterSet::bias(std::size_t k) {
  const auto& s = layers_.at(k);
  return {values_.data() + s.bias_offset, s.out};
}
std::span<const double> ParameterSet::bias(std::size_t k) const {
  const auto& s = layers_.at(k);
  return {values_.data() + s.bias_offset, s.out};
}
std::span<double> ParameterSet::extra() {
  return {values_.data() + extra_offset_, extra_size_};
}
std::span<const double> ParameterSet::extra() const {
  return {values_.data() + extra_offset_, extra_size_};
}

bool ParameterSet::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

void ParameterSet::fill(double v) { std::fill(values_.begin(), values_.end(), v); }

double ParameterSet::squared_norm() const {
  double s = 0.0;
  for (double v : values_) s += v * v;
  return s;
}

void ParameterSet::init_scaled_normal(Rng& rng, double gain, double output_gain) {
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const double g = (k + 1 == layers_.size()) ? output_gain : gain;
    const double std = g / std::sqrt(static_cast<double>(layers_[k].in));
    for (double& w : weights(k)) w = std * rng.normal();
    for (double& b : bias(k)) b = 0.0;
  }
}

}  // namespace pbppo::nn

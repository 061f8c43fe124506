#ifndef PBPPO_NN_PARAMETERS_HPP_
#define PBPPO_NN_PARAMETERS_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "pbppo/rng.hpp"

namespace pbppo::nn {

struct LayerShape {
  std::size_t in = 0;
  std::size_t out = 0;
  std::size_t weight_offset = 0;  // row-major out x in block
  std::size_t bias_offset = 0;

  friend bool operator==(const LayerShape&, const LayerShape&) = default;
};

// Weights and biases of a dense network stored in one flat buffer, followed
// by an optional block of extra parameters (e.g. a state-independent
// log-std). Gradients use a ParameterSet of the same shape.
class ParameterSet {
 public:
  ParameterSet() = default;

  // Layer sizes {in, h1, ..., out}; all values start at zero.
  static ParameterSet mlp(std::span<const std::size_t> sizes,
                          std::size_t extra_size = 0);

  ParameterSet zeros_like() const;
  bool same_shape(const ParameterSet& other) const;

  std::size_t size() const { return values_.size(); }
  std::size_t num_layers() const { return layers_.size(); }
  const LayerShape& layer(std::size_t k) const { return layers_[k]; }
  std::size_t input_dim() const { return layers_.empty() ? 0 : layers_.front().in; }
  std::size_t output_dim() const { return layers_.empty() ? 0 : layers_.back().out; }
  std::size_t extra_size() const { return extra_size_; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::span<double> weights(std::size_t k);
  std::span<const double> weights(std::size_t k) const;
  std::span<double> bias(std::size_t k);
  std::span<const double> bias(std::size_t k) const;
  std::span<double> extra();
  std::span<const double> extra() const;

  bool all_finite() const;
  void fill(double v);
  double squared_norm() const;

  // Gaussian init with std gain/sqrt(fan_in) per layer; the final layer uses
  // output_gain instead. Biases zero.
  void init_scaled_normal(Rng& rng, double gain, double output_gain);

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

 private:
  std::vector<LayerShape> layers_;
  std::size_t extra_size_ = 0;
  std::size_t extra_offset_ = 0;
  std::vector<double> values_;
};

}  // namespace pbppo::nn

#endif  // PBPPO_NN_PARAMETERS_HPP_

#ifndef PBPPO_NN_TAPE_HPP_
#define PBPPO_NN_TAPE_HPP_

#include <cstddef>
#include <functional>
#include <string_view>
#include <vector>

#include "pbppo/nn/kernels.hpp"
#include "pbppo/nn/matrix.hpp"
#include "pbppo/nn/parameters.hpp"

namespace pbppo::nn {

struct Var {
  std::size_t id = 0;
};

// Reverse-mode differentiation over batched matrices. Nodes are recorded in
// evaluation order; backward() walks them in reverse and accumulates into the
// gradient buffers of every bound ParameterSet.
//
// Binary element-wise ops accept a right operand that is either the same
// shape, a 1 x cols row (broadcast over rows), or 1 x 1 (broadcast
// everywhere). clip and minimum route the subgradient through the first
// argument at ties; clip passes gradient iff lo <= x <= hi.
//
// Every op checks its output and throws NumericalError naming itself on the
// first NaN or infinity.
class Tape {
 public:
  explicit Tape(Exec exec = Exec::kSerial) : exec_(exec) {}

  // Registers a parameter set; the returned handle is used by affine/extra.
  // Both references must outlive the tape.
  std::size_t bind(const ParameterSet& params, ParameterSet& grads);

  Var input(Matrix value);
  Var constant(double value);
  Var extra_row(std::size_t handle);
  Var affine(Var x, std::size_t handle, std::size_t layer);

  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var scale(Var a, double c);
  Var add_scalar(Var a, double c);
  Var neg(Var a) { return scale(a, -1.0); }

  Var tanh(Var a);
  Var exp(Var a);
  Var log(Var a);
  Var square(Var a);
  Var clip(Var a, double lo, double hi);
  Var minimum(Var a, Var b);

  Var row_sum(Var a);
  Var sum(Var a);
  Var mean(Var a);

  Var log_softmax(Var a);
  // out[r] = a[r, cols[r]]
  Var pick(Var a, std::vector<std::size_t> cols);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  double scalar(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  // Seeds d(loss)/d(loss) = 1 for a 1 x 1 node and accumulates parameter
  // gradients into the bound buffers (which are not cleared first).
  void backward(Var loss);

 private:
  enum class Op {
    kInput, kExtra, kAffine, kAdd, kSub, kMul, kScale, kAddScalar, kTanh, kExp,
    kLog, kSquare, kClip, kMinimum, kRowSum, kSum, kMean, kLogSoftmax, kPick
  };

  struct Node {
    Op op = Op::kInput;
    Matrix value;
    std::size_t a = 0;
    std::size_t b = 0;
    double p0 = 0.0;
    double p1 = 0.0;
    std::size_t handle = 0;
    std::size_t layer = 0;
    std::vector<std::size_t> index;
    bool needs_grad = false;
  };

  struct Binding {
    const ParameterSet* params;
    ParameterSet* grads;
  };

  Var push(Node node, std::string_view name);
  Var binary(Op op, Var a, Var b, std::string_view name);
  Var unary(Op op, Var a, std::string_view name, double p0 = 0.0, double p1 = 0.0);

  Exec exec_;
  std::vector<Node> nodes_;
  std::vector<Binding> bindings_;
};

struct LossAndGrad {
  double loss = 0.0;
  ParameterSet grad;
};

// Evaluates loss_fn on a fresh tape bound to params (handle 0) and returns
// the loss with its exact gradient.
LossAndGrad loss_grad(const ParameterSet& params,
                      const std::function<Var(Tape&, std::size_t)>& loss_fn,
                      Exec exec = Exec::kSerial);

}  // namespace pbppo::nn

#endif  // PBPPO_NN_TAPE_HPP_

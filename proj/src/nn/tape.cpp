#include "pbppo/nn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pbppo/error.hpp"

namespace pbppo::nn {

namespace {

enum class Broadcast { kSame, kRow, kScalar };

Broadcast broadcast_kind(const Matrix& a, const Matrix& b, std::string_view name) {
  if (a.same_shape(b)) return Broadcast::kSame;
  if (b.rows == 1 && b.cols == 1) return Broadcast::kScalar;
  if (b.rows == 1 && b.cols == a.cols) return Broadcast::kRow;
  throw ConfigError(std::string(name) + ": shape mismatch (" +
                    std::to_string(a.rows) + "x" + std::to_string(a.cols) +
                    " vs " + std::to_string(b.rows) + "x" + std::to_string(b.cols) +
                    ")");
}

inline std::size_t bidx(Broadcast k, std::size_t r, std::size_t c, std::size_t cols) {
  switch (k) {
    case Broadcast::kSame:
      return r * cols + c;
    case Broadcast::kRow:
      return c;
    case Broadcast::kScalar:
      return 0;
  }
  return 0;
}

}  // namespace

std::size_t Tape::bind(const ParameterSet& params, ParameterSet& grads) {
  if (!params.same_shape(grads)) {
    throw ConfigError("tape: gradient buffer shape does not match parameters");
  }
  bindings_.push_back({&params, &grads});
  return bindings_.size() - 1;
}

Var Tape::push(Node node, std::string_view name) {
  for (double v : node.value.data) {
    if (!std::isfinite(v)) {
      throw NumericalError(std::string(name),
                           "non-finite value produced by " + std::string(name));
    }
  }
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

Var Tape::input(Matrix value) {
  Node n;
  n.op = Op::kInput;
  n.value = std::move(value);
  return push(std::move(n), "input");
}

Var Tape::constant(double value) { return input(Matrix(1, 1, value)); }

Var Tape::extra_row(std::size_t handle) {
  const auto& p = *bindings_.at(handle).params;
  Node n;
  n.op = Op::kExtra;
  n.value = Matrix::row(p.extra());
  n.handle = handle;
  n.needs_grad = true;
  return push(std::move(n), "extra");
}

Var Tape::affine(Var x, std::size_t handle, std::size_t layer) {
  const auto& p = *bindings_.at(handle).params;
  const auto& shape = p.layer(layer);
  const Matrix& xv = nodes_[x.id].value;
  if (xv.cols != shape.in) {
    throw ConfigError("affine: input has " + std::to_string(xv.cols) +
                      " columns, layer expects " + std::to_string(shape.in));
  }
  Node n;
  n.op = Op::kAffine;
  n.value = Matrix(xv.rows, shape.out);
  affine_forward(exec_, xv.data, xv.rows, shape.in, p.weights(layer), p.bias(layer),
                 shape.out, n.value.data);
  n.a = x.id;
  n.handle = handle;
  n.layer = layer;
  n.needs_grad = true;
  return push(std::move(n), "affine");
}

Var Tape::binary(Op op, Var a, Var b, std::string_view name) {
  const Matrix& av = nodes_[a.id].value;
  const Matrix& bv = nodes_[b.id].value;
  const Broadcast k = broadcast_kind(av, bv, name);
  if (op == Op::kMinimum && k != Broadcast::kSame) {
    throw ConfigError("minimum: operands must have the same shape");
  }
  Node n;
  n.op = op;
  n.value = Matrix(av.rows, av.cols);
  for (std::size_t r = 0; r < av.rows; ++r) {
    for (std::size_t c = 0; c < av.cols; ++c) {
      const double x = av(r, c);
      const double y = bv.data[bidx(k, r, c, av.cols)];
      double out = 0.0;
      switch (op) {
        case Op::kAdd: out = x + y; break;
        case Op::kSub: out = x - y; break;
        case Op::kMul: out = x * y; break;
        case Op::kMinimum: out = (x <= y) ? x : y; break;
        default: break;
      }
      n.value(r, c) = out;
    }
  }
  n.a = a.id;
  n.b = b.id;
  n.needs_grad = nodes_[a.id].needs_grad || nodes_[b.id].needs_grad;
  return push(std::move(n), name);
}

Var Tape::add(Var a, Var b) { return binary(Op::kAdd, a, b, "add"); }
Var Tape::sub(Var a, Var b) { return binary(Op::kSub, a, b, "sub"); }
Var Tape::mul(Var a, Var b) { return binary(Op::kMul, a, b, "mul"); }
Var Tape::minimum(Var a, Var b) { return binary(Op::kMinimum, a, b, "minimum"); }

Var Tape::unary(Op op, Var a, std::string_view name, double p0, double p1) {
  const Matrix& av = nodes_[a.id].value;
  Node n;
  n.op = op;
  n.value = Matrix(av.rows, av.cols);
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double x = av.data[i];
    double out = 0.0;
    switch (op) {
      case Op::kScale: out = p0 * x; break;
      case Op::kAddScalar: out = x + p0; break;
      case Op::kTanh: out = std::tanh(x); break;
      case Op::kExp: out = std::exp(x); break;
      case Op::kLog: out = std::log(x); break;
      case Op::kSquare: out = x * x; break;
      case Op::kClip: out = std::min(std::max(x, p0), p1); break;
      default: break;
    }
    n.value.data[i] = out;
  }
  n.a = a.id;
  n.p0 = p0;
  n.p1 = p1;
  n.needs_grad = nodes_[a.id].needs_grad;
  return push(std::move(n), name);
}

Var Tape::scale(Var a, double c) { return unary(Op::kScale, a, "scale", c); }
Var Tape::add_scalar(Var a, double c) { return unary(Op::kAddScalar, a, "add_scalar", c); }
Var Tape::tanh(Var a) { return unary(Op::kTanh, a, "tanh"); }
Var Tape::exp(Var a) { return unary(Op::kExp, a, "exp"); }
Var Tape::log(Var a) { return unary(Op::kLog, a, "log"); }
Var Tape::square(Var a) { return unary(Op::kSquare, a, "square"); }
Var Tape::clip(Var a, double lo, double hi) {
  if (lo > hi) throw ConfigError("clip: lo > hi");
  return unary(Op::kClip, a, "clip", lo, hi);
}

Var Tape::row_sum(Var a) {
  const Matrix& av = nodes_[a.id].value;
  Node n;
  n.op = Op::kRowSum;
  n.value = Matrix(av.rows, 1);
  for (std::size_t r = 0; r < av.rows; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < av.cols; ++c) s += av(r, c);
    n.value.data[r] = s;
  }
  n.a = a.id;
  n.needs_grad = nodes_[a.id].needs_grad;
  return push(std::move(n), "row_sum");
}

Var Tape::sum(Var a) {
  const Matrix& av = nodes_[a.id].value;
  Node n;
  n.op = Op::kSum;
  double s = 0.0;
  for (double v : av.data) s += v;
  n.value = Matrix(1, 1, s);
  n.a = a.id;
  n.needs_grad = nodes_[a.id].needs_grad;
  return push(std::move(n), "sum");
}

Var Tape::mean(Var a) {
  const Matrix& av = nodes_[a.id].value;
  if (av.size() == 0) throw ConfigError("mean: empty operand");
  Node n;
  n.op = Op::kMean;
  double s = 0.0;
  for (double v : av.data) s += v;
  n.value = Matrix(1, 1, s / static_cast<double>(av.size()));
  n.a = a.id;
  n.needs_grad = nodes_[a.id].needs_grad;
  return push(std::move(n), "mean");
}

Var Tape::log_softmax(Var a) {
  const Matrix& av = nodes_[a.id].value;
  Node n;
  n.op = Op::kLogSoftmax;
  n.value = Matrix(av.rows, av.cols);
  for (std::size_t r = 0; r < av.rows; ++r) {
    const auto row = av.row_span(r);
    const double m = *std::max_element(row.begin(), row.end());
    double z = 0.0;
    for (double v : row) z += std::exp(v - m);
    const double lse = m + std::log(z);
    for (std::size_t c = 0; c < av.cols; ++c) n.value(r, c) = row[c] - lse;
  }
  n.a = a.id;
  n.needs_grad = nodes_[a.id].needs_grad;
  return push(std::move(n), "log_softmax");
}

Var Tape::pick(Var a, std::vector<std::size_t> cols) {
  const Matrix& av = nodes_[a.id].value;
  if (cols.size() != av.rows) throw ConfigError("pick: one column index per row");
  Node n;
  n.op = Op::kPick;
  n.value = Matrix(av.rows, 1);
  for (std::size_t r = 0; r < av.rows; ++r) {
    if (cols[r] >= av.cols) throw ConfigError("pick: column index out of range");
    n.value.data[r] = av(r, cols[r]);
  }
  n.a = a.id;
  n.index = std::move(cols);
  n.needs_grad = nodes_[a.id].needs_grad;
  return push(std::move(n), "pick");
}

double Tape::scalar(Var v) const {
  const Matrix& m = nodes_[v.id].value;
  if (m.size() != 1) throw ConfigError("scalar: node is not 1x1");
  return m.data[0];
}

void Tape::backward(Var loss) {
  if (nodes_[loss.id].value.size() != 1) {
    throw ConfigError("backward: loss must be a 1x1 node");
  }
  std::vector<Matrix> grads(loss.id + 1);
  auto grad_of = [&](std::size_t id) -> Matrix& {
    Matrix& g = grads[id];
    if (g.size() == 0 && nodes_[id].value.size() != 0) {
      g = Matrix(nodes_[id].value.rows, nodes_[id].value.cols);
    }
    return g;
  };
  grad_of(loss.id).data[0] = 1.0;

  for (std::size_t id = loss.id + 1; id-- > 0;) {
    const Node& n = nodes_[id];
    if (!n.needs_grad || grads[id].size() == 0) continue;
    const Matrix& g = grads[id];
    switch (n.op) {
      case Op::kInput:
        break;
      case Op::kExtra: {
        auto dst = bindings_[n.handle].grads->extra();
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += g.data[c];
        break;
      }
      case Op::kAffine: {
        const Node& x = nodes_[n.a];
        auto& binding = bindings_[n.handle];
        const auto& shape = binding.params->layer(n.layer);
        std::span<double> dx;
        if (x.needs_grad) dx = grad_of(n.a).data;
        affine_backward(exec_, x.value.data, x.value.rows, shape.in,
                        binding.params->weights(n.layer), shape.out, g.data, dx,
                        binding.grads->weights(n.layer), binding.grads->bias(n.layer));
        break;
      }
      case Op::kAdd:
      case Op::kSub:
      case Op::kMul:
      case Op::kMinimum: {
        const Matrix& av = nodes_[n.a].value;
        const Matrix& bv = nodes_[n.b].value;
        const Broadcast k = broadcast_kind(av, bv, "backward");
        const bool ga = nodes_[n.a].needs_grad;
        const bool gb = nodes_[n.b].needs_grad;
        Matrix* da = ga ? &grad_of(n.a) : nullptr;
        Matrix* db = gb ? &grad_of(n.b) : nullptr;
        for (std::size_t r = 0; r < av.rows; ++r) {
          for (std::size_t c = 0; c < av.cols; ++c) {
            const std::size_t ia = r * av.cols + c;
            const std::size_t ib = bidx(k, r, c, av.cols);
            const double gi = g.data[ia];
            double fa = 0.0;
            double fb = 0.0;
            switch (n.op) {
              case Op::kAdd: fa = 1.0; fb = 1.0; break;
              case Op::kSub: fa = 1.0; fb = -1.0; break;
              case Op::kMul: fa = bv.data[ib]; fb = av.data[ia]; break;
              case Op::kMinimum:
                if (av.data[ia] <= bv.data[ib]) fa = 1.0; else fb = 1.0;
                break;
              default: break;
            }
            if (da) da->data[ia] += gi * fa;
            if (db) db->data[ib] += gi * fb;
          }
        }
        break;
      }
      case Op::kScale:
      case Op::kAddScalar:
      case Op::kTanh:
      case Op::kExp:
      case Op::kLog:
      case Op::kSquare:
      case Op::kClip: {
        const Matrix& av = nodes_[n.a].value;
        Matrix& da = grad_of(n.a);
        for (std::size_t i = 0; i < av.size(); ++i) {
          const double x = av.data[i];
          const double y = n.value.data[i];
          double d = 0.0;
          switch (n.op) {
            case Op::kScale: d = n.p0; break;
            case Op::kAddScalar: d = 1.0; break;
            case Op::kTanh: d = 1.0 - y * y; break;
            case Op::kExp: d = y; break;
            case Op::kLog: d = 1.0 / x; break;
            case Op::kSquare: d = 2.0 * x; break;
            case Op::kClip: d = (x >= n.p0 && x <= n.p1) ? 1.0 : 0.0; break;
            default: break;
          }
          da.data[i] += g.data[i] * d;
        }
        break;
      }
      case Op::kRowSum: {
        Matrix& da = grad_of(n.a);
        for (std::size_t r = 0; r < da.rows; ++r) {
          for (std::size_t c = 0; c < da.cols; ++c) da(r, c) += g.data[r];
        }
        break;
      }
      case Op::kSum:
      case Op::kMean: {
        Matrix& da = grad_of(n.a);
        const double s =
            n.op == Op::kSum ? g.data[0] : g.data[0] / static_cast<double>(da.size());
        for (double& v : da.data) v += s;
        break;
      }
      case Op::kLogSoftmax: {
        Matrix& da = grad_of(n.a);
        for (std::size_t r = 0; r < da.rows; ++r) {
          double gs = 0.0;
          for (std::size_t c = 0; c < da.cols; ++c) gs += g(r, c);
          for (std::size_t c = 0; c < da.cols; ++c) {
            da(r, c) += g(r, c) - std::exp(n.value(r, c)) * gs;
          }
        }
        break;
      }
      case Op::kPick: {
        Matrix& da = grad_of(n.a);
        for (std::size_t r = 0; r < da.rows; ++r) da(r, n.index[r]) += g.data[r];
        break;
      }
    }
  }
}

LossAndGrad loss_grad(const ParameterSet& params,
                      const std::function<Var(Tape&, std::size_t)>& loss_fn,
                      Exec exec) {
  LossAndGrad out;
  out.grad = params.zeros_like();
  Tape tape(exec);
  const std::size_t h = tape.bind(params, out.grad);
  const Var loss = loss_fn(tape, h);
  out.loss = tape.scalar(loss);
  tape.backward(loss);
  return out;
}

}  // namespace pbppo::nn

#pragma once

#include <functional>
#include <unordered_map>
#include <vector>

#include "core/tensor.hpp"

namespace cadaft {

/// Reverse-mode autodiff tape.
///
/// Operations append nodes in construction order, which is topological by
/// definition (an operand must exist before it can be consumed). backward()
/// replays the tape in reverse, then flushes each leaf node's gradient into
/// the bound parameter tensor, so every leaf accumulates exactly once per
/// pass. Tapes are never shared across concurrent runs.
class Tape {
 public:
  struct Var {
    int id = -1;
    bool valid() const { return id >= 0; }
  };

  /// Register a differentiable leaf bound to an external parameter tensor.
  /// Registering the same tensor twice returns the existing node.
  Var leaf(Tensor& param);

  /// Register a constant input; gradients do not flow into it.
  Var input(Tensor value);

  Var matmul(Var a, Var b);

  // Binary elementwise ops; equal shapes or broadcast of a length-1 axis.
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);

  Var relu(Var a);
  Var tanh(Var a);
  Var sigmoid(Var a);
  Var log(Var a);

  // Row-wise over the last axis, numerically stabilized by max subtraction.
  Var softmax(Var a);
  Var log_softmax(Var a);

  Var sum(Var a);  // reduce every entry to a scalar
  Var scale(Var a, double factor);

  const Tensor& value(Var v) const;
  std::size_t size() const { return nodes_.size(); }

  /// Populate grad on every leaf reachable from `loss` with d(loss)/d(leaf);
  /// unreachable leaves receive zero grad. `loss` must be scalar.
  void backward(Var loss);

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    std::function<void(Tape&)> back;  // accumulates into parent grad buffers
    Tensor* bound = nullptr;
  };

  Var push(Tensor value, std::function<void(Tape&)> back = nullptr, Tensor* bound = nullptr);
  Tensor& val(int id) { return nodes_[static_cast<std::size_t>(id)].value; }
  Tensor& grd(int id) { return nodes_[static_cast<std::size_t>(id)].grad; }
  void check(Var v, const char* op) const;

  Var binary(Var a, Var b, const char* name, double (*fwd)(double, double),
             void (*bwd)(double up, double av, double bv, double& ga, double& gb));
  Var unary(Var a, double (*fwd)(double), double (*bwd)(double up, double x, double y));

  std::vector<Node> nodes_;
  std::unordered_map<const Tensor*, int> leaf_ids_;
};

}  // namespace cadaft

#include "nn/layers.hpp"

#include <cmath>

#include "core/error.hpp"

namespace cadaft {

Activation activation_from_string(const std::string& s) {
  if (s == "identity") return Activation::identity;
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  throw ConfigError("unknown activation '" + s + "' (expected identity, relu or tanh)");
}

std::string activation_to_string(Activation a) {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
  }
  throw Error("unreachable activation value");
}

std::vector<Tensor*> Mlp::parameters() {
  std::vector<Tensor*> out;
  for (DenseLayer& l : layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

std::vector<const Tensor*> Mlp::parameters() const {
  std::vector<const Tensor*> out;
  for (const DenseLayer& l : layers) {
    out.push_back(&l.weight);
    out.push_back(&l.bias);
  }
  return out;
}

Tape::Var Mlp::forward(Tape& tape, Tape::Var x, bool trainable) {
  Tape::Var h = x;
  for (DenseLayer& l : layers) {
    const Tape::Var w = trainable ? tape.leaf(l.weight) : tape.input(l.weight);
    const Tape::Var b = trainable ? tape.leaf(l.bias) : tape.input(l.bias);
    h = tape.add(tape.matmul(h, w), b);
    switch (l.activation) {
      case Activation::identity: break;
      case Activation::relu: h = tape.relu(h); break;
      case Activation::tanh: h = tape.tanh(h); break;
    }
  }
  return h;
}

Tensor Mlp::eval(const Tensor& x) const {
  Tensor h = x;
  for (const DenseLayer& l : layers) {
    Tensor z = matmul_value(h, l.weight);
    const std::size_t rows = z.rows(), cols = z.cols();
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) z.values[r * cols + c] += l.bias.values[c];
    }
    switch (l.activation) {
      case Activation::identity: break;
      case Activation::relu:
        for (double& v : z.values) v = v > 0.0 ? v : 0.0;
        break;
      case Activation::tanh:
        for (double& v : z.values) v = std::tanh(v);
        break;
    }
    h = std::move(z);
  }
  return h;
}

Mlp init_mlp(const std::vector<std::size_t>& dims, Activation hidden, Rng& rng) {
  if (dims.size() < 2) {
    throw ConfigError("init_mlp needs at least input and output sizes, got " +
                      std::to_string(dims.size()) + " dims");
  }
  Mlp m;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    const std::size_t in = dims[i], out = dims[i + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
    DenseLayer l;
    l.weight = Tensor::zeros({in, out});
    for (double& v : l.weight.values) v = rng.uniform(-bound, bound);
    l.bias = Tensor::zeros({out});
    l.activation = (i + 2 < dims.size()) ? hidden : Activation::identity;
    m.layers.push_back(std::move(l));
  }
  return m;
}

}  // namespace cadaft

#pragma once

#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/tape.hpp"
#include "core/tensor.hpp"

namespace cadaft {

enum class Activation { identity, relu, tanh };

Activation activation_from_string(const std::string& s);
std::string activation_to_string(Activation a);

struct DenseLayer {
  Tensor weight;  // [in x out]
  Tensor bias;    // [out]
  Activation activation = Activation::identity;

  std::size_t in_dim() const { return weight.shape[0]; }
  std::size_t out_dim() const { return weight.shape[1]; }
};

/// Plain feed-forward stack; consecutive layer dimensions must chain.
struct Mlp {
  std::vector<DenseLayer> layers;

  std::size_t in_dim() const { return layers.front().in_dim(); }
  std::size_t out_dim() const { return layers.back().out_dim(); }

  std::vector<Tensor*> parameters();
  std::vector<const Tensor*> parameters() const;

  /// Batched taped forward pass; x is [B x in]. When trainable is false the
  /// weights enter the tape as constants, so gradients flow through the
  /// layer into x but never into the weights.
  Tape::Var forward(Tape& tape, Tape::Var x, bool trainable);

  /// Untaped forward pass; pure function of the input for a frozen model.
  Tensor eval(const Tensor& x) const;
};

/// Layers of the given sizes with Glorot-uniform weights in
/// (-sqrt(6/(in+out)), +sqrt(6/(in+out))), zero biases, and `hidden` as the
/// activation of every layer except the last (identity). Deterministic in
/// the rng state.
Mlp init_mlp(const std::vector<std::size_t>& dims, Activation hidden, Rng& rng);

}  // namespace cadaft

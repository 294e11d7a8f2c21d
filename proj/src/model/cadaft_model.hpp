#pragma once

#include <string>
#include <vector>

#include "core/rng.hpp"
#include "core/tape.hpp"
#include "nn/layers.hpp"

namespace cadaft {

struct ModelDims {
  std::size_t input = 0;                       // feature width d
  std::size_t latent = 8;                      // representation width l, > 1
  std::size_t classes = 2;                     // task classes K
  std::size_t domains = 2;                     // total domains
  std::vector<std::size_t> confounder_arity;   // one entry per confounder head
  std::vector<std::size_t> extractor_hidden = {32};
  std::vector<std::size_t> head_hidden = {};   // shared depth for all heads
  Activation activation = Activation::tanh;

  void validate() const;
};

/// Shared feature extractor feeding a task head, a domain head, and one
/// independent classifier per confounder (no parameter sharing between
/// heads). Heads output logits; probabilities come from a softmax on top.
struct CadaftModel {
  ModelDims dims;
  Mlp extractor;
  Mlp task_head;
  Mlp domain_head;
  std::vector<Mlp> confounder_heads;

  static CadaftModel init(const ModelDims& dims, Rng& rng);

  std::size_t confounder_count() const { return confounder_heads.size(); }
};

/// Probability view of one forward pass. Every probability row sums to 1.
struct ModelOutputs {
  Tensor z;                     // [B x l]
  Tensor y_prob;                // [B x K]
  Tensor s_prob;                // [B x domains]
  std::vector<Tensor> t_prob;   // per confounder, [B x arity]
};

ModelOutputs model_forward(const CadaftModel& m, const Tensor& x);

/// Taped forward pass used by the training phases. Trainability is decided
/// per parameter subset; frozen subsets enter the tape as constants so
/// gradients pass through them without accumulating.
struct TapedForwardFlags {
  bool extractor_trainable = true;
  bool task_trainable = true;
  bool confounders_trainable = true;
  bool domain_trainable = false;
  bool want_task = true;
  bool want_confounders = true;
  bool want_domain = true;
};

struct TapedOutputs {
  Tape::Var z;
  Tape::Var y_logits;                 // invalid when !want_task
  Tape::Var s_logits;                 // invalid when !want_domain
  std::vector<Tape::Var> t_logits;    // empty when !want_confounders
};

TapedOutputs taped_forward(Tape& tape, CadaftModel& m, const Tensor& x, const TapedForwardFlags& flags);

/// Named parameter sets for the alternating trainer. domain_only and
/// extractor_and_heads are disjoint and their union is all.
struct ParameterGroups {
  std::vector<Tensor*> extractor_and_heads;  // extractor + task + confounder heads
  std::vector<Tensor*> domain_only;          // domain head
  std::vector<Tensor*> all;
};

ParameterGroups parameter_groups(CadaftModel& m);

std::size_t parameter_count(const CadaftModel& m);

// Versioned text checkpoint; round-trips bit-exactly (hexfloat encoding).
void save_checkpoint(const CadaftModel& m, const std::string& path);
CadaftModel load_checkpoint(const std::string& path);

}  // namespace cadaft

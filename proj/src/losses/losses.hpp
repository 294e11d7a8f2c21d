#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "core/tape.hpp"
#include "core/tensor.hpp"
#include "model/cadaft_model.hpp"

namespace cadaft {

/// One-hot label bundle for a batch. The *_used flags mark exactly the rows
/// whose label term enters a loss; a row with the flag off contributes 0 to
/// that term. One-hot rows sum to exactly 1.
struct BatchLabels {
  Tensor y;                                       // [B x K]; may be empty when no row uses it
  std::vector<std::uint8_t> y_used;               // per row
  Tensor s;                                       // [B x domains], always known
  std::vector<Tensor> t;                          // per confounder [B x arity]
  std::vector<std::vector<std::uint8_t>> t_used;  // per confounder, per row

  std::size_t batch_size() const { return s.rows(); }
};

Tensor one_hot(const std::vector<int>& values, std::size_t width);

struct CeValue {
  double value = 0.0;
  bool any_used = false;  // false: every row was excluded and value is 0
};

/// Mean over used rows of -sum_k target_k * log(prob_k). Probability rows
/// must be normalized and NaN-free.
CeValue cross_entropy(const Tensor& prob, const Tensor& target_onehot,
                      const std::vector<std::uint8_t>& used);

/// Same quantity built from logits through log-sum-exp; this is the path
/// every training loss uses.
struct CeTerm {
  Tape::Var var;          // invalid when no row is used
  double value = 0.0;
  bool any_used = false;
};

CeTerm cross_entropy_logits(Tape& tape, Tape::Var logits, const Tensor& target_onehot,
                            const std::vector<std::uint8_t>& used);

/// Confusion loss: mean cross-entropy of the domain probabilities against
/// the uniform distribution over N domains, averaged over the source and
/// target batches. Minimum ln N, attained iff every row is uniform.
double loss_adv(const Tensor& s_prob_src, const Tensor& s_prob_tgt);
Tape::Var loss_adv_logits(Tape& tape, Tape::Var s_logits_src, Tape::Var s_logits_tgt);

/// Supervised composite: task CE on used source rows, domain CE with true
/// labels on both batches, and per-confounder CE on used rows of both
/// batches. Target rows must not carry a usable task label.
struct MaxStepBreakdown {
  double task_src = 0.0;
  double domain_src = 0.0;
  double domain_tgt = 0.0;
  std::vector<double> conf_src;
  std::vector<double> conf_tgt;
  double total = 0.0;
};

Tape::Var loss_max_step(Tape& tape, const TapedOutputs& src, const BatchLabels& src_labels,
                        const TapedOutputs* tgt, const BatchLabels* tgt_labels,
                        MaxStepBreakdown* breakdown = nullptr);

/// Absolute difference between the mean predicted probability of the
/// designated domain over the source rows and over the target rows,
/// optionally restricted to rows whose confounder equals a stratum value.
/// Returns nullopt when a stratum filter leaves either side empty.
struct StratumFilter {
  std::size_t confounder = 0;
  int value = 0;
};

std::optional<double> domain_discrepancy(
    const Tensor& s_prob_src, const Tensor& s_prob_tgt, std::size_t designated_domain,
    const std::optional<StratumFilter>& stratum = std::nullopt,
    const std::vector<std::vector<std::optional<int>>>* t_src = nullptr,
    const std::vector<std::vector<std::optional<int>>>* t_tgt = nullptr);

}  // namespace cadaft

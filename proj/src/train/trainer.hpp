#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "data/dataset.hpp"
#include "eval/metrics.hpp"
#include "losses/losses.hpp"
#include "model/cadaft_model.hpp"
#include "nn/adam.hpp"

namespace cadaft {

enum class Ablation { full, no_confounder, erm_only, no_adversary };

Ablation ablation_from_string(const std::string& s);
std::string ablation_to_string(Ablation a);

struct TrainConfig {
  std::size_t epochs = 40;
  std::size_t disc_steps = 5;  // discriminator updates per epoch
  std::size_t batch = 64;
  double lr = 1e-3;
  double lambda = 1.0;  // weight of the confusion loss
  double weight_decay = 0.01;
  std::uint64_t seed = 1;
  Ablation ablation = Ablation::full;
  std::size_t few_shot = 16;    // annotated target rows mixed into training
  std::size_t eval_every = 1;   // evaluation cadence in epochs
  bool domain_ce_into_extractor = false;
  std::size_t checkpoint_every = 0;  // 0 = final checkpoint only

  void validate() const;
};

struct TrainHistory {
  std::vector<MetricsRecord> records;
  std::vector<std::string> warnings;
};

struct TrainResult {
  CadaftModel model;
  TrainHistory history;
  std::size_t phase_violations = 0;
};

struct Batch {
  Tensor x;
  BatchLabels labels;
};

std::uint64_t params_checksum(const std::vector<Tensor*>& params);

/// One alternating run: per epoch, disc_steps discriminator updates on
/// fresh mini-batches (domain head only, true domain labels), then one pass
/// of feature updates over the source data paired with resampled target
/// batches (extractor, task and confounder heads only, domain head frozen).
class Trainer {
 public:
  Trainer(CadaftModel model, TrainConfig cfg, const SplitSet& data);

  /// Update the domain head only, minimizing true-label domain CE over the
  /// two batches; returns that CE. Every other parameter stays bit-identical.
  double discriminator_step(const Batch& src, const Batch& tgt);

  /// Update extractor, task head and confounder heads only, minimizing
  /// task CE + confounder CE + lambda * confusion; returns the total.
  /// tgt may be null (source-only training).
  double feature_step(const Batch& src, const Batch* tgt);

  using EpochHook = std::function<void(const CadaftModel&, std::size_t epoch)>;
  TrainResult run(const EpochHook& hook = nullptr);

  CadaftModel& model() { return model_; }
  const TrainHistory& history() const { return history_; }
  std::size_t phase_violations() const { return phase_violations_; }
  double effective_lambda() const { return lambda_; }
  std::size_t effective_batch() const { return batch_; }

  Batch make_batch(const std::vector<Instance>& pool, const std::vector<std::size_t>& rows,
                   bool target_side) const;

 private:
  bool uses_adversary() const;
  bool uses_confounders() const;
  void eval_and_record(std::size_t epoch, double task_ce, double disc_ce, double feat_loss);

  CadaftModel model_;
  TrainConfig cfg_;
  double lambda_;
  std::size_t batch_;
  Rng rng_;
  std::vector<Instance> source_;
  std::vector<Instance> target_;  // unlabeled pool plus annotated few-shot rows
  const std::vector<Instance>* id_test_;
  const std::vector<Instance>* ood_test_;
  Adam feature_opt_;
  Adam domain_opt_;
  TrainHistory history_;
  std::size_t phase_violations_ = 0;
};

/// Initialize a model from the rng stream of cfg.seed and run the schedule.
TrainResult train(const ModelDims& dims, const TrainConfig& cfg, const SplitSet& data,
                  const Trainer::EpochHook& hook = nullptr);

/// Same schedule starting from an existing model (checkpoint resume).
TrainResult train_from(CadaftModel model, const TrainConfig& cfg, const SplitSet& data,
                       const Trainer::EpochHook& hook = nullptr);

}  // namespace cadaft

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "data/dataset.hpp"
#include "model/cadaft_model.hpp"

namespace cadaft {

enum class Head { task, domain, confounder };

/// Argmax accuracy of one head over the rows of `split` that carry the
/// requested label; ties break toward the lowest class index.
double accuracy(const CadaftModel& m, const std::vector<Instance>& split, Head head,
                std::size_t conf_index = 0);

/// One evaluation snapshot. Accuracies are fractions in [0, 1];
/// discrepancies are >= 0; train_* fields are loss traces averaged over the
/// steps of the epoch that produced the record (NaN before training).
struct MetricsRecord {
  std::size_t epoch = 0;
  std::string ablation;
  std::uint64_t seed = 0;
  double task_acc_id = 0.0;
  double task_acc_ood = 0.0;
  double domain_acc = 0.0;
  std::vector<double> conf_acc;
  double loss_adv_holdout = 0.0;
  double disc_pooled = 0.0;
  // Stratified discrepancy keyed "c<confounder>_v<value>"; nullopt = empty stratum.
  std::vector<std::pair<std::string, std::optional<double>>> disc_strata;
  double train_task_ce = 0.0;
  double train_disc_ce = 0.0;
  double train_feature_loss = 0.0;
};

/// Evaluate a model on the held-out ID and OOD test splits.
MetricsRecord evaluate_model(const CadaftModel& m, const std::vector<Instance>& id_test,
                             const std::vector<Instance>& ood_test);

Tensor features_of(const std::vector<Instance>& split);

// Versioned comma-separated metrics file with a fixed header; warnings are
// carried as comment lines after the header.
void write_metrics_csv(const std::string& path, const std::vector<MetricsRecord>& records,
                       std::size_t confounders, const std::vector<std::size_t>& arities,
                       const std::vector<std::string>& warnings);

/// One line per instance: the latent vector, then y, s and the confounder
/// values, for external dimensionality-reduction tools.
void dump_representations(const CadaftModel& m, const std::vector<Instance>& split,
                          const std::string& path);

/// Parse a representation dump back into latent rows (test/round-trip aid).
std::vector<std::vector<double>> read_representation_dump(const std::string& path);

}  // namespace cadaft

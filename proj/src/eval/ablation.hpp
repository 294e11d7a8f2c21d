#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "data/dataset.hpp"
#include "model/cadaft_model.hpp"
#include "train/trainer.hpp"

namespace cadaft {

struct ComparisonRow {
  std::string ablation;
  std::uint64_t seed = 0;
  double acc_id = 0.0;
  double acc_ood = 0.0;
  double domain_acc = 0.0;
};

struct ComparisonAggregate {
  std::string ablation;
  double mean_id = 0.0;
  double mean_ood = 0.0;
  std::optional<double> std_id;   // absent with fewer than 2 seeds
  std::optional<double> std_ood;
};

struct ComparisonTable {
  std::vector<ComparisonRow> rows;          // keyed (ablation, seed)
  std::vector<ComparisonAggregate> aggregates;
};

/// Train erm_only, no_confounder and full per seed on shared datasets and
/// aggregate mean/stddev of the final ID and OOD task accuracies. Training
/// errors are rethrown annotated with the (ablation, seed) pair.
/// `sink`, when given, receives every finished run for artifact writing.
struct AblationRunResult {
  std::string ablation;
  std::uint64_t seed;
  const TrainResult* result;
};

using AblationSink = std::function<void(const AblationRunResult&)>;

ComparisonTable run_ablation_suite(const ModelDims& dims, const TrainConfig& base,
                                   const SplitSet& data, const std::vector<std::uint64_t>& seeds,
                                   const AblationSink& sink = nullptr);

void write_comparison_csv(const std::string& path, const ComparisonTable& table);

double mean_of(const std::vector<double>& xs);
std::optional<double> sample_stddev(const std::vector<double>& xs);

}  // namespace cadaft

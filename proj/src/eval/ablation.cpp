#include "eval/ablation.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "core/error.hpp"

namespace cadaft {

double mean_of(const std::vector<double>& xs) {
  double acc = 0.0;
  for (double x : xs) acc += x;
  return acc / static_cast<double>(xs.size());
}

std::optional<double> sample_stddev(const std::vector<double>& xs) {
  if (xs.size() < 2) return std::nullopt;
  const double m = mean_of(xs);
  double acc = 0.0;
  for (double x : xs) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

ComparisonTable run_ablation_suite(const ModelDims& dims, const TrainConfig& base,
                                   const SplitSet& data, const std::vector<std::uint64_t>& seeds,
                                   const AblationSink& sink) {
  if (seeds.empty()) throw ContractViolation("run_ablation_suite: need at least one seed");
  const std::vector<Ablation> ablations = {Ablation::erm_only, Ablation::no_confounder,
                                           Ablation::full};
  ComparisonTable table;
  for (Ablation ab : ablations) {
    std::vector<double> ids, oods;
    for (std::uint64_t seed : seeds) {
      TrainConfig cfg = base;
      cfg.ablation = ab;
      cfg.seed = seed;
      TrainResult result = [&] {
        try {
          return train(dims, cfg, data);
        } catch (const Error& e) {
          throw Error("ablation " + ablation_to_string(ab) + " seed " + std::to_string(seed) +
                      ": " + e.what());
        }
      }();
      if (result.history.records.empty()) {
        throw Error("ablation " + ablation_to_string(ab) + " seed " + std::to_string(seed) +
                    ": no evaluation records");
      }
      const MetricsRecord& last = result.history.records.back();
      table.rows.push_back({ablation_to_string(ab), seed, last.task_acc_id, last.task_acc_ood,
                            last.domain_acc});
      ids.push_back(last.task_acc_id);
      oods.push_back(last.task_acc_ood);
      if (sink) sink(AblationRunResult{ablation_to_string(ab), seed, &result});
    }
    table.aggregates.push_back({ablation_to_string(ab), mean_of(ids), mean_of(oods),
                                sample_stddev(ids), sample_stddev(oods)});
  }
  return table;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_comparison_csv(const std::string& path, const ComparisonTable& table) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open comparison table for writing: " + path);
  os << "# cadaft-ablation v1\n";
  os << "ablation,seed,task_acc_id,task_acc_ood,domain_acc\n";
  for (const ComparisonRow& r : table.rows) {
    os << r.ablation << "," << r.seed << "," << fmt(r.acc_id) << "," << fmt(r.acc_ood) << ","
       << fmt(r.domain_acc) << "\n";
  }
  os << "# aggregate\n";
  os << "ablation,mean_id,std_id,mean_ood,std_ood\n";
  for (const ComparisonAggregate& a : table.aggregates) {
    os << a.ablation << "," << fmt(a.mean_id) << ","
       << (a.std_id ? fmt(*a.std_id) : std::string()) << "," << fmt(a.mean_ood) << ","
       << (a.std_ood ? fmt(*a.std_ood) : std::string()) << "\n";
  }
  if (!os) throw IoError("write failed for comparison table: " + path);
}

}  // namespace cadaft

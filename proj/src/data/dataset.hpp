#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace cadaft {

/// One example: features x, optional task label y, domain indicator, and an
/// optional value per confounder.
struct Instance {
  std::vector<double> x;
  std::optional<int> y;
  int domain = 0;
  std::vector<std::optional<int>> t;
  std::string split;
};

/// The five benchmark splits every run consumes. target_fewshot rows carry
/// labels and confounder annotations but live in a pool disjoint from
/// ood_test.
struct SplitSet {
  std::vector<Instance> source_train;
  std::vector<Instance> id_test;
  std::vector<Instance> target_unlabeled;
  std::vector<Instance> target_fewshot;
  std::vector<Instance> ood_test;

  static const std::vector<std::string>& names();
  std::vector<Instance>& by_name(const std::string& name);
  const std::vector<Instance>& by_name(const std::string& name) const;
};

std::string split_file_name(const std::string& split);  // "source_train" -> "source-train.jsonl"

/// Line-delimited dataset file: a header object carrying the generator echo
/// and format version, then one record per line with fixed field order
/// {x, y, s, t, split}.
void write_dataset(const std::string& path, const nlohmann::ordered_json& header_echo,
                   const std::vector<Instance>& instances);

struct DatasetFile {
  nlohmann::ordered_json header;
  std::vector<Instance> instances;
};

DatasetFile read_dataset(const std::string& path);

std::size_t feature_width(const std::vector<Instance>& instances);

}  // namespace cadaft

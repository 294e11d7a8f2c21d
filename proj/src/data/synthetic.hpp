#pragma once

#include <cstdint>
#include <vector>

#include "data/dataset.hpp"
#include "json.hpp"

namespace cadaft {

/// Numeric flipped-confounder benchmark. Features are one class-driven core
/// block followed by one confounder-driven block per confounder; each block
/// is a fixed unit direction per value, scaled by mu (core) or nu
/// (confounders), plus isotropic Gaussian noise. Per domain, a confounder
/// agrees with the label with probability rho[domain]. Domains 0..S-1 feed
/// the source splits, domain S the target splits.
struct SyntheticSpec {
  std::size_t d_core = 4;
  std::size_t d_conf = 4;  // per confounder
  std::size_t classes = 2;
  std::size_t domains = 2;
  std::size_t confounders = 1;
  std::vector<std::size_t> conf_arity;  // defaults to `classes` per confounder
  std::vector<double> rho;              // per domain; defaults to 0.95 / ... / 0.05
  double mu = 2.0;
  double nu = 3.0;
  double sigma = 1.0;
  std::size_t n_source_train = 4000;
  std::size_t n_id_test = 1000;
  std::size_t n_target_unlabeled = 4000;
  std::size_t n_target_fewshot = 256;
  std::size_t n_ood_test = 1000;

  std::vector<std::size_t> arities() const;
  std::vector<double> rhos() const;
  std::size_t feature_dim() const { return d_core + confounders * d_conf; }
  void validate() const;  // throws ConfigError naming the field
  nlohmann::ordered_json echo() const;
};

SplitSet generate_numeric(const SyntheticSpec& spec, std::uint64_t seed);

/// Unit mean direction for one value of a block (deterministic, no rng).
std::vector<double> block_direction(std::size_t value, std::size_t arity, std::size_t dim);

}  // namespace cadaft

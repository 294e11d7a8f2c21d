#pragma once

#include <cstdint>
#include <vector>

#include "core/tensor.hpp"

namespace cadaft {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;  // decoupled: applied to the parameter directly
};

/// Adam with decoupled weight decay over a fixed parameter group. step()
/// requires a populated gradient on every parameter in the group, updates
/// only those parameters, and clears their gradients afterwards.
class Adam {
 public:
  Adam(std::vector<Tensor*> params, AdamConfig cfg);

  void step();
  void zero_grad();

  std::uint64_t steps() const { return t_; }
  const AdamConfig& config() const { return cfg_; }

 private:
  std::vector<Tensor*> params_;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
  AdamConfig cfg_;
  std::uint64_t t_ = 0;
};

}  // namespace cadaft

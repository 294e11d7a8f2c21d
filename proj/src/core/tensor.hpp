#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cadaft {

/// Dense row-major tensor of 64-bit floats with an optional gradient slot.
/// Invariants: product(shape) == values.size(); grad is empty or the same
/// length as values.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> values;
  std::vector<double> grad;

  Tensor() = default;
  Tensor(std::vector<std::size_t> shape_in, std::vector<double> values_in);

  static Tensor zeros(std::vector<std::size_t> shape_in);
  static Tensor scalar(double v);
  static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> values_in);

  std::size_t numel() const { return values.size(); }
  std::size_t rank() const { return shape.size(); }
  bool is_scalar() const { return numel() == 1; }

  // Rank <= 2 views: a vector is one row, a scalar is 1x1.
  std::size_t rows() const;
  std::size_t cols() const;
  double at(std::size_t r, std::size_t c) const { return values[r * cols() + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols() + c]; }

  bool has_grad() const { return !grad.empty(); }
  void ensure_grad();  // allocate zero-filled grad if absent
  void zero_grad();    // allocate if needed and fill with zeros
  bool all_finite() const;
};

std::string shape_str(const std::vector<std::size_t>& shape);
std::size_t shape_numel(const std::vector<std::size_t>& shape);

// Plain (untaped) numeric kernels shared by the tape and the fast
// evaluation paths.
Tensor matmul_value(const Tensor& a, const Tensor& b);
Tensor softmax_value(const Tensor& logits);
Tensor log_softmax_value(const Tensor& logits);
std::size_t argmax_row(const Tensor& t, std::size_t row);  // ties -> lowest index

}  // namespace cadaft

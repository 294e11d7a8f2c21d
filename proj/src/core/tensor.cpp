#include "core/tensor.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace cadaft {

std::string shape_str(const std::vector<std::size_t>& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += "x";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

std::size_t shape_numel(const std::vector<std::size_t>& shape) {
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

Tensor::Tensor(std::vector<std::size_t> shape_in, std::vector<double> values_in)
    : shape(std::move(shape_in)), values(std::move(values_in)) {
  if (shape.empty()) throw ShapeError("tensor shape must have at least one axis");
  for (std::size_t d : shape) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape));
  }
  if (shape_numel(shape) != values.size()) {
    throw ShapeError("shape " + shape_str(shape) + " expects " +
                     std::to_string(shape_numel(shape)) + " values, got " +
                     std::to_string(values.size()));
  }
}

Tensor Tensor::zeros(std::vector<std::size_t> shape_in) {
  const std::size_t n = shape_numel(shape_in);
  return Tensor(std::move(shape_in), std::vector<double>(n, 0.0));
}

Tensor Tensor::scalar(double v) { return Tensor({1}, {v}); }

Tensor Tensor::matrix(std::size_t rows, std::size_t cols, std::vector<double> values_in) {
  return Tensor({rows, cols}, std::move(values_in));
}

std::size_t Tensor::rows() const {
  if (rank() > 2) throw ShapeError("rows() requires rank <= 2, got " + shape_str(shape));
  return rank() == 2 ? shape[0] : 1;
}

std::size_t Tensor::cols() const {
  if (rank() > 2) throw ShapeError("cols() requires rank <= 2, got " + shape_str(shape));
  return shape.back();
}

void Tensor::ensure_grad() {
  if (grad.empty()) grad.assign(values.size(), 0.0);
}

void Tensor::zero_grad() { grad.assign(values.size(), 0.0); }

bool Tensor::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

Tensor matmul_value(const Tensor& a, const Tensor& b) {
  if (a.rank() != 2 || b.rank() != 2) {
    throw ShapeError("matmul requires two matrices, got " + shape_str(a.shape) + " and " +
                     shape_str(b.shape));
  }
  if (a.shape[1] != b.shape[0]) {
    throw ShapeError("matmul inner dimensions differ: " + shape_str(a.shape) + " x " +
                     shape_str(b.shape));
  }
  const std::size_t m = a.shape[0], k = a.shape[1], n = b.shape[1];
  Tensor out = Tensor::zeros({m, n});
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = a.values[i * k + p];
      if (av == 0.0) continue;
      for (std::size_t j = 0; j < n; ++j) {
        out.values[i * n + j] += av * b.values[p * n + j];
      }
    }
  }
  return out;
}

// Row-wise stable softmax over the last axis.
Tensor softmax_value(const Tensor& logits) {
  if (logits.rank() > 2) throw ShapeError("softmax requires rank <= 2, got " + shape_str(logits.shape));
  const std::size_t rows = logits.rows(), cols = logits.cols();
  Tensor out = logits;
  for (std::size_t r = 0; r < rows; ++r) {
    double mx = out.values[r * cols];
    for (std::size_t c = 1; c < cols; ++c) mx = std::max(mx, out.values[r * cols + c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < cols; ++c) {
      const double e = std::exp(out.values[r * cols + c] - mx);
      out.values[r * cols + c] = e;
      sum += e;
    }
    for (std::size_t c = 0; c < cols; ++c) out.values[r * cols + c] /= sum;
  }
  return out;
}

Tensor log_softmax_value(const Tensor& logits) {
  if (logits.rank() > 2) throw ShapeError("log_softmax requires rank <= 2, got " + shape_str(logits.shape));
  const std::size_t rows = logits.rows(), cols = logits.cols();
  Tensor out = logits;
  for (std::size_t r = 0; r < rows; ++r) {
    double mx = out.values[r * cols];
    for (std::size_t c = 1; c < cols; ++c) mx = std::max(mx, out.values[r * cols + c]);
    double sum = 0.0;
    for (std::size_t c = 0; c < cols; ++c) sum += std::exp(out.values[r * cols + c] - mx);
    const double lse = mx + std::log(sum);
    for (std::size_t c = 0; c < cols; ++c) out.values[r * cols + c] -= lse;
  }
  return out;
}

std::size_t argmax_row(const Tensor& t, std::size_t row) {
  const std::size_t cols = t.cols();
  std::size_t best = 0;
  double best_v = t.values[row * cols];
  for (std::size_t c = 1; c < cols; ++c) {
    const double v = t.values[row * cols + c];
    if (v > best_v) {
      best_v = v;
      best = c;
    }
  }
  return best;
}

}  // namespace cadaft

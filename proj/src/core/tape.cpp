#include "core/tape.hpp"

#include <cmath>
#include <utility>

#include "core/error.hpp"

namespace cadaft {

namespace {

struct Dims2 {
  std::size_t r, c;
};

Dims2 as2d(const Tensor& t) {
  if (t.rank() > 2) throw ShapeError("elementwise ops require rank <= 2, got " + shape_str(t.shape));
  return {t.rows(), t.cols()};
}

// Result extents for equal shapes or broadcast of a length-1 axis.
Dims2 broadcast_dims(const Tensor& a, const Tensor& b, const char* op) {
  const Dims2 da = as2d(a), db = as2d(b);
  if ((da.r != db.r && da.r != 1 && db.r != 1) || (da.c != db.c && da.c != 1 && db.c != 1)) {
    throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a.shape) + " and " +
                     shape_str(b.shape));
  }
  return {std::max(da.r, db.r), std::max(da.c, db.c)};
}

std::vector<std::size_t> result_shape(const Tensor& a, const Tensor& b, Dims2 out) {
  if (a.rank() == 2 || b.rank() == 2) return {out.r, out.c};
  return {out.c};
}

inline std::size_t map_index(Dims2 d, std::size_t i, std::size_t j) {
  return (d.r == 1 ? 0 : i) * d.c + (d.c == 1 ? 0 : j);
}

}  // namespace

Tape::Var Tape::push(Tensor value, std::function<void(Tape&)> back, Tensor* bound) {
  nodes_.push_back(Node{std::move(value), Tensor{}, std::move(back), bound});
  return Var{static_cast<int>(nodes_.size()) - 1};
}

void Tape::check(Var v, const char* op) const {
  if (!v.valid() || static_cast<std::size_t>(v.id) >= nodes_.size()) {
    throw ContractViolation(std::string(op) + ": variable does not belong to this tape");
  }
}

Tape::Var Tape::leaf(Tensor& param) {
  const auto it = leaf_ids_.find(&param);
  if (it != leaf_ids_.end()) return Var{it->second};
  const Var v = push(param, nullptr, &param);
  leaf_ids_.emplace(&param, v.id);
  return v;
}

Tape::Var Tape::input(Tensor value) { return push(std::move(value)); }

const Tensor& Tape::value(Var v) const {
  check(v, "value");
  return nodes_[static_cast<std::size_t>(v.id)].value;
}

Tape::Var Tape::matmul(Var a, Var b) {
  check(a, "matmul");
  check(b, "matmul");
  Tensor out = matmul_value(val(a.id), val(b.id));
  const int ia = a.id, ib = b.id;
  return push(std::move(out), [ia, ib, self = static_cast<int>(nodes_.size())](Tape& t) {
    const Tensor& up = t.grd(self);
    const Tensor& av = t.val(ia);
    const Tensor& bv = t.val(ib);
    Tensor& ga = t.grd(ia);
    Tensor& gb = t.grd(ib);
    const std::size_t m = av.shape[0], k = av.shape[1], n = bv.shape[1];
    // dA += dC * B^T ; dB += A^T * dC
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t p = 0; p < k; ++p) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += up.values[i * n + j] * bv.values[p * n + j];
        ga.values[i * k + p] += acc;
      }
    }
    for (std::size_t p = 0; p < k; ++p) {
      for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t i = 0; i < m; ++i) acc += av.values[i * k + p] * up.values[i * n + j];
        gb.values[p * n + j] += acc;
      }
    }
  });
}

Tape::Var Tape::binary(Var a, Var b, const char* name, double (*fwd)(double, double),
                       void (*bwd)(double, double, double, double&, double&)) {
  check(a, name);
  check(b, name);
  const Tensor& av = val(a.id);
  const Tensor& bv = val(b.id);
  const Dims2 out = broadcast_dims(av, bv, name);
  const Dims2 da = as2d(av), db = as2d(bv);
  Tensor res = Tensor::zeros(result_shape(av, bv, out));
  for (std::size_t i = 0; i < out.r; ++i) {
    for (std::size_t j = 0; j < out.c; ++j) {
      res.values[i * out.c + j] =
          fwd(av.values[map_index(da, i, j)], bv.values[map_index(db, i, j)]);
    }
  }
  const int ia = a.id, ib = b.id;
  return push(std::move(res), [ia, ib, out, da, db, bwd, self = static_cast<int>(nodes_.size())](Tape& t) {
    const Tensor& up = t.grd(self);
    const Tensor& av2 = t.val(ia);
    const Tensor& bv2 = t.val(ib);
    Tensor& ga = t.grd(ia);
    Tensor& gb = t.grd(ib);
    for (std::size_t i = 0; i < out.r; ++i) {
      for (std::size_t j = 0; j < out.c; ++j) {
        const std::size_t sa = map_index(da, i, j), sb = map_index(db, i, j);
        bwd(up.values[i * out.c + j], av2.values[sa], bv2.values[sb], ga.values[sa],
            gb.values[sb]);
      }
    }
  });
}

Tape::Var Tape::add(Var a, Var b) {
  return binary(
      a, b, "add", [](double x, double y) { return x + y; },
      [](double up, double, double, double& ga, double& gb) {
        ga += up;
        gb += up;
      });
}

Tape::Var Tape::sub(Var a, Var b) {
  return binary(
      a, b, "sub", [](double x, double y) { return x - y; },
      [](double up, double, double, double& ga, double& gb) {
        ga += up;
        gb -= up;
      });
}

Tape::Var Tape::mul(Var a, Var b) {
  return binary(
      a, b, "mul", [](double x, double y) { return x * y; },
      [](double up, double x, double y, double& ga, double& gb) {
        ga += up * y;
        gb += up * x;
      });
}

Tape::Var Tape::unary(Var a, double (*fwd)(double), double (*bwd)(double, double, double)) {
  check(a, "unary");
  const Tensor& av = val(a.id);
  Tensor res = av;
  for (double& v : res.values) v = fwd(v);
  const int ia = a.id;
  return push(std::move(res), [ia, bwd, self = static_cast<int>(nodes_.size())](Tape& t) {
    const Tensor& up = t.grd(self);
    const Tensor& x = t.val(ia);
    const Tensor& y = t.val(self);
    Tensor& ga = t.grd(ia);
    for (std::size_t i = 0; i < up.values.size(); ++i) {
      ga.values[i] += bwd(up.values[i], x.values[i], y.values[i]);
    }
  });
}

Tape::Var Tape::relu(Var a) {
  return unary(
      a, [](double x) { return x > 0.0 ? x : 0.0; },
      [](double up, double x, double) { return x > 0.0 ? up : 0.0; });
}

Tape::Var Tape::tanh(Var a) {
  return unary(
      a, [](double x) { return std::tanh(x); },
      [](double up, double, double y) { return up * (1.0 - y * y); });
}

Tape::Var Tape::sigmoid(Var a) {
  return unary(
      a,
      [](double x) {
        // Stable in both tails.
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double up, double, double y) { return up * y * (1.0 - y); });
}

Tape::Var Tape::log(Var a) {
  check(a, "log");
  for (double v : val(a.id).values) {
    if (!(v > 0.0)) {
      throw DomainError("log of non-positive value " + std::to_string(v));
    }
  }
  return unary(
      a, [](double x) { return std::log(x); },
      [](double up, double x, double) { return up / x; });
}

Tape::Var Tape::softmax(Var a) {
  check(a, "softmax");
  Tensor res = softmax_value(val(a.id));
  const int ia = a.id;
  return push(std::move(res), [ia, self = static_cast<int>(nodes_.size())](Tape& t) {
    const Tensor& up = t.grd(self);
    const Tensor& y = t.val(self);
    Tensor& ga = t.grd(ia);
    const std::size_t rows = y.rows(), cols = y.cols();
    for (std::size_t r = 0; r < rows; ++r) {
      double dot = 0.0;
      for (std::size_t c = 0; c < cols; ++c) {
        dot += up.values[r * cols + c] * y.values[r * cols + c];
      }
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t i = r * cols + c;
        ga.values[i] += y.values[i] * (up.values[i] - dot);
      }
    }
  });
}

Tape::Var Tape::log_softmax(Var a) {
  check(a, "log_softmax");
  Tensor res = log_softmax_value(val(a.id));
  const int ia = a.id;
  return push(std::move(res), [ia, self = static_cast<int>(nodes_.size())](Tape& t) {
    const Tensor& up = t.grd(self);
    const Tensor& y = t.val(self);  // log-probabilities
    Tensor& ga = t.grd(ia);
    const std::size_t rows = y.rows(), cols = y.cols();
    for (std::size_t r = 0; r < rows; ++r) {
      double total = 0.0;
      for (std::size_t c = 0; c < cols; ++c) total += up.values[r * cols + c];
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t i = r * cols + c;
        ga.values[i] += up.values[i] - std::exp(y.values[i]) * total;
      }
    }
  });
}

Tape::Var Tape::sum(Var a) {
  check(a, "sum");
  double acc = 0.0;
  for (double v : val(a.id).values) acc += v;
  const int ia = a.id;
  return push(Tensor::scalar(acc), [ia, self = static_cast<int>(nodes_.size())](Tape& t) {
    const double up = t.grd(self).values[0];
    Tensor& ga = t.grd(ia);
    for (double& g : ga.values) g += up;
  });
}

Tape::Var Tape::scale(Var a, double factor) {
  check(a, "scale");
  Tensor res = val(a.id);
  for (double& v : res.values) v *= factor;
  const int ia = a.id;
  return push(std::move(res), [ia, factor, self = static_cast<int>(nodes_.size())](Tape& t) {
    const Tensor& up = t.grd(self);
    Tensor& ga = t.grd(ia);
    for (std::size_t i = 0; i < up.values.size(); ++i) ga.values[i] += factor * up.values[i];
  });
}

void Tape::backward(Var loss) {
  check(loss, "backward");
  const Tensor& lv = val(loss.id);
  if (!lv.is_scalar()) {
    throw ShapeError("backward requires a scalar loss, got " + shape_str(lv.shape));
  }
  for (Node& n : nodes_) {
    n.grad.shape = n.value.shape;
    n.grad.values.assign(n.value.values.size(), 0.0);
  }
  nodes_[static_cast<std::size_t>(loss.id)].grad.values[0] = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    if (nodes_[i].back) nodes_[i].back(*this);
  }
  for (Node& n : nodes_) {
    if (!n.bound) continue;
    n.bound->ensure_grad();
    for (std::size_t i = 0; i < n.grad.values.size(); ++i) {
      n.bound->grad[i] += n.grad.values[i];
    }
  }
}

}  // namespace cadaft

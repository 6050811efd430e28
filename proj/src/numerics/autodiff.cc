// Copyright 2026 The AVENet Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "numerics/autodiff.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <unordered_set>

#include "common/error.h"

namespace avenet::nn {
namespace {

thread_local bool g_grad_disabled = false;

std::string shape_str(std::size_t r, std::size_t c) {
  return std::to_string(r) + "x" + std::to_string(c);
}

template <typename T>
[[noreturn]] void shape_error(const char* op, const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  fail(ErrorKind::kShape, std::string(op) + ": incompatible shapes " +
                              shape_str(a.rows(), a.cols()) + " and " +
                              shape_str(b.rows(), b.cols()));
}

template <typename T>
Var<T> make_node(BasicMatrix<T> value, const char* op, std::vector<Var<T>> parents,
                 std::function<void(Node<T>&)> rule) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  node->op = op;
  bool needs_grad = false;
  if (!g_grad_disabled) {
    for (const auto& p : parents) needs_grad = needs_grad || p->requires_grad;
  }
  if (needs_grad) {
    node->requires_grad = true;
    node->grad = BasicMatrix<T>(node->value.rows(), node->value.cols());
    node->parents = std::move(parents);
    node->backward_rule = std::move(rule);
  }
  return node;
}

// Broadcast kinds for binary elementwise ops.
enum class Broadcast { kNone, kRow };

template <typename T>
Broadcast check_binary(const char* op, const BasicMatrix<T>& a, const BasicMatrix<T>& b) {
  if (a.same_shape(b)) return Broadcast::kNone;
  if (b.rows() == 1 && b.cols() == a.cols()) return Broadcast::kRow;
  shape_error(op, a, b);
}

template <typename T>
using ArrayMap = Eigen::Map<Eigen::Array<T, Eigen::Dynamic, 1>>;
template <typename T>
using ConstArrayMap = Eigen::Map<const Eigen::Array<T, Eigen::Dynamic, 1>>;

template <typename T>
ConstArrayMap<T> as_array(const BasicMatrix<T>& m) {
  return ConstArrayMap<T>(m.ptr(), static_cast<Eigen::Index>(m.size()));
}
template <typename T>
ArrayMap<T> as_array(BasicMatrix<T>& m) {
  return ArrayMap<T>(m.ptr(), static_cast<Eigen::Index>(m.size()));
}

constexpr double kGeluK = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluC = 0.044715;

}  // namespace

NoGradGuard::NoGradGuard() : previous_(g_grad_disabled) { g_grad_disabled = true; }
NoGradGuard::~NoGradGuard() { g_grad_disabled = previous_; }

template <typename T>
Var<T> constant(BasicMatrix<T> value) {
  auto node = std::make_shared<Node<T>>();
  node->value = std::move(value);
  node->op = "constant";
  return node;
}

template <typename T>
Var<T> parameter(BasicMatrix<T> value) {
  auto node = std::make_shared<Node<T>>();
  node->grad = BasicMatrix<T>(value.rows(), value.cols());
  node->value = std::move(value);
  node->op = "parameter";
  node->requires_grad = true;
  return node;
}

template <typename T>
Var<T> matmul(const Var<T>& a, const Var<T>& b) {
  if (a->value.cols() != b->value.rows()) shape_error("matmul", a->value, b->value);
  BasicMatrix<T> out(a->value.rows(), b->value.cols());
  gemm_acc(a->value, b->value, out);
  return make_node<T>(std::move(out), "matmul", {a, b}, [](Node<T>& n) {
    auto& pa = *n.parents[0];
    auto& pb = *n.parents[1];
    if (pa.requires_grad) gemm_nt_acc(n.grad, pb.value, pa.grad);
    if (pb.requires_grad) gemm_tn_acc(pa.value, n.grad, pb.grad);
  });
}

template <typename T>
Var<T> matmul_nt(const Var<T>& a, const Var<T>& b) {
  if (a->value.cols() != b->value.cols()) shape_error("matmul_nt", a->value, b->value);
  BasicMatrix<T> out(a->value.rows(), b->value.rows());
  gemm_nt_acc(a->value, b->value, out);
  return make_node<T>(std::move(out), "matmul_nt", {a, b}, [](Node<T>& n) {
    auto& pa = *n.parents[0];
    auto& pb = *n.parents[1];
    if (pa.requires_grad) gemm_acc(n.grad, pb.value, pa.grad);
    if (pb.requires_grad) gemm_tn_acc(n.grad, pa.value, pb.grad);
  });
}

namespace {

// Shared implementation of add/sub: out = a + sign * b.
template <typename T>
Var<T> add_signed(const Var<T>& a, const Var<T>& b, T sign, const char* op) {
  const Broadcast bc = check_binary(op, a->value, b->value);
  BasicMatrix<T> out = a->value;
  if (bc == Broadcast::kNone) {
    as_array(out) += sign * as_array(b->value);
  } else {
    auto bias = b->value.row(0);
    for (std::size_t r = 0; r < out.rows(); ++r) {
      auto dst = out.row(r);
      for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += sign * bias[c];
    }
  }
  return make_node<T>(std::move(out), op, {a, b}, [bc, sign](Node<T>& n) {
    auto& pa = *n.parents[0];
    auto& pb = *n.parents[1];
    if (pa.requires_grad) as_array(pa.grad) += as_array(n.grad);
    if (!pb.requires_grad) return;
    if (bc == Broadcast::kNone) {
      as_array(pb.grad) += sign * as_array(n.grad);
    } else {
      auto dst = pb.grad.row(0);
      for (std::size_t r = 0; r < n.grad.rows(); ++r) {
        auto g = n.grad.row(r);
        for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += sign * g[c];
      }
    }
  });
}

}  // namespace

template <typename T>
Var<T> add(const Var<T>& a, const Var<T>& b) {
  return add_signed(a, b, T(1), "add");
}

template <typename T>
Var<T> sub(const Var<T>& a, const Var<T>& b) {
  return add_signed(a, b, T(-1), "sub");
}

template <typename T>
Var<T> mul(const Var<T>& a, const Var<T>& b) {
  const Broadcast bc = check_binary("mul", a->value, b->value);
  BasicMatrix<T> out = a->value;
  const std::size_t cols = out.cols();
  if (bc == Broadcast::kNone) {
    as_array(out) *= as_array(b->value);
  } else {
    for (std::size_t r = 0; r < out.rows(); ++r) {
      auto dst = out.row(r);
      for (std::size_t c = 0; c < cols; ++c) dst[c] *= b->value[c];
    }
  }
  return make_node<T>(std::move(out), "mul", {a, b}, [bc](Node<T>& n) {
    auto& pa = *n.parents[0];
    auto& pb = *n.parents[1];
    if (bc == Broadcast::kNone) {
      if (pa.requires_grad) as_array(pa.grad) += as_array(n.grad) * as_array(pb.value);
      if (pb.requires_grad) as_array(pb.grad) += as_array(n.grad) * as_array(pa.value);
      return;
    }
    const std::size_t cols = n.grad.cols();
    for (std::size_t r = 0; r < n.grad.rows(); ++r) {
      auto g = n.grad.row(r);
      for (std::size_t c = 0; c < cols; ++c) {
        if (pa.requires_grad) pa.grad(r, c) += g[c] * pb.value[c];
        if (pb.requires_grad) pb.grad[c] += g[c] * pa.value(r, c);
      }
    }
  });
}

template <typename T>
Var<T> scale(const Var<T>& a, double factor) {
  BasicMatrix<T> out = a->value;
  const T f = static_cast<T>(factor);
  as_array(out) *= f;
  return make_node<T>(std::move(out), "scale", {a}, [f](Node<T>& n) {
    as_array(n.parents[0]->grad) += f * as_array(n.grad);
  });
}

// Tanh-approximated GELU. The tanh values are kept for the backward pass.
template <typename T>
Var<T> gelu(const Var<T>& a) {
  const auto x = as_array(a->value);
  BasicMatrix<T> th(a->value.rows(), a->value.cols());
  as_array(th) = (T(kGeluK) * (x + T(kGeluC) * x * x * x)).tanh();
  BasicMatrix<T> out(a->value.rows(), a->value.cols());
  as_array(out) = T(0.5) * x * (T(1) + as_array(th));
  return make_node<T>(std::move(out), "gelu", {a}, [th = std::move(th)](Node<T>& n) {
    auto& pa = *n.parents[0];
    const auto x = as_array(pa.value);
    const auto t = as_array(th);
    as_array(pa.grad) +=
        as_array(n.grad) * (T(0.5) * (T(1) + t) + T(0.5) * x * (T(1) - t * t) * T(kGeluK) *
                                                      (T(1) + T(3 * kGeluC) * x * x));
  });
}

template <typename T>
Var<T> relu(const Var<T>& a) {
  BasicMatrix<T> out = a->value;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = out[i] > T(0) ? out[i] : T(0);
  return make_node<T>(std::move(out), "relu", {a}, [](Node<T>& n) {
    auto& pa = *n.parents[0];
    for (std::size_t i = 0; i < n.grad.size(); ++i) {
      if (pa.value[i] > T(0)) pa.grad[i] += n.grad[i];
    }
  });
}

template <typename T>
Var<T> layer_norm(const Var<T>& a, const Var<T>& gain, const Var<T>& bias, double eps) {
  if (!(eps > 0.0)) fail(ErrorKind::kConfig, "layer_norm: eps must be positive");
  const std::size_t rows = a->value.rows();
  const std::size_t cols = a->value.cols();
  if (gain->value.rows() != 1 || gain->value.cols() != cols) shape_error("layer_norm", a->value, gain->value);
  if (bias->value.rows() != 1 || bias->value.cols() != cols) shape_error("layer_norm", a->value, bias->value);

  BasicMatrix<T> normed(rows, cols);
  std::vector<T> inv_std(rows);
  BasicMatrix<T> out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    auto x = a->value.row(r);
    double mean = 0.0;
    for (T v : x) mean += v;
    mean /= static_cast<double>(cols);
    double var = 0.0;
    for (T v : x) var += (v - mean) * (v - mean);
    var /= static_cast<double>(cols);
    const double is = 1.0 / std::sqrt(var + eps);
    inv_std[r] = static_cast<T>(is);
    for (std::size_t c = 0; c < cols; ++c) {
      const T xh = static_cast<T>((x[c] - mean) * is);
      normed(r, c) = xh;
      out(r, c) = xh * gain->value[c] + bias->value[c];
    }
  }
  return make_node<T>(
      std::move(out), "layer_norm", {a, gain, bias},
      [normed = std::move(normed), inv_std = std::move(inv_std)](Node<T>& n) {
        auto& pa = *n.parents[0];
        auto& pg = *n.parents[1];
        auto& pb = *n.parents[2];
        const std::size_t rows = n.grad.rows();
        const std::size_t cols = n.grad.cols();
        std::vector<double> dxh(cols);
        for (std::size_t r = 0; r < rows; ++r) {
          double mean_dxh = 0.0;
          double mean_dxh_xh = 0.0;
          for (std::size_t c = 0; c < cols; ++c) {
            const T g = n.grad(r, c);
            if (pg.requires_grad) pg.grad[c] += g * normed(r, c);
            if (pb.requires_grad) pb.grad[c] += g;
            dxh[c] = static_cast<double>(g) * pg.value[c];
            mean_dxh += dxh[c];
            mean_dxh_xh += dxh[c] * normed(r, c);
          }
          if (!pa.requires_grad) continue;
          mean_dxh /= static_cast<double>(cols);
          mean_dxh_xh /= static_cast<double>(cols);
          for (std::size_t c = 0; c < cols; ++c) {
            pa.grad(r, c) += static_cast<T>(
                inv_std[r] * (dxh[c] - mean_dxh - normed(r, c) * mean_dxh_xh));
          }
        }
      });
}

template <typename T>
Var<T> softmax_rows(const Var<T>& a) {
  BasicMatrix<T> out(a->value.rows(), a->value.cols());
  const auto cols = static_cast<Eigen::Index>(a->value.cols());
  for (std::size_t r = 0; r < out.rows(); ++r) {
    ConstArrayMap<T> x(a->value.row(r).data(), cols);
    ArrayMap<T> y(out.row(r).data(), cols);
    y = (x - x.maxCoeff()).exp();
    y /= y.sum();
  }
  return make_node<T>(std::move(out), "softmax_rows", {a}, [](Node<T>& n) {
    auto& pa = *n.parents[0];
    const auto cols = static_cast<Eigen::Index>(n.value.cols());
    for (std::size_t r = 0; r < n.value.rows(); ++r) {
      ConstArrayMap<T> y(n.value.row(r).data(), cols);
      ConstArrayMap<T> g(n.grad.row(r).data(), cols);
      ArrayMap<T> dx(pa.grad.row(r).data(), cols);
      const T dot = (g * y).sum();
      dx += y * (g - dot);
    }
  });
}

template <typename T>
Var<T> depthwise_conv1d(const Var<T>& a, const Var<T>& kernels, std::size_t kernel_width,
                        std::span<const Segment> segments) {
  if (kernel_width % 2 == 0) {
    fail(ErrorKind::kConfig, "depthwise_conv1d: kernel width must be odd, got " +
                                 std::to_string(kernel_width));
  }
  const std::size_t rows = a->value.rows();
  const std::size_t cols = a->value.cols();
  if (kernels->value.rows() != kernel_width || kernels->value.cols() != cols) {
    shape_error("depthwise_conv1d", a->value, kernels->value);
  }
  std::vector<Segment> segs(segments.begin(), segments.end());
  if (segs.empty()) segs.push_back({0, rows});
  std::size_t covered = 0;
  for (const auto& s : segs) {
    if (s.begin != covered) fail(ErrorKind::kShape, "depthwise_conv1d: segments must tile the rows");
    covered += s.length;
  }
  if (covered != rows) fail(ErrorKind::kShape, "depthwise_conv1d: segments must tile the rows");

  const auto half = static_cast<std::ptrdiff_t>(kernel_width / 2);
  BasicMatrix<T> out(rows, cols);
  for (const auto& s : segs) {
    const auto len = static_cast<std::ptrdiff_t>(s.length);
    for (std::ptrdiff_t t = 0; t < len; ++t) {
      auto y = out.row(s.begin + t);
      for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(kernel_width); ++k) {
        const std::ptrdiff_t src = t + k - half;
        if (src < 0 || src >= len) continue;
        auto x = a->value.row(s.begin + src);
        auto w = kernels->value.row(k);
        for (std::size_t c = 0; c < cols; ++c) y[c] += w[c] * x[c];
      }
    }
  }
  return make_node<T>(
      std::move(out), "depthwise_conv1d", {a, kernels},
      [segs = std::move(segs), half, kernel_width](Node<T>& n) {
        auto& pa = *n.parents[0];
        auto& pk = *n.parents[1];
        const std::size_t cols = n.grad.cols();
        for (const auto& s : segs) {
          const auto len = static_cast<std::ptrdiff_t>(s.length);
          for (std::ptrdiff_t t = 0; t < len; ++t) {
            auto g = n.grad.row(s.begin + t);
            for (std::ptrdiff_t k = 0; k < static_cast<std::ptrdiff_t>(kernel_width); ++k) {
              const std::ptrdiff_t src = t + k - half;
              if (src < 0 || src >= len) continue;
              if (pa.requires_grad) {
                auto w = pk.value.row(k);
                auto dx = pa.grad.row(s.begin + src);
                for (std::size_t c = 0; c < cols; ++c) dx[c] += w[c] * g[c];
              }
              if (pk.requires_grad) {
                auto x = pa.value.row(s.begin + src);
                auto dw = pk.grad.row(k);
                for (std::size_t c = 0; c < cols; ++c) dw[c] += x[c] * g[c];
              }
            }
          }
        }
      });
}

template <typename T>
Var<T> l1_loss(const Var<T>& a, const Var<T>& b) {
  if (!a->value.same_shape(b->value)) shape_error("l1_loss", a->value, b->value);
  if (a->value.size() == 0) fail(ErrorKind::kShape, "l1_loss: empty operands");
  double total = 0.0;
  for (std::size_t i = 0; i < a->value.size(); ++i) {
    total += std::abs(static_cast<double>(a->value[i]) - static_cast<double>(b->value[i]));
  }
  const double count = static_cast<double>(a->value.size());
  BasicMatrix<T> out(1, 1, static_cast<T>(total / count));
  return make_node<T>(std::move(out), "l1_loss", {a, b}, [count](Node<T>& n) {
    auto& pa = *n.parents[0];
    auto& pb = *n.parents[1];
    const T g = static_cast<T>(static_cast<double>(n.grad[0]) / count);
    for (std::size_t i = 0; i < pa.value.size(); ++i) {
      const T d = pa.value[i] - pb.value[i];
      const T s = d > T(0) ? g : (d < T(0) ? -g : T(0));
      if (pa.requires_grad) pa.grad[i] += s;
      if (pb.requires_grad) pb.grad[i] -= s;
    }
  });
}

template <typename T>
Var<T> l1_loss(const Var<T>& a, const BasicMatrix<T>& target) {
  return l1_loss(a, constant(target));
}

template <typename T>
Var<T> sum(const Var<T>& a) {
  double total = 0.0;
  for (T v : a->value.data()) total += v;
  return make_node<T>(BasicMatrix<T>(1, 1, static_cast<T>(total)), "sum", {a}, [](Node<T>& n) {
    auto& pa = *n.parents[0];
    for (auto& g : pa.grad.data()) g += n.grad[0];
  });
}

template <typename T>
Var<T> cross_entropy(const Var<T>& logits, std::span<const int> labels) {
  const std::size_t rows = logits->value.rows();
  const std::size_t cols = logits->value.cols();
  if (labels.size() != rows) {
    fail(ErrorKind::kShape, "cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                                std::to_string(rows) + " rows");
  }
  if (rows == 0) fail(ErrorKind::kShape, "cross_entropy: empty batch");
  BasicMatrix<T> probs(rows, cols);
  double nll = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    if (labels[r] < 0 || static_cast<std::size_t>(labels[r]) >= cols) {
      fail(ErrorKind::kValidation, "cross_entropy: label out of range");
    }
    auto x = logits->value.row(r);
    const double mx = *std::max_element(x.begin(), x.end());
    double total = 0.0;
    for (T v : x) total += std::exp(v - mx);
    const double log_z = mx + std::log(total);
    for (std::size_t c = 0; c < cols; ++c) probs(r, c) = static_cast<T>(std::exp(x[c] - log_z));
    nll += log_z - x[static_cast<std::size_t>(labels[r])];
  }
  std::vector<int> lab(labels.begin(), labels.end());
  return make_node<T>(BasicMatrix<T>(1, 1, static_cast<T>(nll / static_cast<double>(rows))),
                      "cross_entropy", {logits},
                      [probs = std::move(probs), lab = std::move(lab)](Node<T>& n) {
                        auto& pl = *n.parents[0];
                        const T g = static_cast<T>(n.grad[0] / static_cast<double>(lab.size()));
                        for (std::size_t r = 0; r < lab.size(); ++r) {
                          auto dst = pl.grad.row(r);
                          auto p = probs.row(r);
                          for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += g * p[c];
                          dst[static_cast<std::size_t>(lab[r])] -= g;
                        }
                      });
}

template <typename T>
Var<T> slice_rows(const Var<T>& a, std::size_t begin, std::size_t count) {
  const std::size_t cols = a->value.cols();
  if (begin + count > a->value.rows()) {
    fail(ErrorKind::kShape, "slice_rows: range exceeds " + std::to_string(a->value.rows()) + " rows");
  }
  BasicMatrix<T> out(count, cols);
  std::copy_n(a->value.ptr() + begin * cols, count * cols, out.ptr());
  return make_node<T>(std::move(out), "slice_rows", {a}, [begin](Node<T>& n) {
    auto& pa = *n.parents[0];
    T* dst = pa.grad.ptr() + begin * pa.grad.cols();
    for (std::size_t i = 0; i < n.grad.size(); ++i) dst[i] += n.grad[i];
  });
}

template <typename T>
Var<T> slice_cols(const Var<T>& a, std::size_t begin, std::size_t count) {
  if (begin + count > a->value.cols()) {
    fail(ErrorKind::kShape, "slice_cols: range exceeds " + std::to_string(a->value.cols()) + " columns");
  }
  BasicMatrix<T> out(a->value.rows(), count);
  for (std::size_t r = 0; r < out.rows(); ++r) {
    std::copy_n(a->value.row(r).data() + begin, count, out.row(r).data());
  }
  return make_node<T>(std::move(out), "slice_cols", {a}, [begin](Node<T>& n) {
    auto& pa = *n.parents[0];
    for (std::size_t r = 0; r < n.grad.rows(); ++r) {
      auto src = n.grad.row(r);
      auto dst = pa.grad.row(r);
      for (std::size_t c = 0; c < src.size(); ++c) dst[begin + c] += src[c];
    }
  });
}

template <typename T>
Var<T> concat_rows(std::span<const Var<T>> parts) {
  if (parts.empty()) fail(ErrorKind::kShape, "concat_rows: no inputs");
  std::vector<const BasicMatrix<T>*> values;
  for (const auto& p : parts) values.push_back(&p->value);
  BasicMatrix<T> out = vstack<T>(values);
  return make_node<T>(std::move(out), "concat_rows", {parts.begin(), parts.end()}, [](Node<T>& n) {
    const T* src = n.grad.ptr();
    for (auto& p : n.parents) {
      if (p->requires_grad) {
        for (std::size_t i = 0; i < p->grad.size(); ++i) p->grad[i] += src[i];
      }
      src += p->value.size();
    }
  });
}

template <typename T>
Var<T> concat_cols(std::span<const Var<T>> parts) {
  if (parts.empty()) fail(ErrorKind::kShape, "concat_cols: no inputs");
  const std::size_t rows = parts.front()->value.rows();
  std::size_t cols = 0;
  for (const auto& p : parts) {
    if (p->value.rows() != rows) shape_error("concat_cols", parts.front()->value, p->value);
    cols += p->value.cols();
  }
  BasicMatrix<T> out(rows, cols);
  std::size_t offset = 0;
  for (const auto& p : parts) {
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy_n(p->value.row(r).data(), p->value.cols(), out.row(r).data() + offset);
    }
    offset += p->value.cols();
  }
  return make_node<T>(std::move(out), "concat_cols", {parts.begin(), parts.end()}, [](Node<T>& n) {
    std::size_t offset = 0;
    for (auto& p : n.parents) {
      if (p->requires_grad) {
        for (std::size_t r = 0; r < n.grad.rows(); ++r) {
          auto src = n.grad.row(r);
          auto dst = p->grad.row(r);
          for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[offset + c];
        }
      }
      offset += p->value.cols();
    }
  });
}

template <typename T>
void backward(const Var<T>& loss) {
  if (loss->value.rows() != 1 || loss->value.cols() != 1) {
    fail(ErrorKind::kUsage, "backward: loss must be 1x1, got " +
                                shape_str(loss->value.rows(), loss->value.cols()));
  }
  if (!loss->requires_grad) return;

  // Iterative post-order DFS; `order` ends with the loss.
  std::vector<Node<T>*> order;
  std::unordered_set<Node<T>*> visited;
  std::vector<std::pair<Node<T>*, std::size_t>> stack;
  stack.emplace_back(loss.get(), 0);
  visited.insert(loss.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node<T>* p = node->parents[next++].get();
      if (p->requires_grad && visited.insert(p).second) stack.emplace_back(p, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }
  for (Node<T>* n : order) {
    if (!n->parents.empty()) n->grad.fill(T(0));
  }
  loss->grad[0] += T(1);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if ((*it)->backward_rule) (*it)->backward_rule(**it);
  }
}

template <typename T>
void zero_grad(std::span<const Var<T>> params) {
  for (const auto& p : params) p->grad.fill(T(0));
}

#define AVENET_INSTANTIATE(T)                                                                   \
  template Var<T> constant(BasicMatrix<T>);                                                     \
  template Var<T> parameter(BasicMatrix<T>);                                                    \
  template Var<T> matmul(const Var<T>&, const Var<T>&);                                         \
  template Var<T> matmul_nt(const Var<T>&, const Var<T>&);                                      \
  template Var<T> add(const Var<T>&, const Var<T>&);                                            \
  template Var<T> sub(const Var<T>&, const Var<T>&);                                            \
  template Var<T> mul(const Var<T>&, const Var<T>&);                                            \
  template Var<T> scale(const Var<T>&, double);                                                 \
  template Var<T> gelu(const Var<T>&);                                                          \
  template Var<T> relu(const Var<T>&);                                                          \
  template Var<T> layer_norm(const Var<T>&, const Var<T>&, const Var<T>&, double);              \
  template Var<T> softmax_rows(const Var<T>&);                                                  \
  template Var<T> depthwise_conv1d(const Var<T>&, const Var<T>&, std::size_t,                   \
                                   std::span<const Segment>);                                   \
  template Var<T> l1_loss(const Var<T>&, const Var<T>&);                                        \
  template Var<T> l1_loss(const Var<T>&, const BasicMatrix<T>&);                                \
  template Var<T> sum(const Var<T>&);                                                           \
  template Var<T> cross_entropy(const Var<T>&, std::span<const int>);                           \
  template Var<T> slice_rows(const Var<T>&, std::size_t, std::size_t);                          \
  template Var<T> slice_cols(const Var<T>&, std::size_t, std::size_t);                          \
  template Var<T> concat_rows(std::span<const Var<T>>);                                         \
  template Var<T> concat_cols(std::span<const Var<T>>);                                         \
  template void backward(const Var<T>&);                                                        \
  template void zero_grad(std::span<const Var<T>>);

AVENET_INSTANTIATE(float)
AVENET_INSTANTIATE(double)
#undef AVENET_INSTANTIATE

}  // namespace avenet::nn

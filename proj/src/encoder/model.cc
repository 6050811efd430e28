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

#include "encoder/model.h"

#include <cmath>
#include <string>

#include "common/error.h"
#include "numerics/rng.h"

namespace avenet::encoder {
namespace {

constexpr double kLayerNormEps = 1e-5;

nn::Matrix gaussian(std::size_t rows, std::size_t cols, double stddev, Rng& rng) {
  nn::Matrix m(rows, cols);
  for (auto& v : m.data()) v = static_cast<float>(stddev * rng.normal());
  return m;
}

void add_layer_norm(nn::ParamSet<float>& w, const std::string& prefix, std::size_t dim) {
  w.add(prefix + ".g", nn::Matrix(1, dim, 1.0f));
  w.add(prefix + ".b", nn::Matrix(1, dim));
}

void add_ffn(nn::ParamSet<float>& w, const std::string& prefix, std::size_t dim,
             std::size_t hidden, Rng& rng) {
  add_layer_norm(w, prefix + ".ln", dim);
  w.add(prefix + ".w1", gaussian(dim, hidden, 1.0 / std::sqrt(double(dim)), rng));
  w.add(prefix + ".b1", nn::Matrix(1, hidden));
  w.add(prefix + ".w2", gaussian(hidden, dim, 1.0 / std::sqrt(double(hidden)), rng));
  w.add(prefix + ".b2", nn::Matrix(1, dim));
}

template <typename T>
nn::Var<T> ffn(const nn::ParamSet<T>& w, const std::string& p, const nn::Var<T>& x) {
  auto h = nn::layer_norm(x, w[p + ".ln.g"], w[p + ".ln.b"], kLayerNormEps);
  h = nn::gelu(nn::add(nn::matmul(h, w[p + ".w1"]), w[p + ".b1"]));
  return nn::add(nn::matmul(h, w[p + ".w2"]), w[p + ".b2"]);
}

template <typename T>
nn::Var<T> self_attention(const EncoderConfig& cfg, const nn::ParamSet<T>& w, const std::string& p,
                          const nn::Var<T>& x, std::span<const nn::Segment> segments) {
  auto h = nn::layer_norm(x, w[p + ".ln.g"], w[p + ".ln.b"], kLayerNormEps);
  auto q = nn::matmul(h, w[p + ".wq"]);
  auto k = nn::matmul(h, w[p + ".wk"]);
  auto v = nn::matmul(h, w[p + ".wv"]);
  const std::size_t heads = cfg.attention_heads;
  const std::size_t head_dim = cfg.model_dim / heads;
  const double inv_sqrt = 1.0 / std::sqrt(static_cast<double>(head_dim));

  std::vector<nn::Var<T>> per_segment;
  per_segment.reserve(segments.size());
  for (const auto& seg : segments) {
    auto qs = nn::slice_rows(q, seg.begin, seg.length);
    auto ks = nn::slice_rows(k, seg.begin, seg.length);
    auto vs = nn::slice_rows(v, seg.begin, seg.length);
    std::vector<nn::Var<T>> per_head;
    for (std::size_t hd = 0; hd < heads; ++hd) {
      auto qh = heads == 1 ? qs : nn::slice_cols(qs, hd * head_dim, head_dim);
      auto kh = heads == 1 ? ks : nn::slice_cols(ks, hd * head_dim, head_dim);
      auto vh = heads == 1 ? vs : nn::slice_cols(vs, hd * head_dim, head_dim);
      auto weights = nn::softmax_rows(nn::scale(nn::matmul_nt(qh, kh), inv_sqrt));
      per_head.push_back(nn::matmul(weights, vh));
    }
    per_segment.push_back(heads == 1 ? per_head.front()
                                     : nn::concat_cols(std::span<const nn::Var<T>>(per_head)));
  }
  auto attended = per_segment.size() == 1
                      ? per_segment.front()
                      : nn::concat_rows(std::span<const nn::Var<T>>(per_segment));
  return nn::add(nn::matmul(attended, w[p + ".wo"]), w[p + ".bo"]);
}

template <typename T>
nn::Var<T> conv_module(const EncoderConfig& cfg, const nn::ParamSet<T>& w, const std::string& p,
                       const nn::Var<T>& x, std::span<const nn::Segment> segments) {
  auto h = nn::layer_norm(x, w[p + ".ln.g"], w[p + ".ln.b"], kLayerNormEps);
  h = nn::gelu(nn::depthwise_conv1d(h, w[p + ".kernel"], cfg.conv_kernel_width, segments));
  return nn::add(nn::matmul(h, w[p + ".pw"]), w[p + ".pb"]);
}

}  // namespace

void EncoderConfig::validate() const {
  if (input_dim == 0 || model_dim == 0) fail(ErrorKind::kConfig, "encoder: dimensions must be >= 1");
  if (blocks == 0) fail(ErrorKind::kConfig, "encoder: block count must be >= 1");
  if (attention_heads == 0 || model_dim % attention_heads != 0) {
    fail(ErrorKind::kConfig, "encoder: attention heads must divide the model dimension");
  }
  if (conv_kernel_width % 2 == 0) {
    fail(ErrorKind::kConfig, "encoder: conv kernel width must be odd, got " +
                                 std::to_string(conv_kernel_width));
  }
  if (ffn_expansion == 0) fail(ErrorKind::kConfig, "encoder: ffn expansion must be >= 1");
}

nn::ParamSet<float> make_encoder_weights(const EncoderConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  const std::size_t d = cfg.input_dim;
  const std::size_t h = cfg.model_dim;
  const std::size_t ff = h * cfg.ffn_expansion;
  nn::ParamSet<float> w;
  w.add("in.w", gaussian(d, h, 1.0 / std::sqrt(double(d)), rng));
  w.add("in.b", nn::Matrix(1, h));
  for (std::size_t b = 0; b < cfg.blocks; ++b) {
    const std::string p = "block" + std::to_string(b);
    add_ffn(w, p + ".ff1", h, ff, rng);
    add_layer_norm(w, p + ".att.ln", h);
    for (const char* name : {".att.wq", ".att.wk", ".att.wv", ".att.wo"}) {
      w.add(p + name, gaussian(h, h, 1.0 / std::sqrt(double(h)), rng));
    }
    w.add(p + ".att.bo", nn::Matrix(1, h));
    add_layer_norm(w, p + ".conv.ln", h);
    w.add(p + ".conv.kernel",
          gaussian(cfg.conv_kernel_width, h, 1.0 / std::sqrt(double(cfg.conv_kernel_width)), rng));
    w.add(p + ".conv.pw", gaussian(h, h, 1.0 / std::sqrt(double(h)), rng));
    w.add(p + ".conv.pb", nn::Matrix(1, h));
    add_ffn(w, p + ".ff2", h, ff, rng);
    add_layer_norm(w, p + ".out.ln", h);
  }
  w.add("out.w", nn::Matrix(h, d));
  w.add("out.b", nn::Matrix(1, d));
  return w;
}

EncoderParams EncoderParams::initialize(const EncoderConfig& config) {
  return EncoderParams{config, make_encoder_weights(config)};
}

template <typename T>
nn::Var<T> encoder_forward(const EncoderConfig& cfg, const nn::ParamSet<T>& w,
                           const nn::Var<T>& input, std::span<const nn::Segment> segments) {
  if (input->value.cols() != cfg.input_dim) {
    fail(ErrorKind::kValidation, "encoder: input has " + std::to_string(input->value.cols()) +
                                     " columns, expected " + std::to_string(cfg.input_dim));
  }
  std::vector<nn::Segment> whole;
  if (segments.empty()) {
    whole.push_back({0, input->value.rows()});
    segments = whole;
  }
  auto x = nn::add(nn::matmul(input, w["in.w"]), w["in.b"]);
  for (std::size_t b = 0; b < cfg.blocks; ++b) {
    const std::string p = "block" + std::to_string(b);
    x = nn::add(x, nn::scale(ffn(w, p + ".ff1", x), 0.5));
    x = nn::add(x, self_attention(cfg, w, p + ".att", x, segments));
    x = nn::add(x, conv_module(cfg, w, p + ".conv", x, segments));
    x = nn::add(x, nn::scale(ffn(w, p + ".ff2", x), 0.5));
    x = nn::layer_norm(x, w[p + ".out.ln.g"], w[p + ".out.ln.b"], kLayerNormEps);
  }
  auto delta = nn::add(nn::matmul(x, w["out.w"]), w["out.b"]);
  return cfg.global_residual ? nn::add(input, delta) : delta;
}

std::vector<nn::Matrix> encode_batch(const EncoderParams& params,
                                     std::span<const nn::Matrix* const> inputs) {
  std::vector<nn::Segment> segments;
  std::size_t offset = 0;
  for (const auto* m : inputs) {
    if (m->cols() != params.config.input_dim) {
      fail(ErrorKind::kValidation, "encode: feature dimension " + std::to_string(m->cols()) +
                                       " does not match encoder input " +
                                       std::to_string(params.config.input_dim));
    }
    if (m->rows() == 0) fail(ErrorKind::kValidation, "encode: empty sequence");
    segments.push_back({offset, m->rows()});
    offset += m->rows();
  }
  std::vector<nn::Matrix> out;
  if (inputs.empty()) return out;
  nn::NoGradGuard no_grad;
  auto stacked = nn::constant(nn::vstack<float>(inputs));
  auto y = encoder_forward(params.config, params.weights, stacked, segments);
  for (const auto& s : segments) {
    nn::Matrix part(s.length, y->value.cols());
    std::copy_n(y->value.ptr() + s.begin * y->value.cols(), part.size(), part.ptr());
    out.push_back(std::move(part));
  }
  return out;
}

FeatureSequence encode(const EncoderParams& params, const FeatureSequence& input) {
  const nn::Matrix* one[] = {&input.values()};
  auto out = encode_batch(params, one);
  return FeatureSequence(std::move(out.front()), Provenance::kAvenetOutput);
}

template <typename T>
nn::Var<T> avg_loss(const nn::Var<T>& y, const nn::Var<T>& average) {
  if (!y->value.same_shape(average->value)) {
    fail(ErrorKind::kValidation, "avg_loss: encoding and average feature shapes differ");
  }
  return nn::l1_loss(y, average);
}

template <typename T>
nn::Var<T> comp_loss(const nn::Var<T>& y, const nn::Var<T>& y_pos) {
  if (!y->value.same_shape(y_pos->value)) {
    fail(ErrorKind::kValidation, "comp_loss: the two encodings have different shapes");
  }
  return nn::l1_loss(y, y_pos);
}

template <typename T>
nn::Var<T> total_loss(const nn::Var<T>& y, const nn::Var<T>& y_pos, const nn::Var<T>& average,
                      double alpha, double beta) {
  if (alpha < 0.0 || beta < 0.0) fail(ErrorKind::kConfig, "total_loss: weights must be non-negative");
  return nn::add(nn::scale(avg_loss(y, average), alpha), nn::scale(comp_loss(y, y_pos), beta));
}

#define AVENET_INSTANTIATE(T)                                                                  \
  template nn::Var<T> encoder_forward(const EncoderConfig&, const nn::ParamSet<T>&,            \
                                      const nn::Var<T>&, std::span<const nn::Segment>);        \
  template nn::Var<T> avg_loss(const nn::Var<T>&, const nn::Var<T>&);                          \
  template nn::Var<T> comp_loss(const nn::Var<T>&, const nn::Var<T>&);                         \
  template nn::Var<T> total_loss(const nn::Var<T>&, const nn::Var<T>&, const nn::Var<T>&,      \
                                 double, double);

AVENET_INSTANTIATE(float)
AVENET_INSTANTIATE(double)
#undef AVENET_INSTANTIATE

}  // namespace avenet::encoder

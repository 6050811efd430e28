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
#include <cmath>
#include <functional>
#include <vector>

#include "numerics/adam.h"
#include "numerics/autodiff.h"
#include "numerics/gradcheck.h"
#include "numerics/params.h"
#include "test_util.h"

namespace nn = avenet::nn;
using avenet::ErrorKind;
using avenet::Rng;
using avenet::testing::random_matrix;
using MD = nn::MatrixD;
using VD = nn::Var<double>;

namespace {

// Independent central-difference oracle: perturbs every entry of `p` and
// compares against the analytic gradient left by one backward pass.
double max_fd_error(const std::function<VD()>& f, const VD& p, double h = 1e-6) {
  p->grad.fill(0.0);
  nn::backward(f());
  const MD analytic = p->grad;
  double worst = 0.0;
  for (std::size_t i = 0; i < p->value.size(); ++i) {
    const double x = p->value[i];
    p->value[i] = x + h;
    const double up = f()->value[0];
    p->value[i] = x - h;
    const double down = f()->value[0];
    p->value[i] = x;
    const double fd = (up - down) / (2 * h);
    const double denom = std::max({std::abs(fd), std::abs(analytic[i]), 1e-6});
    worst = std::max(worst, std::abs(fd - analytic[i]) / denom);
  }
  return worst;
}

MD brute_matmul(const MD& a, const MD& b) {
  MD out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      double s = 0;
      for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
      out(i, j) = s;
    }
  return out;
}

// Weighted sum with fixed random weights turns any node into a scalar
// whose gradient exercises every output entry.
VD probe_sum(const VD& y, std::uint64_t seed) {
  Rng rng(seed);
  return nn::sum(nn::mul(y, nn::constant(random_matrix<double>(y->value.rows(), y->value.cols(), rng))));
}

}  // namespace

TEST_SUITE("numerics") {

TEST_CASE("matmul hand arithmetic and identity") {
  const auto m = nn::Matrix::from_rows({{1, 2}, {3, 4}});
  CHECK(nn::matmul(nn::Matrix::identity(2), m) == m);
  const auto r = nn::matmul(m, nn::Matrix::from_rows({{1}, {1}}));
  CHECK(r == nn::Matrix::from_rows({{3}, {7}}));
  CHECK_ERROR_KIND(nn::matmul(m, nn::Matrix(3, 1)), ErrorKind::kShape);
}

TEST_CASE("matmul agrees with a brute-force triple loop") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto a = random_matrix<double>(1 + rng.index(9), 1 + rng.index(9), rng);
    const auto b = random_matrix<double>(a.cols(), 1 + rng.index(9), rng);
    const auto fast = nn::matmul(a, b);
    const auto ref = brute_matmul(a, b);
    for (std::size_t i = 0; i < ref.size(); ++i) CHECK(fast[i] == doctest::Approx(ref[i]).epsilon(1e-12));
  }
}

TEST_CASE("matmul gradients match finite differences") {
  Rng rng(4);
  auto a = nn::parameter(random_matrix<double>(3, 4, rng));
  auto b = nn::parameter(random_matrix<double>(4, 2, rng));
  auto f = [&] { return probe_sum(nn::matmul(a, b), 9); };
  CHECK(max_fd_error(f, a) < 1e-3);
  CHECK(max_fd_error(f, b) < 1e-3);
  auto c = nn::parameter(random_matrix<double>(5, 4, rng));
  auto g = [&] { return probe_sum(nn::matmul_nt(a, c), 10); };
  CHECK(max_fd_error(g, a) < 1e-3);
  CHECK(max_fd_error(g, c) < 1e-3);
}

TEST_CASE("elementwise identities") {
  Rng rng(5);
  const auto m = random_matrix<float>(3, 4, rng);
  auto x = nn::constant(m);
  CHECK(nn::add(x, nn::constant(nn::Matrix(3, 4)))->value == m);
  CHECK(nn::scale(x, 1.0)->value == m);
  CHECK_ERROR_KIND(nn::add(x, nn::constant(nn::Matrix(2, 4))), ErrorKind::kShape);
  CHECK_ERROR_KIND(nn::mul(x, nn::constant(nn::Matrix(3, 3))), ErrorKind::kShape);
  // Row-vector bias broadcast.
  auto bias = nn::Matrix::from_rows({{1, 2, 3, 4}});
  const auto y = nn::add(x, nn::constant(bias))->value;
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 4; ++c) CHECK(y(r, c) == m(r, c) + bias(0, c));
}

TEST_CASE("elementwise and activation gradients") {
  Rng rng(6);
  auto a = nn::parameter(random_matrix<double>(4, 5, rng));
  auto b = nn::parameter(random_matrix<double>(4, 5, rng));
  auto bias = nn::parameter(random_matrix<double>(1, 5, rng));
  CHECK(max_fd_error([&] { return probe_sum(nn::add(a, b), 1); }, b) < 1e-3);
  CHECK(max_fd_error([&] { return probe_sum(nn::sub(a, b), 2); }, b) < 1e-3);
  CHECK(max_fd_error([&] { return probe_sum(nn::mul(a, b), 3); }, a) < 1e-3);
  CHECK(max_fd_error([&] { return probe_sum(nn::scale(a, -2.5), 4); }, a) < 1e-3);
  CHECK(max_fd_error([&] { return probe_sum(nn::gelu(a), 5); }, a) < 1e-3);
  CHECK(max_fd_error([&] { return probe_sum(nn::add(a, bias), 6); }, bias) < 1e-3);
  // Keep relu probes away from its hinge.
  for (std::size_t i = 0; i < a->value.size(); ++i) {
    if (std::abs(a->value[i]) < 0.05) a->value[i] = 0.3;
  }
  CHECK(max_fd_error([&] { return probe_sum(nn::relu(a), 7); }, a) < 1e-3);
}

TEST_CASE("layer_norm values, errors and gradients") {
  auto gain = nn::constant(nn::MatrixD::from_rows({{1, 1}}));
  auto bias = nn::constant(nn::MatrixD(1, 2));
  auto z = nn::layer_norm(nn::constant(nn::MatrixD::from_rows({{3, 3}})), gain, bias, 1e-5)->value;
  CHECK(z(0, 0) == 0.0);
  CHECK(z(0, 1) == 0.0);
  auto u = nn::layer_norm(nn::constant(nn::MatrixD::from_rows({{1, -1}})), gain, bias, 1e-12)->value;
  CHECK(u(0, 0) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(u(0, 1) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK_ERROR_KIND(nn::layer_norm(nn::constant(nn::MatrixD(1, 2)), gain, bias, 0.0), ErrorKind::kConfig);

  Rng rng(7);
  auto x = nn::parameter(random_matrix<double>(4, 6, rng));
  auto g = nn::parameter(random_matrix<double>(1, 6, rng));
  auto b = nn::parameter(random_matrix<double>(1, 6, rng));
  auto f = [&] { return probe_sum(nn::layer_norm(x, g, b, 1e-5), 8); };
  CHECK(max_fd_error(f, x) < 1e-3);
  CHECK(max_fd_error(f, g) < 1e-3);
  CHECK(max_fd_error(f, b) < 1e-3);
}

TEST_CASE("softmax_rows properties and gradient") {
  auto uni = nn::softmax_rows(nn::constant(nn::MatrixD::from_rows({{2, 2, 2, 2}})))->value;
  for (std::size_t c = 0; c < 4; ++c) CHECK(uni(0, c) == doctest::Approx(0.25));
  auto sat = nn::softmax_rows(nn::constant(nn::MatrixD::from_rows({{60, 5}})))->value;
  CHECK(sat(0, 0) == doctest::Approx(1.0));
  CHECK(sat(0, 1) < 1e-20);

  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    auto s = nn::softmax_rows(nn::constant(random_matrix<float>(3, 1 + rng.index(12), rng, -100, 100)))->value;
    for (std::size_t r = 0; r < s.rows(); ++r) {
      double total = 0;
      for (float v : s.row(r)) {
        CHECK(v >= 0.0f);
        total += v;
      }
      CHECK(std::abs(total - 1.0) <= 1e-6);
    }
  }
  auto x = nn::parameter(random_matrix<double>(3, 5, rng));
  CHECK(max_fd_error([&] { return probe_sum(nn::softmax_rows(x), 11); }, x) < 1e-3);
}

TEST_CASE("depthwise_conv1d hand cases and gradient") {
  Rng rng(9);
  const auto m = random_matrix<float>(6, 3, rng);
  nn::Matrix delta(3, 3);
  for (std::size_t c = 0; c < 3; ++c) delta(1, c) = 1.0f;
  CHECK(nn::depthwise_conv1d(nn::constant(m), nn::constant(delta), 3)->value == m);

  nn::MatrixD col(5, 1);
  col(1, 0) = 3.0;
  nn::MatrixD box(3, 1, 1.0 / 3.0);
  auto y = nn::depthwise_conv1d(nn::constant(col), nn::constant(box), 3)->value;
  const double expect[5] = {1, 1, 1, 0, 0};
  for (int t = 0; t < 5; ++t) CHECK(y(t, 0) == doctest::Approx(expect[t]));

  CHECK_ERROR_KIND(nn::depthwise_conv1d(nn::constant(m), nn::constant(nn::Matrix(2, 3)), 2), ErrorKind::kConfig);

  auto x = nn::parameter(random_matrix<double>(8, 4, rng));
  auto k = nn::parameter(random_matrix<double>(3, 4, rng));
  auto f = [&] { return probe_sum(nn::depthwise_conv1d(x, k, 3), 12); };
  CHECK(max_fd_error(f, x) < 1e-3);
  CHECK(max_fd_error(f, k) < 1e-3);
}

TEST_CASE("depthwise_conv1d segments do not leak across sequences") {
  Rng rng(10);
  const auto a = random_matrix<float>(4, 2, rng);
  const auto b = random_matrix<float>(3, 2, rng);
  const auto k = random_matrix<float>(3, 2, rng);
  const nn::Matrix* parts[] = {&a, &b};
  const auto stacked = nn::vstack<float>(parts);
  const nn::Segment segs[] = {{0, 4}, {4, 3}};
  const auto joint = nn::depthwise_conv1d(nn::constant(stacked), nn::constant(k), 3, segs)->value;
  const auto ya = nn::depthwise_conv1d(nn::constant(a), nn::constant(k), 3)->value;
  const auto yb = nn::depthwise_conv1d(nn::constant(b), nn::constant(k), 3)->value;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t c = 0; c < 2; ++c) CHECK(joint(r, c) == ya(r, c));
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 2; ++c) CHECK(joint(4 + r, c) == yb(r, c));
}

TEST_CASE("l1_loss values and subgradient") {
  const auto m = nn::Matrix::from_rows({{1, 2}});
  CHECK(nn::l1_loss(nn::constant(m), m)->value[0] == 0.0f);
  CHECK(nn::l1_loss(nn::constant(m), nn::Matrix(1, 2))->value[0] == doctest::Approx(1.5));
  CHECK_ERROR_KIND(nn::l1_loss(nn::constant(m), nn::Matrix(2, 1)), ErrorKind::kShape);

  auto p = nn::parameter(nn::MatrixD::from_rows({{0.5, -0.25, 2.0}}));
  nn::MatrixD target = p->value;
  target[0] -= 1.0;  // p above target
  target[1] += 1.0;  // p below target
  // target[2] tied: subgradient 0
  nn::backward(nn::l1_loss(p, target));
  CHECK(p->grad[0] == doctest::Approx(1.0 / 3));
  CHECK(p->grad[1] == doctest::Approx(-1.0 / 3));
  CHECK(p->grad[2] == 0.0);

  Rng rng(11);
  auto a = nn::parameter(random_matrix<double>(4, 3, rng));
  const auto t = random_matrix<double>(4, 3, rng);
  CHECK(max_fd_error([&] { return nn::l1_loss(a, t); }, a) < 1e-3);
}

TEST_CASE("backward sums, accumulation and misuse") {
  auto m = nn::parameter(nn::MatrixD(2, 3, 0.7));
  nn::backward(nn::sum(m));
  for (double g : m->grad.data()) CHECK(g == 1.0);
  nn::backward(nn::sum(m));  // no zeroing in between
  for (double g : m->grad.data()) CHECK(g == 2.0);
  nn::zero_grad<double>(std::span<const VD>(&m, 1));
  for (double g : m->grad.data()) CHECK(g == 0.0);

  nn::MatrixD shifted = m->value;
  for (auto& v : shifted.data()) v -= 1.0;
  nn::backward(nn::l1_loss(m, shifted));
  for (double g : m->grad.data()) CHECK(g == doctest::Approx(1.0 / 6));

  CHECK_ERROR_KIND(nn::backward(m), ErrorKind::kUsage);
}

TEST_CASE("shared nodes accumulate adjoints from every consumer") {
  Rng rng(12);
  auto x = nn::parameter(random_matrix<double>(3, 3, rng));
  auto w = nn::parameter(random_matrix<double>(3, 3, rng));
  auto f = [&] {
    auto h = nn::matmul(x, w);
    return probe_sum(nn::add(nn::gelu(h), nn::mul(h, h)), 13);
  };
  CHECK(max_fd_error(f, x) < 1e-3);
  CHECK(max_fd_error(f, w) < 1e-3);
}

TEST_CASE("two-layer network gradient, slicing and concatenation") {
  Rng rng(13);
  auto x = nn::constant(random_matrix<double>(5, 4, rng));
  auto w1 = nn::parameter(random_matrix<double>(4, 6, rng));
  auto b1 = nn::parameter(random_matrix<double>(1, 6, rng));
  auto w2 = nn::parameter(random_matrix<double>(6, 2, rng));
  const auto target = random_matrix<double>(5, 2, rng);
  auto f = [&] {
    auto h = nn::gelu(nn::add(nn::matmul(x, w1), b1));
    const VD halves[] = {nn::slice_cols(h, 3, 3), nn::slice_cols(h, 0, 3)};
    auto swapped = nn::concat_cols<double>(halves);
    const VD rows[] = {nn::slice_rows(swapped, 2, 3), nn::slice_rows(swapped, 0, 2)};
    return nn::l1_loss(nn::matmul(nn::concat_rows<double>(rows), w2), target);
  };
  CHECK(max_fd_error(f, w1) < 1e-3);
  CHECK(max_fd_error(f, b1) < 1e-3);
  CHECK(max_fd_error(f, w2) < 1e-3);
}

TEST_CASE("cross_entropy gradient") {
  Rng rng(14);
  auto logits = nn::parameter(random_matrix<double>(6, 4, rng));
  const int labels[] = {0, 3, 1, 1, 2, 0};
  CHECK(max_fd_error([&] { return nn::cross_entropy(logits, labels); }, logits) < 1e-3);
  const int bad[] = {0, 4, 1, 1, 2, 0};
  CHECK_ERROR_KIND(nn::cross_entropy(logits, bad), ErrorKind::kValidation);
}

TEST_CASE("operations are bitwise deterministic") {
  Rng rng(15);
  const auto a = random_matrix<float>(7, 9, rng);
  const auto b = random_matrix<float>(9, 5, rng);
  CHECK(nn::matmul(a, b) == nn::matmul(a, b));
  auto g1 = nn::gelu(nn::softmax_rows(nn::constant(a)))->value;
  auto g2 = nn::gelu(nn::softmax_rows(nn::constant(a)))->value;
  CHECK(g1 == g2);
}

TEST_CASE("no-grad guard builds value-only graphs") {
  auto p = nn::parameter(nn::Matrix(2, 2, 1.0f));
  nn::Var<float> y;
  {
    nn::NoGradGuard guard;
    y = nn::scale(p, 2.0);
  }
  CHECK_FALSE(y->requires_grad);
  CHECK(nn::scale(p, 2.0)->requires_grad);
}

TEST_CASE("adam: fixed point, first step, quadratic bowl") {
  nn::ParamSet<double> ps;
  ps.add("x", nn::MatrixD(1, 1, 0.5));
  nn::AdamState<double> st(ps.vars(), {.learning_rate = 0.1});
  nn::adam_step(ps.vars(), st);
  CHECK(ps["x"]->value[0] == 0.5);
  CHECK(st.step == 1);

  nn::AdamState<double> fresh(ps.vars(), {.learning_rate = 0.1});
  ps["x"]->grad[0] = 1.0;
  nn::adam_step(ps.vars(), fresh);
  CHECK(ps["x"]->value[0] - 0.5 == doctest::Approx(-0.1).epsilon(1e-6));
  CHECK(ps["x"]->grad[0] == 0.0);  // zeroed after the update
  CHECK(fresh.step == 1);
  CHECK(fresh.first_moment[0].same_shape(ps["x"]->value));

  nn::ParamSet<double> bowl;
  bowl.add("x", nn::MatrixD(1, 1, 1.0));
  nn::AdamState<double> s2(bowl.vars(), {.learning_rate = 0.05});
  for (int i = 0; i < 500; ++i) {
    auto x = bowl["x"];
    nn::backward(nn::sum(nn::mul(x, x)));
    nn::adam_step(bowl.vars(), s2);
  }
  CHECK(std::abs(bowl["x"]->value[0]) < 1e-3);
  CHECK(s2.step == 500);
}

TEST_CASE("finite_difference_check: linear, composite, corrupted") {
  Rng rng(16);
  auto w = nn::parameter(random_matrix<double>(4, 3, rng));
  auto x = nn::constant(random_matrix<double>(5, 4, rng));
  const VD params[] = {w};
  auto linear = [&] { return probe_sum(nn::matmul(x, w), 17); };
  nn::GradCheckOptions opt;
  opt.probes = 12;
  const auto lin = nn::finite_difference_check<double>(linear, params, opt);
  CHECK(lin.passed);
  CHECK(lin.max_relative_error < 1e-6);

  auto composite = [&] { return probe_sum(nn::softmax_rows(nn::gelu(nn::matmul(x, w))), 18); };
  CHECK(nn::finite_difference_check<double>(composite, params, opt).passed);

  auto corrupted = [&] {
    auto y = nn::matmul(x, w);
    auto rule = y->backward_rule;
    y->backward_rule = [rule](nn::Node<double>& n) {
      for (auto& g : n.grad.data()) g *= 1.5;
      rule(n);
    };
    return probe_sum(y, 19);
  };
  CHECK_FALSE(nn::finite_difference_check<double>(corrupted, params, opt).passed);

  int calls = 0;
  auto flaky = [&] { return probe_sum(nn::scale(nn::matmul(x, w), 1.0 + 1e-3 * (++calls)), 20); };
  const auto r = nn::finite_difference_check<double>(flaky, params, opt);
  CHECK_FALSE(r.deterministic);
  CHECK_FALSE(r.passed);
}

TEST_CASE("every differentiable op passes the probe-based check") {
  Rng rng(21);
  auto a = nn::parameter(random_matrix<double>(5, 6, rng));
  auto b = nn::parameter(random_matrix<double>(5, 6, rng));
  auto row = nn::parameter(random_matrix<double>(1, 6, rng));
  auto k = nn::parameter(random_matrix<double>(3, 6, rng));
  auto w = nn::parameter(random_matrix<double>(6, 6, rng));
  const VD params[] = {a, b, row, k, w};
  nn::GradCheckOptions opt;
  opt.probes = 32;
  const std::vector<std::function<VD()>> closures = {
      [&] { return probe_sum(nn::matmul(a, w), 1); },
      [&] { return probe_sum(nn::matmul_nt(a, b), 2); },
      [&] { return probe_sum(nn::add(a, row), 3); },
      [&] { return probe_sum(nn::sub(a, b), 4); },
      [&] { return probe_sum(nn::mul(a, b), 5); },
      [&] { return probe_sum(nn::gelu(a), 6); },
      [&] { return probe_sum(nn::layer_norm(a, row, row, 1e-5), 7); },
      [&] { return probe_sum(nn::softmax_rows(a), 8); },
      [&] { return probe_sum(nn::depthwise_conv1d(a, k, 3), 9); },
      [&] { return nn::l1_loss(a, b); },
  };
  for (std::size_t i = 0; i < closures.size(); ++i) {
    CAPTURE(i);
    const auto rep = nn::finite_difference_check<double>(closures[i], params, opt);
    CHECK(rep.passed);
  }
}

}  // TEST_SUITE

// SPDX-License-Identifier: Apache-2.0
#include "airpad/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "airpad/nn/loss.hpp"
#include "airpad/random.hpp"

namespace airpad::nn {

double relative_error(double analytic, double numeric, double floor) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return std::abs(analytic - numeric) / denom;
}

namespace {

double dot(const Tensor<double>& a, const Tensor<double>& b) {
  return std::inner_product(a.values().begin(), a.values().end(), b.values().begin(), 0.0);
}

void record(GradCheckResult& r, double analytic, double numeric, double floor,
            const std::string& where) {
  const double e = relative_error(analytic, numeric, floor);
  ++r.checked;
  if (r.worst.empty() || e > r.max_rel_error) {
    r.max_rel_error = e;
    r.worst = where + " analytic=" + std::to_string(analytic) + " numeric=" +
              std::to_string(numeric);
  }
}

Tensor<double> random_tensor(const Shape& shape, std::mt19937_64& rng, double lo = -1.0,
                             double hi = 1.0) {
  Tensor<double> t(shape);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (auto& v : t.values()) v = dist(rng);
  return t;
}

}  // namespace

GradCheckResult check_layer(Layer<double>& layer, const Tensor<double>& x, std::uint64_t seed,
                            const GradCheckOptions& opts) {
  GradCheckResult r;
  r.name = layer_kind_name(layer.spec().kind);
  std::mt19937_64 rng(seed);

  const Tensor<double> y = layer.forward(x);
  const Tensor<double> weights = random_tensor(y.shape(), rng);
  const Tensor<double> dx = layer.backward(weights);
  std::vector<Tensor<double>> param_grads;
  for (Param<double>* p : layer.params()) param_grads.push_back(p->grad);

  auto loss = [&](const Tensor<double>& in) { return dot(layer.forward(in), weights); };
  const double h = opts.step;

  Tensor<double> probe = x;
  for (std::size_t j = 0; j < x.size(); ++j) {
    probe[j] = x[j] + h;
    const double up = loss(probe);
    probe[j] = x[j] - h;
    const double down = loss(probe);
    probe[j] = x[j];
    record(r, dx[j], (up - down) / (2 * h), opts.floor, "input[" + std::to_string(j) + "]");
  }

  const auto params = layer.params();
  for (std::size_t k = 0; k < params.size(); ++k) {
    Tensor<double>& value = params[k]->value;
    for (std::size_t j = 0; j < value.size(); ++j) {
      const double orig = value[j];
      value[j] = orig + h;
      const double up = loss(x);
      value[j] = orig - h;
      const double down = loss(x);
      value[j] = orig;
      record(r, param_grads[k][j], (up - down) / (2 * h), opts.floor,
             params[k]->name + "[" + std::to_string(j) + "]");
    }
  }
  return r;
}

GradCheckResult check_softmax_cross_entropy(const Tensor<double>& logits,
                                            std::span<const std::uint8_t> labels,
                                            const GradCheckOptions& opts) {
  GradCheckResult r;
  r.name = "softmax+cross_entropy";
  const BatchLoss<double> base = softmax_cross_entropy(logits, labels);
  const double h = opts.loss_step;
  Tensor<double> probe = logits;
  const auto loss_at = [&](std::size_t j, double delta) {
    probe[j] = logits[j] + delta;
    return softmax_cross_entropy(probe, labels).loss;
  };
  for (std::size_t j = 0; j < logits.size(); ++j) {
    const double numeric =
        (loss_at(j, -2 * h) - 8 * loss_at(j, -h) + 8 * loss_at(j, h) - loss_at(j, 2 * h)) / (12 * h);
    probe[j] = logits[j];
    record(r, base.grad[j], numeric, opts.floor, "logit[" + std::to_string(j) + "]");
  }
  return r;
}

std::vector<GradCheckResult> gradient_suite(std::uint64_t seed, const GradCheckOptions& opts) {
  std::vector<GradCheckResult> out;
  std::uint64_t case_id = 0;
  auto run = [&](const std::string& name, const LayerSpec& spec, const Shape& sample,
                 Tensor<double> x) {
    const std::uint64_t s = derive_seed(seed, {++case_id});
    auto layer = make_layer<double>(spec, sample);
    std::mt19937_64 init(s);
    layer->initialize(init, false);
    // Non-trivial scale and shift so their gradients are exercised.
    for (Param<double>* p : layer->params()) {
      if (p->name == "gamma" || p->name == "beta" || p->name == "bias") {
        std::uniform_real_distribution<double> d(0.5, 1.5);
        for (auto& v : p->value.values()) v = d(init);
      }
    }
    GradCheckResult r = check_layer(*layer, x, s ^ 0x9e37, opts);
    r.name = name;
    out.push_back(std::move(r));
  };

  std::mt19937_64 rng(seed);
  run("dense", LayerSpec::dense(4), {5}, random_tensor({2, 5}, rng));
  run("conv2d", LayerSpec::conv2d(3, 3, 1, 1), {2, 5, 5}, random_tensor({2, 2, 5, 5}, rng));
  run("conv2d_stride2", LayerSpec::conv2d(2, 3, 2, 0), {2, 7, 7},
      random_tensor({2, 2, 7, 7}, rng));

  {
    // Distinct, well separated values so the finite step never changes a
    // window's maximum.
    Tensor<double> x({2, 2, 5, 5});
    std::vector<std::size_t> perm(x.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = 0.01 * static_cast<double>(perm[i]) - 0.5;
    run("maxpool2", LayerSpec::of(LayerKind::kMaxPool2), {2, 5, 5}, x);
  }

  {
    Tensor<double> x({4, 3, 3, 3});
    std::normal_distribution<double> d(3.0, 5.0);
    for (auto& v : x.values()) v = d(rng);
    run("batchnorm", LayerSpec::of(LayerKind::kBatchNorm), {3, 3, 3}, x);
  }
  run("batchnorm_dense", LayerSpec::of(LayerKind::kBatchNorm), {5}, random_tensor({6, 5}, rng));

  {
    // Keep away from the kink.
    Tensor<double> x = random_tensor({2, 3, 4, 4}, rng);
    for (auto& v : x.values()) v = v < 0 ? v - 0.1 : v + 0.1;
    run("relu", LayerSpec::of(LayerKind::kReLU), {3, 4, 4}, x);
  }

  run("lstm", LayerSpec::lstm(5), {3, 4}, random_tensor({2, 3, 4}, rng));
  run("lstm_image_shape", LayerSpec::lstm(4), {1, 4, 3}, random_tensor({2, 1, 4, 3}, rng));
  run("softmax", LayerSpec::of(LayerKind::kSoftmax), {10}, random_tensor({3, 10}, rng, -3, 3));
  run("flatten", LayerSpec::of(LayerKind::kFlatten), {2, 3, 3}, random_tensor({2, 2, 3, 3}, rng));

  {
    const Tensor<double> logits = random_tensor({4, 10}, rng, -3, 3);
    const std::vector<std::uint8_t> labels = {3, 0, 9, 3};
    out.push_back(check_softmax_cross_entropy(logits, labels, opts));
  }
  return out;
}

}  // namespace airpad::nn

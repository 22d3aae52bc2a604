// SPDX-License-Identifier: Apache-2.0
#include "airpad/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "eigen_util.hpp"
#include "lstm_layer.hpp"

namespace airpad::nn {

using detail::ConstMatMap;
using detail::ConstRowVecMap;
using detail::MatMap;
using detail::RowVecMap;
using detail::add_column_sums;

std::string layer_kind_name(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConv2D: return "conv2d";
    case LayerKind::kBatchNorm: return "batchnorm";
    case LayerKind::kReLU: return "relu";
    case LayerKind::kMaxPool2: return "maxpool2";
    case LayerKind::kFlatten: return "flatten";
    case LayerKind::kDense: return "dense";
    case LayerKind::kLSTM: return "lstm";
    case LayerKind::kSoftmax: return "softmax";
  }
  return "unknown";
}

LayerKind layer_kind_from_name(const std::string& name) {
  for (LayerKind k : {LayerKind::kConv2D, LayerKind::kBatchNorm, LayerKind::kReLU,
                      LayerKind::kMaxPool2, LayerKind::kFlatten, LayerKind::kDense,
                      LayerKind::kLSTM, LayerKind::kSoftmax}) {
    if (layer_kind_name(k) == name) return k;
  }
  throw Error(ErrorCode::kFormatError, "unknown layer kind '" + name + "'");
}

LayerSpec LayerSpec::conv2d(std::size_t out_channels, std::size_t kernel, std::size_t stride,
                            std::size_t pad) {
  return {LayerKind::kConv2D, out_channels, kernel, stride, pad};
}
LayerSpec LayerSpec::dense(std::size_t units) { return {LayerKind::kDense, units, 0, 1, 0}; }
LayerSpec LayerSpec::lstm(std::size_t hidden) { return {LayerKind::kLSTM, hidden, 0, 1, 0}; }
LayerSpec LayerSpec::of(LayerKind kind) { return {kind, 0, 0, 1, 0}; }

nlohmann::json LayerSpec::to_json() const {
  nlohmann::json j = {{"kind", layer_kind_name(kind)}};
  switch (kind) {
    case LayerKind::kConv2D:
      j["out_channels"] = units;
      j["kernel"] = kernel;
      j["stride"] = stride;
      j["pad"] = pad;
      break;
    case LayerKind::kDense: j["units"] = units; break;
    case LayerKind::kLSTM: j["hidden"] = units; break;
    default: break;
  }
  return j;
}

LayerSpec LayerSpec::from_json(const nlohmann::json& j) {
  try {
    LayerSpec s = of(layer_kind_from_name(j.at("kind").get<std::string>()));
    switch (s.kind) {
      case LayerKind::kConv2D:
        s.units = j.at("out_channels").get<std::size_t>();
        s.kernel = j.at("kernel").get<std::size_t>();
        s.stride = j.at("stride").get<std::size_t>();
        s.pad = j.at("pad").get<std::size_t>();
        break;
      case LayerKind::kDense: s.units = j.at("units").get<std::size_t>(); break;
      case LayerKind::kLSTM: s.units = j.at("hidden").get<std::size_t>(); break;
      default: break;
    }
    return s;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("layer spec: ") + e.what());
  }
}

template <typename T>
void Layer<T>::check_input(const Tensor<T>& x) const {
  if (x.rank() != input_shape_.size() + 1 || x.dim(0) == 0 ||
      !std::equal(input_shape_.begin(), input_shape_.end(), x.shape().begin() + 1)) {
    throw Error(ErrorCode::kShapeMismatch, layer_kind_name(spec().kind) + " expects " +
                                               shape_string(batched(0, input_shape_)) +
                                               " (batch first), got " + shape_string(x.shape()));
  }
}

template <typename T>
void Layer<T>::check_output_grad(const Tensor<T>& dy, std::size_t batch) const {
  if (dy.shape() != batched(batch, output_shape())) {
    throw Error(ErrorCode::kShapeMismatch, layer_kind_name(spec().kind) +
                                               " backward expects " +
                                               shape_string(batched(batch, output_shape())) +
                                               ", got " + shape_string(dy.shape()));
  }
}

namespace {

template <typename T>
void uniform_init(Tensor<T>& t, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (auto& v : t.values()) v = static_cast<T>(dist(rng));
}

double init_limit(std::size_t fan_in, std::size_t fan_out, bool he) {
  return he ? std::sqrt(6.0 / static_cast<double>(fan_in))
            : std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

template <typename T>
Param<T> make_param(const std::string& name, Shape shape) {
  return {name, Tensor<T>(shape), Tensor<T>(shape)};
}

// ---------------------------------------------------------------------------

template <typename T>
class Dense final : public Layer<T> {
 public:
  Dense(const LayerSpec& spec, const Shape& in)
      : Layer<T>(in),
        units_(spec.units),
        features_(in.at(0)),
        weight_(make_param<T>("weight", {features_, units_})),
        bias_(make_param<T>("bias", {units_})) {}

  LayerSpec spec() const override { return LayerSpec::dense(units_); }
  Shape output_shape() const override { return {units_}; }

  Tensor<T> infer(const Tensor<T>& x) const override {
    this->check_input(x);
    const std::size_t n = x.dim(0);
    Tensor<T> y({n, units_});
    MatMap<T> out(y.data(), n, units_);
    out.noalias() = ConstMatMap<T>(x.data(), n, features_) *
                    ConstMatMap<T>(weight_.value.data(), features_, units_);
    out.rowwise() += ConstRowVecMap<T>(bias_.value.data(), units_);
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    Tensor<T> y = infer(x);
    input_ = x;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    const std::size_t n = input_.dim(0);
    this->check_output_grad(dy, n);
    ConstMatMap<T> g(dy.data(), n, units_);
    ConstMatMap<T> x(input_.data(), n, features_);
    MatMap<T>(weight_.grad.data(), features_, units_).noalias() = x.transpose() * g;
    bias_.grad.fill(T{0});
    add_column_sums(dy.data(), n, units_, bias_.grad.data());
    Tensor<T> dx({n, features_});
    MatMap<T>(dx.data(), n, features_).noalias() =
        g * ConstMatMap<T>(weight_.value.data(), features_, units_).transpose();
    return dx;
  }

  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }

  void initialize(std::mt19937_64& rng, bool relu_follows) override {
    uniform_init(weight_.value, init_limit(features_, units_, relu_follows), rng);
    bias_.value.fill(T{0});
  }

 private:
  std::size_t units_;
  std::size_t features_;
  Param<T> weight_;
  Param<T> bias_;
  Tensor<T> input_;
};

// ---------------------------------------------------------------------------

/// Cross-correlation, NCHW, kernel [out, in, k, k], zero padding.
template <typename T>
class Conv2D final : public Layer<T> {
 public:
  Conv2D(const LayerSpec& spec, const Shape& in)
      : Layer<T>(in),
        out_channels_(spec.units),
        kernel_(spec.kernel),
        stride_(spec.stride),
        pad_(spec.pad),
        in_channels_(in.at(0)),
        height_(in.at(1)),
        width_(in.at(2)),
        out_h_((height_ + 2 * pad_ - kernel_) / stride_ + 1),
        out_w_((width_ + 2 * pad_ - kernel_) / stride_ + 1),
        weight_(make_param<T>("kernel", {out_channels_, in_channels_, kernel_, kernel_})),
        bias_(make_param<T>("bias", {out_channels_})) {}

  LayerSpec spec() const override {
    return LayerSpec::conv2d(out_channels_, kernel_, stride_, pad_);
  }
  Shape output_shape() const override { return {out_channels_, out_h_, out_w_}; }

  Tensor<T> infer(const Tensor<T>& x) const override {
    this->check_input(x);
    const std::size_t n = x.dim(0);
    const std::size_t rows = patch_rows();
    const std::size_t area = out_area();
    Tensor<T> y(batched(n, output_shape()));
    ConstMatMap<T> w(weight_.value.data(), out_channels_, rows);
    const auto b = Eigen::Map<const Eigen::Matrix<T, Eigen::Dynamic, 1>>(bias_.value.data(),
                                                                          out_channels_);
    // One sample's patch matrix at a time keeps it cache resident.
    std::vector<T> cols(rows * area);
    for (std::size_t i = 0; i < n; ++i) {
      im2col(x.data() + i * in_channels_ * height_ * width_, cols.data());
      MatMap<T> out(y.data() + i * out_channels_ * area, out_channels_, area);
      out.noalias() = w * ConstMatMap<T>(cols.data(), rows, area);
      out.colwise() += b;
    }
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    Tensor<T> y = infer(x);
    input_ = x;
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    const std::size_t n = input_.rank() ? input_.dim(0) : 0;
    this->check_output_grad(dy, n);
    const std::size_t rows = patch_rows();
    const std::size_t area = out_area();
    MatMap<T> dw(weight_.grad.data(), out_channels_, rows);
    ConstMatMap<T> w(weight_.value.data(), out_channels_, rows);
    dw.setZero();
    std::vector<double> db(out_channels_, 0.0);

    Tensor<T> dx(batched(n, this->input_shape_));
    std::vector<T> cols(rows * area);
    std::vector<T> dcols(rows * area);
    for (std::size_t i = 0; i < n; ++i) {
      ConstMatMap<T> g(dy.data() + i * out_channels_ * area, out_channels_, area);
      im2col(input_.data() + i * in_channels_ * height_ * width_, cols.data());
      dw.noalias() += g * ConstMatMap<T>(cols.data(), rows, area).transpose();
      // row sums, same reason as add_column_sums
      for (std::size_t o = 0; o < out_channels_; ++o) {
        const T* row = dy.data() + (i * out_channels_ + o) * area;
        double acc = 0.0;
        for (std::size_t k = 0; k < area; ++k) acc += row[k];
        db[o] += acc;
      }
      MatMap<T>(dcols.data(), rows, area).noalias() = w.transpose() * g;
      col2im(dcols.data(), dx.data() + i * in_channels_ * height_ * width_);
    }
    for (std::size_t o = 0; o < out_channels_; ++o) bias_.grad[o] = static_cast<T>(db[o]);
    return dx;
  }

  std::vector<Param<T>*> params() override { return {&weight_, &bias_}; }

  void initialize(std::mt19937_64& rng, bool relu_follows) override {
    const std::size_t k2 = kernel_ * kernel_;
    uniform_init(weight_.value,
                 init_limit(in_channels_ * k2, out_channels_ * k2, relu_follows), rng);
    bias_.value.fill(T{0});
  }

 private:
  std::size_t patch_rows() const { return in_channels_ * kernel_ * kernel_; }
  std::size_t out_area() const { return out_h_ * out_w_; }

  // Output columns [lo, hi) whose input column ow*stride + kj - pad is in range.
  std::pair<std::size_t, std::size_t> valid_cols(std::size_t kj) const {
    std::size_t lo = 0;
    while (lo < out_w_ && lo * stride_ + kj < pad_) ++lo;
    std::size_t hi = lo;
    while (hi < out_w_ && hi * stride_ + kj < pad_ + width_) ++hi;
    return {lo, hi};
  }

  void im2col(const T* img, T* cols) const {
    const std::size_t area = out_area();
    for (std::size_t c = 0; c < in_channels_; ++c) {
      for (std::size_t ki = 0; ki < kernel_; ++ki) {
        for (std::size_t kj = 0; kj < kernel_; ++kj) {
          T* row = cols + ((c * kernel_ + ki) * kernel_ + kj) * area;
          const auto [lo, hi] = valid_cols(kj);
          for (std::size_t oh = 0; oh < out_h_; ++oh) {
            T* dst = row + oh * out_w_;
            const std::size_t ih = oh * stride_ + ki;
            if (ih < pad_ || ih >= pad_ + height_ || lo >= hi) {
              std::fill(dst, dst + out_w_, T{0});
              continue;
            }
            const T* src = img + (c * height_ + ih - pad_) * width_ + (lo * stride_ + kj - pad_);
            std::fill(dst, dst + lo, T{0});
            if (stride_ == 1) {
              std::copy(src, src + (hi - lo), dst + lo);
            } else {
              for (std::size_t ow = lo; ow < hi; ++ow) dst[ow] = src[(ow - lo) * stride_];
            }
            std::fill(dst + hi, dst + out_w_, T{0});
          }
        }
      }
    }
  }

  void col2im(const T* cols, T* img) const {
    const std::size_t area = out_area();
    for (std::size_t c = 0; c < in_channels_; ++c) {
      for (std::size_t ki = 0; ki < kernel_; ++ki) {
        for (std::size_t kj = 0; kj < kernel_; ++kj) {
          const T* row = cols + ((c * kernel_ + ki) * kernel_ + kj) * area;
          const auto [lo, hi] = valid_cols(kj);
          if (lo >= hi) continue;
          for (std::size_t oh = 0; oh < out_h_; ++oh) {
            const std::size_t ih = oh * stride_ + ki;
            if (ih < pad_ || ih >= pad_ + height_) continue;
            T* dst = img + (c * height_ + ih - pad_) * width_ + (lo * stride_ + kj - pad_);
            const T* src = row + oh * out_w_;
            for (std::size_t ow = lo; ow < hi; ++ow) dst[(ow - lo) * stride_] += src[ow];
          }
        }
      }
    }
  }

  std::size_t out_channels_, kernel_, stride_, pad_;
  std::size_t in_channels_, height_, width_;
  std::size_t out_h_, out_w_;
  Param<T> weight_;
  Param<T> bias_;
  Tensor<T> input_;
};

// ---------------------------------------------------------------------------

/// Normalizes each channel (rank-3 input) or feature (rank-1 input) over the
/// batch and spatial positions.
template <typename T>
class BatchNorm final : public Layer<T> {
 public:
  BatchNorm(const Shape& in)
      : Layer<T>(in),
        channels_(in.at(0)),
        spatial_(shape_size(in) / in.at(0)),
        gamma_(make_param<T>("gamma", {channels_})),
        beta_(make_param<T>("beta", {channels_})),
        running_mean_(make_param<T>("running_mean", {channels_})),
        running_var_(make_param<T>("running_var", {channels_})) {
    gamma_.value.fill(T{1});
    running_var_.value.fill(T{1});
  }

  LayerSpec spec() const override { return LayerSpec::of(LayerKind::kBatchNorm); }
  Shape output_shape() const override { return this->input_shape_; }

  Tensor<T> infer(const Tensor<T>& x) const override {
    this->check_input(x);
    Tensor<T> y(x.shape());
    const std::size_t n = x.dim(0);
    for (std::size_t c = 0; c < channels_; ++c) {
      const T scale = gamma_.value[c] /
                      static_cast<T>(std::sqrt(static_cast<double>(running_var_.value[c]) +
                                               kBatchNormEpsilon));
      const T shift = beta_.value[c] - scale * running_mean_.value[c];
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t base = (i * channels_ + c) * spatial_;
        for (std::size_t s = 0; s < spatial_; ++s) y[base + s] = scale * x[base + s] + shift;
      }
    }
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    this->check_input(x);
    const std::size_t n = x.dim(0);
    const double count = static_cast<double>(n * spatial_);
    Tensor<T> y(x.shape());
    normalized_ = Tensor<T>(x.shape());
    inv_std_.assign(channels_, T{0});
    for (std::size_t c = 0; c < channels_; ++c) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t base = (i * channels_ + c) * spatial_;
        for (std::size_t s = 0; s < spatial_; ++s) sum += x[base + s];
      }
      const double mean = sum / count;
      double sq = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t base = (i * channels_ + c) * spatial_;
        for (std::size_t s = 0; s < spatial_; ++s) {
          const double d = x[base + s] - mean;
          sq += d * d;
        }
      }
      const double var = sq / count;
      const double inv_std = 1.0 / std::sqrt(var + kBatchNormEpsilon);
      inv_std_[c] = static_cast<T>(inv_std);
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t base = (i * channels_ + c) * spatial_;
        for (std::size_t s = 0; s < spatial_; ++s) {
          const T xhat = static_cast<T>((x[base + s] - mean) * inv_std);
          normalized_[base + s] = xhat;
          y[base + s] = gamma_.value[c] * xhat + beta_.value[c];
        }
      }
      running_mean_.value[c] = static_cast<T>(kBatchNormMomentum * running_mean_.value[c] +
                                              (1.0 - kBatchNormMomentum) * mean);
      running_var_.value[c] = static_cast<T>(kBatchNormMomentum * running_var_.value[c] +
                                             (1.0 - kBatchNormMomentum) * var);
    }
    return y;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    const std::size_t n = normalized_.dim(0);
    this->check_output_grad(dy, n);
    const double count = static_cast<double>(n * spatial_);
    Tensor<T> dx(dy.shape());
    for (std::size_t c = 0; c < channels_; ++c) {
      double sum_dy = 0.0, sum_dy_xhat = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t base = (i * channels_ + c) * spatial_;
        for (std::size_t s = 0; s < spatial_; ++s) {
          sum_dy += dy[base + s];
          sum_dy_xhat += dy[base + s] * normalized_[base + s];
        }
      }
      gamma_.grad[c] = static_cast<T>(sum_dy_xhat);
      beta_.grad[c] = static_cast<T>(sum_dy);
      // dx = gamma * inv_std / M * (M * dy - sum(dy) - xhat * sum(dy * xhat))
      const double k = gamma_.value[c] * inv_std_[c] / count;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t base = (i * channels_ + c) * spatial_;
        for (std::size_t s = 0; s < spatial_; ++s) {
          dx[base + s] = static_cast<T>(
              k * (count * dy[base + s] - sum_dy - normalized_[base + s] * sum_dy_xhat));
        }
      }
    }
    return dx;
  }

  std::vector<Param<T>*> params() override { return {&gamma_, &beta_}; }
  std::vector<Param<T>*> buffers() override { return {&running_mean_, &running_var_}; }

  void initialize(std::mt19937_64&, bool) override {
    gamma_.value.fill(T{1});
    beta_.value.fill(T{0});
    running_mean_.value.fill(T{0});
    running_var_.value.fill(T{1});
  }

 private:
  std::size_t channels_;
  std::size_t spatial_;
  Param<T> gamma_, beta_;
  Param<T> running_mean_, running_var_;
  Tensor<T> normalized_;
  std::vector<T> inv_std_;
};

// ---------------------------------------------------------------------------

template <typename T>
class ReLU final : public Layer<T> {
 public:
  using Layer<T>::Layer;

  LayerSpec spec() const override { return LayerSpec::of(LayerKind::kReLU); }
  Shape output_shape() const override { return this->input_shape_; }

  Tensor<T> infer(const Tensor<T>& x) const override {
    this->check_input(x);
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::max(x[i], T{0});
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    input_ = x;
    return infer(x);
  }

  // The derivative at exactly 0 is taken as 0.
  Tensor<T> backward(const Tensor<T>& dy) override {
    this->check_output_grad(dy, input_.dim(0));
    Tensor<T> dx(dy.shape());
    for (std::size_t i = 0; i < dy.size(); ++i) dx[i] = input_[i] > T{0} ? dy[i] : T{0};
    return dx;
  }

 private:
  Tensor<T> input_;
};

// ---------------------------------------------------------------------------

/// 2x2 max pooling, stride 2; odd trailing rows/columns are dropped.
template <typename T>
class MaxPool2 final : public Layer<T> {
 public:
  MaxPool2(const Shape& in)
      : Layer<T>(in), channels_(in.at(0)), height_(in.at(1)), width_(in.at(2)) {}

  LayerSpec spec() const override { return LayerSpec::of(LayerKind::kMaxPool2); }
  Shape output_shape() const override { return {channels_, height_ / 2, width_ / 2}; }

  Tensor<T> infer(const Tensor<T>& x) const override {
    std::vector<std::size_t> unused;
    return pool(x, unused);
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    batch_ = x.rank() > 0 ? x.dim(0) : 0;
    return pool(x, argmax_);
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    this->check_output_grad(dy, batch_);
    Tensor<T> dx(batched(batch_, this->input_shape_));
    for (std::size_t i = 0; i < dy.size(); ++i) dx[argmax_[i]] += dy[i];
    return dx;
  }

 private:
  Tensor<T> pool(const Tensor<T>& x, std::vector<std::size_t>& argmax) const {
    this->check_input(x);
    const std::size_t n = x.dim(0);
    const std::size_t oh = height_ / 2, ow = width_ / 2;
    Tensor<T> y(batched(n, output_shape()));
    argmax.assign(y.size(), 0);
    std::size_t o = 0;
    for (std::size_t plane = 0; plane < n * channels_; ++plane) {
      const std::size_t base = plane * height_ * width_;
      for (std::size_t r = 0; r < oh; ++r) {
        for (std::size_t c = 0; c < ow; ++c, ++o) {
          std::size_t best = base + (2 * r) * width_ + 2 * c;
          for (std::size_t dr = 0; dr < 2; ++dr) {
            for (std::size_t dc = 0; dc < 2; ++dc) {
              const std::size_t idx = base + (2 * r + dr) * width_ + 2 * c + dc;
              if (x[idx] > x[best]) best = idx;
            }
          }
          y[o] = x[best];
          argmax[o] = best;
        }
      }
    }
    return y;
  }

  std::size_t channels_, height_, width_;
  std::vector<std::size_t> argmax_;
  std::size_t batch_ = 0;
};

// ---------------------------------------------------------------------------

template <typename T>
class Flatten final : public Layer<T> {
 public:
  using Layer<T>::Layer;

  LayerSpec spec() const override { return LayerSpec::of(LayerKind::kFlatten); }
  Shape output_shape() const override { return {shape_size(this->input_shape_)}; }

  Tensor<T> infer(const Tensor<T>& x) const override {
    this->check_input(x);
    Tensor<T> y = x;
    y.reshape(batched(x.dim(0), output_shape()));
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    batch_ = x.rank() > 0 ? x.dim(0) : 0;
    return infer(x);
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    this->check_output_grad(dy, batch_);
    Tensor<T> dx = dy;
    dx.reshape(batched(batch_, this->input_shape_));
    return dx;
  }

 private:
  std::size_t batch_ = 0;
};

// ---------------------------------------------------------------------------

/// Row-wise softmax with max subtraction.
template <typename T>
class Softmax final : public Layer<T> {
 public:
  using Layer<T>::Layer;

  LayerSpec spec() const override { return LayerSpec::of(LayerKind::kSoftmax); }
  Shape output_shape() const override { return this->input_shape_; }

  Tensor<T> infer(const Tensor<T>& x) const override {
    this->check_input(x);
    const std::size_t n = x.dim(0);
    const std::size_t k = this->input_shape_[0];
    Tensor<T> y(x.shape());
    for (std::size_t i = 0; i < n; ++i) {
      const T* row = x.data() + i * k;
      T* out = y.data() + i * k;
      const T peak = *std::max_element(row, row + k);
      T sum{0};
      for (std::size_t j = 0; j < k; ++j) {
        out[j] = std::exp(row[j] - peak);
        sum += out[j];
      }
      for (std::size_t j = 0; j < k; ++j) out[j] /= sum;
    }
    return y;
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    output_ = infer(x);
    return output_;
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    const std::size_t n = output_.dim(0);
    this->check_output_grad(dy, n);
    const std::size_t k = this->input_shape_[0];
    Tensor<T> dx(dy.shape());
    for (std::size_t i = 0; i < n; ++i) {
      const T* p = output_.data() + i * k;
      const T* g = dy.data() + i * k;
      T dot{0};
      for (std::size_t j = 0; j < k; ++j) dot += g[j] * p[j];
      for (std::size_t j = 0; j < k; ++j) dx[i * k + j] = p[j] * (g[j] - dot);
    }
    return dx;
  }

 private:
  Tensor<T> output_;
};

void require_rank(const LayerSpec& spec, const Shape& in, std::size_t rank) {
  if (in.size() != rank) {
    throw Error(ErrorCode::kShapeMismatch, layer_kind_name(spec.kind) + " needs rank-" +
                                               std::to_string(rank) + " input, got " +
                                               shape_string(in));
  }
}

}  // namespace

Shape layer_output_shape(const LayerSpec& spec, const Shape& in) {
  return make_layer<float>(spec, in)->output_shape();
}

template <typename T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& spec, const Shape& in) {
  if (in.empty() || shape_size(in) == 0) {
    throw Error(ErrorCode::kShapeMismatch, "empty input shape for " + layer_kind_name(spec.kind));
  }
  switch (spec.kind) {
    case LayerKind::kConv2D:
      require_rank(spec, in, 3);
      if (spec.units == 0 || spec.kernel == 0 || spec.stride == 0 ||
          in[1] + 2 * spec.pad < spec.kernel || in[2] + 2 * spec.pad < spec.kernel) {
        throw Error(ErrorCode::kShapeMismatch,
                    "conv2d geometry does not fit input " + shape_string(in));
      }
      return std::make_unique<Conv2D<T>>(spec, in);
    case LayerKind::kBatchNorm:
      if (in.size() != 1 && in.size() != 3) require_rank(spec, in, 3);
      return std::make_unique<BatchNorm<T>>(in);
    case LayerKind::kReLU: return std::make_unique<ReLU<T>>(in);
    case LayerKind::kMaxPool2:
      require_rank(spec, in, 3);
      if (in[1] < 2 || in[2] < 2) {
        throw Error(ErrorCode::kShapeMismatch, "maxpool2 input too small: " + shape_string(in));
      }
      return std::make_unique<MaxPool2<T>>(in);
    case LayerKind::kFlatten: return std::make_unique<Flatten<T>>(in);
    case LayerKind::kDense:
      require_rank(spec, in, 1);
      if (spec.units == 0) throw Error(ErrorCode::kShapeMismatch, "dense needs units > 0");
      return std::make_unique<Dense<T>>(spec, in);
    case LayerKind::kLSTM: return detail::make_lstm<T>(spec, in);
    case LayerKind::kSoftmax:
      require_rank(spec, in, 1);
      return std::make_unique<Softmax<T>>(in);
  }
  throw Error(ErrorCode::kShapeMismatch, "unknown layer kind");
}

template class Layer<float>;
template class Layer<double>;
template std::unique_ptr<Layer<float>> make_layer<float>(const LayerSpec&, const Shape&);
template std::unique_ptr<Layer<double>> make_layer<double>(const LayerSpec&, const Shape&);

}  // namespace airpad::nn

// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <vector>

#include "eigen_util.hpp"
#include "lstm_layer.hpp"

namespace airpad::nn::detail {
namespace {

template <typename T>
using StepMap = Eigen::Map<const Mat<T>, 0, Eigen::OuterStride<>>;

template <typename T>
using MutStepMap = Eigen::Map<Mat<T>, 0, Eigen::OuterStride<>>;

/// Unidirectional LSTM over [T, F] (or [1, T, F]) returning the last hidden
/// state. Gate order in the packed weights is i, f, g, o.
template <typename T>
class Lstm final : public Layer<T> {
 public:
  Lstm(const LayerSpec& spec, const Shape& in)
      : Layer<T>(in),
        hidden_(spec.units),
        steps_(in[in.size() - 2]),
        features_(in.back()),
        wx_({"wx", Tensor<T>({features_, 4 * hidden_}), Tensor<T>({features_, 4 * hidden_})}),
        wh_({"wh", Tensor<T>({hidden_, 4 * hidden_}), Tensor<T>({hidden_, 4 * hidden_})}),
        bias_({"bias", Tensor<T>({4 * hidden_}), Tensor<T>({4 * hidden_})}) {}

  LayerSpec spec() const override { return LayerSpec::lstm(hidden_); }
  Shape output_shape() const override { return {hidden_}; }

  Tensor<T> infer(const Tensor<T>& x) const override {
    this->check_input(x);
    const std::size_t n = x.dim(0);
    Mat<T> h = Mat<T>::Zero(n, hidden_);
    Mat<T> c = Mat<T>::Zero(n, hidden_);
    Mat<T> gates(n, 4 * hidden_);
    for (std::size_t t = 0; t < steps_; ++t) {
      step(x, t, h, gates);
      c = gates.middleCols(hidden_, hidden_).cwiseProduct(c) +
          gates.leftCols(hidden_).cwiseProduct(gates.middleCols(2 * hidden_, hidden_));
      h = gates.rightCols(hidden_).cwiseProduct(c.unaryExpr([](T v) { return std::tanh(v); }));
    }
    return to_tensor(h);
  }

  Tensor<T> forward(const Tensor<T>& x) override {
    this->check_input(x);
    const std::size_t n = x.dim(0);
    input_ = x;
    gates_.assign(steps_, Mat<T>(n, 4 * hidden_));
    cells_.assign(steps_ + 1, Mat<T>::Zero(n, hidden_));
    hiddens_.assign(steps_ + 1, Mat<T>::Zero(n, hidden_));
    for (std::size_t t = 0; t < steps_; ++t) {
      Mat<T>& g = gates_[t];
      step(x, t, hiddens_[t], g);
      cells_[t + 1] = g.middleCols(hidden_, hidden_).cwiseProduct(cells_[t]) +
                      g.leftCols(hidden_).cwiseProduct(g.middleCols(2 * hidden_, hidden_));
      hiddens_[t + 1] = g.rightCols(hidden_).cwiseProduct(
          cells_[t + 1].unaryExpr([](T v) { return std::tanh(v); }));
    }
    return to_tensor(hiddens_[steps_]);
  }

  Tensor<T> backward(const Tensor<T>& dy) override {
    const std::size_t n = input_.dim(0);
    this->check_output_grad(dy, n);
    const std::size_t H = hidden_;
    MatMap<T> dwx(wx_.grad.data(), features_, 4 * H);
    MatMap<T> dwh(wh_.grad.data(), H, 4 * H);
    dwx.setZero();
    dwh.setZero();
    bias_.grad.fill(T{0});
    ConstMatMap<T> wx(wx_.value.data(), features_, 4 * H);
    ConstMatMap<T> wh(wh_.value.data(), H, 4 * H);

    Tensor<T> dx(input_.shape());
    Mat<T> dh = ConstMatMap<T>(dy.data(), n, H);
    Mat<T> dc = Mat<T>::Zero(n, H);
    Mat<T> dz(n, 4 * H);
    const Eigen::Index stride = static_cast<Eigen::Index>(steps_ * features_);
    for (std::size_t t = steps_; t-- > 0;) {
      const Mat<T>& g = gates_[t];
      auto i = g.leftCols(H).array();
      auto f = g.middleCols(H, H).array();
      auto cand = g.middleCols(2 * H, H).array();
      auto o = g.rightCols(H).array();
      const auto tc = cells_[t + 1].array().tanh().eval();
      dc.array() += dh.array() * o * (T{1} - tc * tc);
      dz.leftCols(H).array() = dc.array() * cand * i * (T{1} - i);
      dz.middleCols(H, H).array() = dc.array() * cells_[t].array() * f * (T{1} - f);
      dz.middleCols(2 * H, H).array() = dc.array() * i * (T{1} - cand * cand);
      dz.rightCols(H).array() = dh.array() * tc * o * (T{1} - o);
      dc.array() *= f;

      StepMap<T> xt(input_.data() + t * features_, n, features_, Eigen::OuterStride<>(stride));
      dwx.noalias() += xt.transpose() * dz;
      dwh.noalias() += hiddens_[t].transpose() * dz;
      add_column_sums(dz.data(), n, 4 * H, bias_.grad.data());
      MutStepMap<T>(dx.data() + t * features_, n, features_, Eigen::OuterStride<>(stride))
          .noalias() = dz * wx.transpose();
      dh.noalias() = dz * wh.transpose();
    }
    return dx;
  }

  std::vector<Param<T>*> params() override { return {&wx_, &wh_, &bias_}; }

  void initialize(std::mt19937_64& rng, bool) override {
    auto glorot = [&rng](Tensor<T>& w, std::size_t fan_in, std::size_t fan_out) {
      const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
      std::uniform_real_distribution<double> dist(-limit, limit);
      for (auto& v : w.values()) v = static_cast<T>(dist(rng));
    };
    glorot(wx_.value, features_, 4 * hidden_);
    glorot(wh_.value, hidden_, 4 * hidden_);
    bias_.value.fill(T{0});
  }

 private:
  // Fills `gates` with activated i, f, g, o for step t.
  void step(const Tensor<T>& x, std::size_t t, const Mat<T>& h, Mat<T>& gates) const {
    const std::size_t n = x.dim(0);
    const std::size_t H = hidden_;
    StepMap<T> xt(x.data() + t * features_, n, features_,
                  Eigen::OuterStride<>(static_cast<Eigen::Index>(steps_ * features_)));
    gates.noalias() = xt * ConstMatMap<T>(wx_.value.data(), features_, 4 * H);
    gates.noalias() += h * ConstMatMap<T>(wh_.value.data(), H, 4 * H);
    gates.rowwise() += ConstRowVecMap<T>(bias_.value.data(), 4 * H);
    auto sigmoid = [](T v) { return T{1} / (T{1} + std::exp(-v)); };
    gates.leftCols(2 * H) = gates.leftCols(2 * H).unaryExpr(sigmoid);
    gates.middleCols(2 * H, H) = gates.middleCols(2 * H, H).array().tanh();
    gates.rightCols(H) = gates.rightCols(H).unaryExpr(sigmoid);
  }

  Tensor<T> to_tensor(const Mat<T>& h) const {
    Tensor<T> y({static_cast<std::size_t>(h.rows()), hidden_});
    MatMap<T>(y.data(), h.rows(), hidden_) = h;
    return y;
  }

  std::size_t hidden_, steps_, features_;
  Param<T> wx_, wh_, bias_;
  Tensor<T> input_;
  std::vector<Mat<T>> gates_, cells_, hiddens_;
};

}  // namespace

template <typename T>
std::unique_ptr<Layer<T>> make_lstm(const LayerSpec& spec, const Shape& in) {
  const bool ok = (in.size() == 2 || (in.size() == 3 && in[0] == 1)) && spec.units > 0;
  if (!ok) {
    throw Error(ErrorCode::kShapeMismatch,
                "lstm needs [T,F] or [1,T,F] input, got " + shape_string(in));
  }
  return std::make_unique<Lstm<T>>(spec, in);
}

template std::unique_ptr<Layer<float>> make_lstm<float>(const LayerSpec&, const Shape&);
template std::unique_ptr<Layer<double>> make_lstm<double>(const LayerSpec&, const Shape&);

}  // namespace airpad::nn::detail

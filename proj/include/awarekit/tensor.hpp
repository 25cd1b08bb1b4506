#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace awarekit {

using Index = Eigen::Index;

class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense row-major tensor. Feature maps and images are rank-3 (C, H, W).
template <typename Scalar>
class BasicTensor {
 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Plane = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using PlaneMap = Eigen::Map<Plane>;
  using ConstPlaneMap = Eigen::Map<const Plane>;

  BasicTensor() = default;

  explicit BasicTensor(std::vector<Index> shape) : shape_(std::move(shape)) {
    check_dims();
    data_ = Vector::Zero(element_count(shape_));
  }

  BasicTensor(std::vector<Index> shape, Vector data) : shape_(std::move(shape)), data_(std::move(data)) {
    check_dims();
    if (data_.size() != element_count(shape_)) {
      throw ShapeError("tensor data length " + std::to_string(data_.size()) + " does not match shape product " +
                       std::to_string(element_count(shape_)));
    }
  }

  static BasicTensor constant(std::vector<Index> shape, Scalar value) {
    BasicTensor t(std::move(shape));
    t.data_.setConstant(value);
    return t;
  }

  static Index element_count(const std::vector<Index>& shape) {
    return std::accumulate(shape.begin(), shape.end(), Index{1}, std::multiplies<>());
  }

  const std::vector<Index>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  Index dim(std::size_t i) const { return shape_.at(i); }
  Index size() const { return data_.size(); }
  bool empty() const { return shape_.empty(); }

  Vector& data() { return data_; }
  const Vector& data() const { return data_; }

  // Rank-3 accessors.
  Index channels() const { return shape_.at(0); }
  Index height() const { return shape_.at(1); }
  Index width() const { return shape_.at(2); }
  Index plane_size() const { return shape_.at(1) * shape_.at(2); }

  PlaneMap plane(Index c) { return PlaneMap(data_.data() + c * plane_size(), height(), width()); }
  ConstPlaneMap plane(Index c) const {
    return ConstPlaneMap(data_.data() + c * plane_size(), height(), width());
  }
  auto channel(Index c) { return data_.segment(c * plane_size(), plane_size()); }
  auto channel(Index c) const { return data_.segment(c * plane_size(), plane_size()); }

  Scalar& at(Index c, Index y, Index x) { return data_[(c * height() + y) * width() + x]; }
  Scalar at(Index c, Index y, Index x) const { return data_[(c * height() + y) * width() + x]; }

  bool all_finite() const { return data_.allFinite(); }

  void require_rank3(const char* what) const {
    if (rank() != 3) throw ShapeError(std::string(what) + ": expected a C x H x W tensor");
  }

 private:
  void check_dims() const {
    for (Index d : shape_) {
      if (d <= 0) throw ShapeError("tensor dimensions must be positive");
    }
  }

  std::vector<Index> shape_;
  Vector data_;
};

using Tensor = BasicTensor<float>;

/// Same shape and identical bit patterns.
template <typename Scalar>
bool bit_equal(const BasicTensor<Scalar>& a, const BasicTensor<Scalar>& b) {
  return a.shape() == b.shape() &&
         std::memcmp(a.data().data(), b.data().data(), sizeof(Scalar) * static_cast<std::size_t>(a.size())) == 0;
}

inline constexpr double kStdFloor = 1e-5;

template <typename Scalar>
struct SpatialStats {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> std;  // floored at kStdFloor
};

/// 3x3 cross-correlation, stride 1, zero padding 1. weights are O x C x 3 x 3.
template <typename Scalar>
BasicTensor<Scalar> conv2d(const BasicTensor<Scalar>& input, const BasicTensor<Scalar>& weights,
                           const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& bias) {
  input.require_rank3("conv2d input");
  if (weights.rank() != 4 || weights.dim(2) != 3 || weights.dim(3) != 3) {
    throw ShapeError("conv2d: weights must be O x C x 3 x 3");
  }
  const Index c_in = input.channels(), h = input.height(), w = input.width();
  const Index c_out = weights.dim(0);
  if (weights.dim(1) != c_in) {
    throw ShapeError("conv2d: weight channels " + std::to_string(weights.dim(1)) + " != input channels " +
                     std::to_string(c_in));
  }
  if (bias.size() != c_out) throw ShapeError("conv2d: bias length does not match output channels");

  // im2col: row (c, ky, kx), column pixel.
  using RowMajor = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMajor cols = RowMajor::Zero(c_in * 9, h * w);
  for (Index c = 0; c < c_in; ++c) {
    const auto src = input.plane(c);
    for (Index ky = 0; ky < 3; ++ky) {
      for (Index kx = 0; kx < 3; ++kx) {
        const Index row = c * 9 + ky * 3 + kx;
        for (Index y = 0; y < h; ++y) {
          const Index sy = y + ky - 1;
          if (sy < 0 || sy >= h) continue;
          for (Index x = 0; x < w; ++x) {
            const Index sx = x + kx - 1;
            if (sx < 0 || sx >= w) continue;
            cols(row, y * w + x) = src(sy, sx);
          }
        }
      }
    }
  }

  BasicTensor<Scalar> out({c_out, h, w});
  Eigen::Map<const RowMajor> kernel(weights.data().data(), c_out, c_in * 9);
  Eigen::Map<RowMajor> result(out.data().data(), c_out, h * w);
  result.noalias() = kernel * cols;
  result.colwise() += bias;
  return out;
}

template <typename Scalar>
BasicTensor<Scalar> upsample_nearest(const BasicTensor<Scalar>& input, Index factor) {
  input.require_rank3("upsample_nearest input");
  if (factor < 1) throw ShapeError("upsample_nearest: factor must be >= 1");
  const Index c = input.channels(), h = input.height(), w = input.width();
  BasicTensor<Scalar> out({c, h * factor, w * factor});
  for (Index ch = 0; ch < c; ++ch) {
    const auto src = input.plane(ch);
    auto dst = out.plane(ch);
    for (Index y = 0; y < h * factor; ++y) {
      for (Index x = 0; x < w * factor; ++x) dst(y, x) = src(y / factor, x / factor);
    }
  }
  return out;
}

/// Per-channel standardization over the spatial plane using population statistics.
template <typename Scalar>
std::pair<BasicTensor<Scalar>, SpatialStats<Scalar>> spatial_normalize(const BasicTensor<Scalar>& input) {
  input.require_rank3("spatial_normalize input");
  const Index c = input.channels();
  const double n = static_cast<double>(input.plane_size());
  BasicTensor<Scalar> out(input.shape());
  SpatialStats<Scalar> stats;
  stats.mean.resize(c);
  stats.std.resize(c);
  for (Index ch = 0; ch < c; ++ch) {
    const auto x = input.channel(ch).template cast<double>();
    const double mean = x.sum() / n;
    const double var = (x.array() - mean).square().sum() / n;
    const double sd = std::max(std::sqrt(var), kStdFloor);
    out.channel(ch) = ((x.array() - mean) / sd).template cast<Scalar>().matrix();
    stats.mean[ch] = static_cast<Scalar>(mean);
    stats.std[ch] = static_cast<Scalar>(sd);
  }
  return {std::move(out), std::move(stats)};
}

/// Affine map weights * input + bias with weights stored row-major (m x n).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> dense(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& input,
                                               const BasicTensor<Scalar>& weights,
                                               const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& bias) {
  if (weights.rank() != 2) throw ShapeError("dense: weights must be rank 2");
  const Index m = weights.dim(0), n = weights.dim(1);
  if (input.size() != n) {
    throw ShapeError("dense: input length " + std::to_string(input.size()) + " != weight columns " +
                     std::to_string(n));
  }
  if (bias.size() != m) throw ShapeError("dense: bias length does not match weight rows");
  using RowMajor = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMajor> w(weights.data().data(), m, n);
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out = bias;
  out.noalias() += w * input;
  return out;
}

enum class Activation { relu, tanh };

template <typename Scalar>
BasicTensor<Scalar> activate(BasicTensor<Scalar> input, Activation kind) {
  auto a = input.data().array();
  if (kind == Activation::relu) {
    a = a.max(Scalar(0));
  } else {
    a = a.tanh();
  }
  return input;
}

}  // namespace awarekit

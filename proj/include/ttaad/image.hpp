#ifndef TTAAD_IMAGE_HPP
#define TTAAD_IMAGE_HPP

#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ttaad/error.hpp"

namespace ttaad {

using Index = Eigen::Index;

/// One channel of a raster, stored row-major so that (row, col) = (y, x).
template <class Scalar>
using Plane = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// H x W x C raster with every value finite and in [0,1].
///
/// Channels are kept as separate planes; `interleaved()` gives the row-major,
/// channel-last layout used by files and by the classifier input.
template <class Scalar>
class BasicImage {
 public:
  using PlaneType = Plane<Scalar>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  BasicImage() = default;

  BasicImage(Index height, Index width, Index channels = 1) {
    if (height < 1 || width < 1 || channels < 1) {
      throw InputError("image dimensions must be positive");
    }
    planes_.assign(static_cast<std::size_t>(channels), PlaneType::Zero(height, width));
  }

  explicit BasicImage(std::vector<PlaneType> planes) : planes_(std::move(planes)) {
    if (planes_.empty()) throw InputError("image needs at least one channel");
    const Index h = planes_.front().rows();
    const Index w = planes_.front().cols();
    if (h < 1 || w < 1) throw InputError("image dimensions must be positive");
    for (const auto& p : planes_) {
      if (p.rows() != h || p.cols() != w) throw InputError("channel planes differ in size");
      for (Index i = 0; i < p.size(); ++i) {
        const Scalar v = p.data()[i];
        if (!std::isfinite(v) || v < Scalar(0) || v > Scalar(1)) {
          throw InputError("pixel value " + std::to_string(static_cast<double>(v)) +
                           " outside [0,1]");
        }
      }
    }
  }

  explicit BasicImage(PlaneType plane) : BasicImage(std::vector<PlaneType>{std::move(plane)}) {}

  /// Builds from row-major, channel-last values.
  static BasicImage from_interleaved(Index height, Index width, Index channels,
                                     std::span<const Scalar> data) {
    if (height < 1 || width < 1 || channels < 1) {
      throw InputError("image dimensions must be positive");
    }
    if (static_cast<Index>(data.size()) != height * width * channels) {
      throw InputError("image data length does not match height*width*channels");
    }
    std::vector<PlaneType> planes(static_cast<std::size_t>(channels), PlaneType(height, width));
    for (Index y = 0; y < height; ++y) {
      for (Index x = 0; x < width; ++x) {
        for (Index c = 0; c < channels; ++c) {
          planes[static_cast<std::size_t>(c)](y, x) = data[static_cast<std::size_t>((y * width + x) * channels + c)];
        }
      }
    }
    return BasicImage(std::move(planes));
  }

  Index height() const { return planes_.empty() ? 0 : planes_.front().rows(); }
  Index width() const { return planes_.empty() ? 0 : planes_.front().cols(); }
  Index channels() const { return static_cast<Index>(planes_.size()); }

  const PlaneType& plane(Index c) const { return planes_.at(static_cast<std::size_t>(c)); }
  const std::vector<PlaneType>& planes() const { return planes_; }

  Scalar at(Index y, Index x, Index c = 0) const { return plane(c)(y, x); }

  std::vector<Scalar> interleaved() const {
    std::vector<Scalar> out;
    out.reserve(static_cast<std::size_t>(height() * width() * channels()));
    for (Index y = 0; y < height(); ++y) {
      for (Index x = 0; x < width(); ++x) {
        for (const auto& p : planes_) out.push_back(p(y, x));
      }
    }
    return out;
  }

  /// Interleaved values as a column vector; the classifier's input layout.
  Vector flattened() const {
    const auto values = interleaved();
    return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
  }

  friend bool operator==(const BasicImage& a, const BasicImage& b) {
    if (a.planes_.size() != b.planes_.size()) return false;
    for (std::size_t c = 0; c < a.planes_.size(); ++c) {
      if (a.planes_[c].rows() != b.planes_[c].rows() || a.planes_[c].cols() != b.planes_[c].cols() ||
          a.planes_[c] != b.planes_[c]) {
        return false;
      }
    }
    return true;
  }

 private:
  std::vector<PlaneType> planes_;
};

using Image = BasicImage<double>;

/// Clamps every value into [0,1]; the boundary between raw transform output and an Image.
template <class Derived>
Plane<typename Derived::Scalar> clamp_unit(const Eigen::MatrixBase<Derived>& values) {
  using S = typename Derived::Scalar;
  return values.cwiseMax(S(0)).cwiseMin(S(1));
}

}  // namespace ttaad

#endif  // TTAAD_IMAGE_HPP

#ifndef TTAAD_TRANSFORMS_HPP
#define TTAAD_TRANSFORMS_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "ttaad/fft.hpp"
#include "ttaad/image.hpp"

namespace ttaad {

/// H x W complex spectrum, row-major, DC at (0,0) (not shifted).
template <class Scalar>
using Spectrum = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Low-pass cutoff in pixels of centered frequency distance.
class FilterRadius {
 public:
  explicit FilterRadius(double radius) : radius_(radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw InputError("filter radius must be positive and finite");
  }
  double value() const { return radius_; }

 private:
  double radius_;
};

/// Forward unnormalized 2-D DFT of a real plane.
template <class Derived>
Spectrum<typename Derived::Scalar> fft2d(const Eigen::MatrixBase<Derived>& plane) {
  using Scalar = typename Derived::Scalar;
  if (plane.size() == 0) throw InputError("fft2d needs a non-empty plane");
  Spectrum<Scalar> spec = plane.template cast<std::complex<Scalar>>();
  fft2d_inplace(spec, false);
  return spec;
}

/// Single-channel image overload; multi-channel input must be split first.
template <class Scalar>
Spectrum<Scalar> fft2d(const BasicImage<Scalar>& image) {
  if (image.channels() != 1) throw InputError("fft2d expects a single-channel image; split channels first");
  return fft2d(image.plane(0));
}

/// Inverse transform scaled by 1/(H*W), real part, no clamping.
template <class Scalar>
Plane<Scalar> ifft2d_unclamped(const Spectrum<Scalar>& spec) {
  Spectrum<Scalar> work = spec;
  fft2d_inplace(work, true);
  return work.real();
}

/// Inverse transform clamped into [0,1], ready to feed a classifier.
template <class Scalar>
BasicImage<Scalar> ifft2d(const Spectrum<Scalar>& spec) {
  return BasicImage<Scalar>(clamp_unit(ifft2d_unclamped(spec)));
}

/// Centered frequency distance of bin (u, v) in an H x W spectrum.
inline double frequency_distance(Index u, Index v, Index height, Index width) {
  const double du = static_cast<double>(std::min(u, height - u));
  const double dv = static_cast<double>(std::min(v, width - v));
  return std::sqrt(du * du + dv * dv);
}

/// Brick-wall low-pass: zero every bin farther than `radius` from DC.
template <class Scalar>
Spectrum<Scalar> lowpass(const Spectrum<Scalar>& spec, FilterRadius radius) {
  Spectrum<Scalar> out = spec;
  const Index h = spec.rows();
  const Index w = spec.cols();
  for (Index u = 0; u < h; ++u) {
    for (Index v = 0; v < w; ++v) {
      if (frequency_distance(u, v, h, w) > radius.value()) out(u, v) = std::complex<Scalar>(0);
    }
  }
  return out;
}

/// ifft2d(lowpass(fft2d(plane))) without the final clamp.
template <class Derived>
Plane<typename Derived::Scalar> fft_filter_plane_unclamped(const Eigen::MatrixBase<Derived>& plane,
                                                           FilterRadius radius) {
  return ifft2d_unclamped(lowpass(fft2d(plane), radius));
}

/// FFT_r augmentation, applied independently to each channel.
template <class Scalar>
BasicImage<Scalar> fft_filter_image(const BasicImage<Scalar>& image, FilterRadius radius) {
  std::vector<Plane<Scalar>> planes;
  planes.reserve(static_cast<std::size_t>(image.channels()));
  for (const auto& p : image.planes()) planes.push_back(clamp_unit(fft_filter_plane_unclamped(p, radius)));
  return BasicImage<Scalar>(std::move(planes));
}

/// Horizontal flip: reverses column order in every row of every channel.
template <class Scalar>
BasicImage<Scalar> hflip(const BasicImage<Scalar>& image) {
  std::vector<Plane<Scalar>> planes;
  planes.reserve(static_cast<std::size_t>(image.channels()));
  for (const auto& p : image.planes()) planes.push_back(p.rowwise().reverse());
  return BasicImage<Scalar>(std::move(planes));
}

/// The two test-time augmentations.
struct Augmentation {
  enum class Kind { Fft, Flip };
  Kind kind = Kind::Fft;
  double radius = 0.0;  // used by Kind::Fft only

  static Augmentation fft(double radius) {
    static_cast<void>(FilterRadius(radius));
    return {Kind::Fft, radius};
  }
  static Augmentation flip() { return {Kind::Flip, 0.0}; }

  template <class Scalar>
  BasicImage<Scalar> apply(const BasicImage<Scalar>& image) const {
    return kind == Kind::Fft ? fft_filter_image(image, FilterRadius(radius)) : hflip(image);
  }
};

extern template Spectrum<double> fft2d(const BasicImage<double>&);
extern template Plane<double> ifft2d_unclamped(const Spectrum<double>&);
extern template BasicImage<double> ifft2d(const Spectrum<double>&);
extern template Spectrum<double> lowpass(const Spectrum<double>&, FilterRadius);
extern template BasicImage<double> fft_filter_image(const BasicImage<double>&, FilterRadius);
extern template BasicImage<double> hflip(const BasicImage<double>&);

}  // namespace ttaad

#endif  // TTAAD_TRANSFORMS_HPP

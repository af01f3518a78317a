#ifndef TTAAD_FFT_HPP
#define TTAAD_FFT_HPP

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

namespace ttaad {

/// 1-D discrete Fourier transform of arbitrary length.
///
/// Power-of-two lengths use an iterative radix-2 transform; every other length
/// goes through Bluestein's chirp-z identity on a power-of-two convolution.
/// The forward transform is unnormalized; the inverse applies 1/n.
template <class Scalar>
class Fft1d {
 public:
  using Complex = std::complex<Scalar>;

  explicit Fft1d(std::size_t n) : n_(n) {
    if (n_ <= 1) return;
    if (is_pow2(n_)) {
      twiddles_ = make_twiddles(n_);
      return;
    }
    m_ = 1;
    while (m_ < 2 * n_ - 1) m_ <<= 1;
    twiddles_ = make_twiddles(m_);
    // chirp_k = exp(-i*pi*k^2/n); k^2 is reduced mod 2n so the angle stays small.
    chirp_.resize(n_);
    const std::size_t two_n = 2 * n_;
    for (std::size_t k = 0; k < n_; ++k) {
      const std::size_t k2 = (k * k) % two_n;
      const Scalar angle = -std::numbers::pi_v<Scalar> * static_cast<Scalar>(k2) / static_cast<Scalar>(n_);
      chirp_[k] = std::polar(Scalar(1), angle);
    }
    kernel_.assign(m_, Complex(0));
    kernel_[0] = std::conj(chirp_[0]);
    for (std::size_t k = 1; k < n_; ++k) {
      kernel_[k] = std::conj(chirp_[k]);
      kernel_[m_ - k] = std::conj(chirp_[k]);
    }
    radix2(kernel_, false);
  }

  std::size_t size() const { return n_; }

  /// In-place transform of `data` (length must equal size()).
  void transform(std::vector<Complex>& data, bool inverse) const {
    if (n_ <= 1) return;
    if (m_ == 0) {
      radix2(data, inverse);
    } else {
      bluestein(data, inverse);
    }
    if (inverse) {
      const Scalar scale = Scalar(1) / static_cast<Scalar>(n_);
      for (auto& v : data) v *= scale;
    }
  }

 private:
  static bool is_pow2(std::size_t n) { return (n & (n - 1)) == 0; }

  static std::vector<Complex> make_twiddles(std::size_t len) {
    std::vector<Complex> w(len / 2);
    for (std::size_t k = 0; k < w.size(); ++k) {
      const Scalar angle = -Scalar(2) * std::numbers::pi_v<Scalar> * static_cast<Scalar>(k) / static_cast<Scalar>(len);
      w[k] = std::polar(Scalar(1), angle);
    }
    return w;
  }

  // Unscaled radix-2 transform; `twiddles_` must have been built for data.size().
  void radix2(std::vector<Complex>& data, bool inverse) const {
    const std::size_t len = data.size();
    for (std::size_t i = 1, j = 0; i < len; ++i) {
      std::size_t bit = len >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(data[i], data[j]);
    }
    for (std::size_t half = 1; half < len; half <<= 1) {
      const std::size_t stride = len / (2 * half);
      for (std::size_t start = 0; start < len; start += 2 * half) {
        for (std::size_t k = 0; k < half; ++k) {
          Complex w = twiddles_[k * stride];
          if (inverse) w = std::conj(w);
          const Complex a = data[start + k];
          const Complex b = data[start + k + half] * w;
          data[start + k] = a + b;
          data[start + k + half] = a - b;
        }
      }
    }
  }

  void bluestein(std::vector<Complex>& data, bool inverse) const {
    // The inverse DFT is conj(DFT(conj(x))); the 1/n is applied by the caller.
    std::vector<Complex> work(m_, Complex(0));
    for (std::size_t k = 0; k < n_; ++k) {
      const Complex x = inverse ? std::conj(data[k]) : data[k];
      work[k] = x * chirp_[k];
    }
    radix2(work, false);
    for (std::size_t k = 0; k < m_; ++k) work[k] *= kernel_[k];
    radix2(work, true);
    const Scalar scale = Scalar(1) / static_cast<Scalar>(m_);
    for (std::size_t k = 0; k < n_; ++k) {
      const Complex y = work[k] * scale * chirp_[k];
      data[k] = inverse ? std::conj(y) : y;
    }
  }

  std::size_t n_ = 0;
  std::size_t m_ = 0;  // Bluestein convolution length, 0 for the radix-2 path
  std::vector<Complex> twiddles_;
  std::vector<Complex> chirp_;
  std::vector<Complex> kernel_;
};

/// Row-column 2-D transform of a dense complex matrix, in place.
template <class Derived>
void fft2d_inplace(Eigen::MatrixBase<Derived>& data, bool inverse) {
  using Complex = typename Derived::Scalar;
  using Scalar = typename Complex::value_type;
  const auto rows = static_cast<std::size_t>(data.rows());
  const auto cols = static_cast<std::size_t>(data.cols());

  const Fft1d<Scalar> row_fft(cols);
  std::vector<Complex> buf(cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) buf[c] = data(r, c);
    row_fft.transform(buf, inverse);
    for (std::size_t c = 0; c < cols; ++c) data(r, c) = buf[c];
  }

  const Fft1d<Scalar> col_fft(rows);
  buf.resize(rows);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) buf[r] = data(r, c);
    col_fft.transform(buf, inverse);
    for (std::size_t r = 0; r < rows; ++r) data(r, c) = buf[r];
  }
}

}  // namespace ttaad

#endif  // TTAAD_FFT_HPP

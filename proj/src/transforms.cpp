#include "ttaad/transforms.hpp"

namespace ttaad {

template Spectrum<double> fft2d(const BasicImage<double>&);
template Plane<double> ifft2d_unclamped(const Spectrum<double>&);
template BasicImage<double> ifft2d(const Spectrum<double>&);
template Spectrum<double> lowpass(const Spectrum<double>&, FilterRadius);
template BasicImage<double> fft_filter_image(const BasicImage<double>&, FilterRadius);
template BasicImage<double> hflip(const BasicImage<double>&);

}  // namespace ttaad

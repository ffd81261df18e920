#pragma once

#include <complex>
#include <vector>

namespace dpw {

// In-place iterative radix-2 FFT. n must be a power of two.
// sign = -1: forward (matches X_k = sum_j x_j e^{-2pi i jk/n}); sign = +1: inverse
// without the 1/n scaling.
void fft_radix2(std::vector<std::complex<double>>& a, int sign);

bool is_power_of_two(int n);
int next_power_of_two(int n);

}  // namespace dpw

#pragma once

#include <complex>
#include <vector>

namespace bubbletree {

// In-place radix-2 FFT for power-of-two sizes; inverse includes the 1/n factor.
void fft(std::vector<std::complex<double>>& a, bool inverse);

// Spectral derivative of 2*pi-periodic samples: d/dtheta, with the Nyquist
// mode dropped. Real input, real output, size must be a power of two.
void spectral_theta_derivative(const double* in, double* out, int n);

// Multiply the Fourier coefficients of real periodic samples by a real,
// even-in-m multiplier: multiplier[k] applies to modes +-k, k = 0..n/2.
void spectral_theta_filter(double* data, int n, const std::vector<double>& multiplier);

}  // namespace bubbletree

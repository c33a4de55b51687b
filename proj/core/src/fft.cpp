#include "bubbletree/fft.hpp"

#include <cmath>

namespace bubbletree {

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (n < 2) return;
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * M_PI / double(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse) {
    for (auto& x : a) x /= double(n);
  }
}

void spectral_theta_derivative(const double* in, double* out, int n) {
  std::vector<std::complex<double>> buf(in, in + n);
  fft(buf, false);
  for (int k = 0; k < n; ++k) {
    int m = (k <= n / 2) ? k : k - n;
    if (k == n / 2) m = 0;  // drop the Nyquist mode
    buf[k] *= std::complex<double>(0.0, double(m));
  }
  fft(buf, true);
  for (int k = 0; k < n; ++k) out[k] = buf[k].real();
}

void spectral_theta_filter(double* data, int n, const std::vector<double>& multiplier) {
  std::vector<std::complex<double>> buf(data, data + n);
  fft(buf, false);
  for (int k = 0; k < n; ++k) {
    const int m = std::min(k, n - k);
    buf[k] *= multiplier[m];
  }
  fft(buf, true);
  for (int k = 0; k < n; ++k) data[k] = buf[k].real();
}

}  // namespace bubbletree

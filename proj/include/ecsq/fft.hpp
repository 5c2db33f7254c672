#pragma once
// fft.hpp — radix-2 complex FFT for power-of-two lengths.
//
// The periodic-grid calculus only ever sees power-of-two sample counts, so a
// compact iterative Cooley–Tukey transform covers every use in this library.
// Convention: forward(a) computes X_k = sum_j a_j e^{-2pi i jk/N} (no scaling),
// inverse(a) applies the conjugate transform and divides by N.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace ecsq::fft {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

namespace detail {

inline void bit_reverse_permute(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
}

inline void transform(std::vector<std::complex<double>>& a, bool invert) {
  const std::size_t n = a.size();
  if (!is_power_of_two(n)) throw std::invalid_argument("fft: length must be a power of two");
  bit_reverse_permute(a);
  constexpr double two_pi = 6.283185307179586476925286766559;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (invert ? two_pi : -two_pi) / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (invert) {
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv_n;
  }
}

}  // namespace detail

inline void forward(std::vector<std::complex<double>>& a) { detail::transform(a, false); }
inline void inverse(std::vector<std::complex<double>>& a) { detail::transform(a, true); }

}  // namespace ecsq::fft

#pragma once
// periodic.hpp — smooth p-periodic scalar functions sampled on a uniform grid.
//
// A PeriodicGridFunction stores N samples of a p-periodic function at the
// nodes t_i = i*p/N, with N a power of two, N >= 16.  Calculus is spectral:
// derivatives and antiderivatives act on the discrete Fourier coefficients,
// point evaluation between nodes is band-limited (trigonometric)
// interpolation, and the period integral is the trapezoidal rule, which on a
// uniform periodic grid equals mean * period and is spectrally accurate for
// smooth integrands.
//
// Values are immutable; every operation returns a new function.  All methods
// are const and the type is safe to share across threads.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ecsq/fft.hpp"

namespace ecsq {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

struct Antiderivative;

class PeriodicGridFunction {
 public:
  PeriodicGridFunction(std::vector<double> samples, double period)
      : period_(period), samples_(std::move(samples)) {
    if (!(period_ > 0.0)) throw std::invalid_argument("PeriodicGridFunction: period must be positive");
    const std::size_t n = samples_.size();
    if (n < 16 || !fft::is_power_of_two(n))
      throw std::invalid_argument("PeriodicGridFunction: sample count must be a power of two >= 16");
    for (double v : samples_)
      if (!std::isfinite(v)) throw std::invalid_argument("PeriodicGridFunction: non-finite sample");
    rebuild_spectrum();
  }

  static PeriodicGridFunction from_callable(const std::function<double(double)>& f, double period,
                                            int n) {
    if (!(period > 0.0)) throw std::invalid_argument("from_callable: period must be positive");
    if (n < 16 || !fft::is_power_of_two(static_cast<std::size_t>(n)))
      throw std::invalid_argument("from_callable: sample count must be a power of two >= 16");
    std::vector<double> s(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) s[static_cast<std::size_t>(i)] = f(period * i / n);
    return PeriodicGridFunction(std::move(s), period);
  }

  static PeriodicGridFunction constant(double value, double period, int n) {
    return from_callable([value](double) { return value; }, period, n);
  }

  double period() const { return period_; }
  int size() const { return static_cast<int>(samples_.size()); }
  const std::vector<double>& samples() const { return samples_; }

  // Node t_i = i*p/N of the underlying grid.
  double node(int i) const { return period_ * i / size(); }

  // Sample access with index arithmetic modulo N; sample(i) == sample(i + N) exactly.
  double sample(long i) const {
    const long n = size();
    long r = i % n;
    if (r < 0) r += n;
    return samples_[static_cast<std::size_t>(r)];
  }

  // Band-limited interpolation.  The argument is reduced modulo the period
  // first, so evaluation is periodic by construction.
  double operator()(double t) const {
    double tau = t - period_ * std::floor(t / period_);
    const double theta = kTwoPi * tau / period_;
    const int half = size() / 2;
    double acc = cos_coeff_[0];
    // Recurrence for cos/sin of multiples of theta.
    const double c1 = std::cos(theta), s1 = std::sin(theta);
    double cm = 1.0, sm = 0.0;
    for (int m = 1; m < half; ++m) {
      const double c = cm * c1 - sm * s1;
      const double s = sm * c1 + cm * s1;
      cm = c;
      sm = s;
      acc += cos_coeff_[static_cast<std::size_t>(m)] * cm + sin_coeff_[static_cast<std::size_t>(m)] * sm;
    }
    acc += cos_coeff_[static_cast<std::size_t>(half)] * (cm * c1 - sm * s1);
    return acc;
  }

  PeriodicGridFunction derivative() const {
    const int n = size();
    std::vector<std::complex<double>> c = coeff_;
    const std::complex<double> iunit(0.0, 1.0);
    c[0] = 0.0;
    for (int m = 1; m < n / 2; ++m) {
      const double freq = kTwoPi * m / period_;
      c[static_cast<std::size_t>(m)] *= iunit * freq;
      c[static_cast<std::size_t>(n - m)] *= -iunit * freq;
    }
    c[static_cast<std::size_t>(n / 2)] = 0.0;  // odd operator kills the Nyquist mode
    return from_spectrum(std::move(c), period_);
  }

  // Trapezoidal rule over one period; equals mean * period on this grid.
  double integrate_period() const { return mean() * period_; }

  double mean() const {
    double s = 0.0;
    for (double v : samples_) s += v;
    return s / size();
  }

  Antiderivative antiderivative() const;

  // Exact band-limited resampling to another power-of-two grid.
  PeriodicGridFunction resample(int new_n) const {
    if (new_n < 16 || !fft::is_power_of_two(static_cast<std::size_t>(new_n)))
      throw std::invalid_argument("resample: sample count must be a power of two >= 16");
    const int n = size();
    if (new_n == n) return *this;
    std::vector<std::complex<double>> c(static_cast<std::size_t>(new_n), 0.0);
    const int keep = std::min(n, new_n) / 2;
    c[0] = coeff_[0];
    for (int m = 1; m < keep; ++m) {
      c[static_cast<std::size_t>(m)] = coeff_[static_cast<std::size_t>(m)];
      c[static_cast<std::size_t>(new_n - m)] = coeff_[static_cast<std::size_t>(n - m)];
    }
    if (new_n > n) {
      // split the old Nyquist mode symmetrically
      c[static_cast<std::size_t>(keep)] = 0.5 * coeff_[static_cast<std::size_t>(keep)];
      c[static_cast<std::size_t>(new_n - keep)] = 0.5 * coeff_[static_cast<std::size_t>(keep)];
    } else {
      c[static_cast<std::size_t>(keep)] =
          coeff_[static_cast<std::size_t>(keep)] + coeff_[static_cast<std::size_t>(n - keep)];
    }
    return from_spectrum(std::move(c), period_);
  }

  PeriodicGridFunction apply(const std::function<double(double)>& f) const {
    std::vector<double> s(samples_.size());
    for (std::size_t i = 0; i < samples_.size(); ++i) s[i] = f(samples_[i]);
    return PeriodicGridFunction(std::move(s), period_);
  }

  double min_value() const { return *std::min_element(samples_.begin(), samples_.end()); }
  double max_value() const { return *std::max_element(samples_.begin(), samples_.end()); }
  double max_abs() const {
    double m = 0.0;
    for (double v : samples_) m = std::max(m, std::abs(v));
    return m;
  }

  friend PeriodicGridFunction operator+(const PeriodicGridFunction& a, const PeriodicGridFunction& b) {
    return zip(a, b, [](double x, double y) { return x + y; });
  }
  friend PeriodicGridFunction operator-(const PeriodicGridFunction& a, const PeriodicGridFunction& b) {
    return zip(a, b, [](double x, double y) { return x - y; });
  }
  friend PeriodicGridFunction operator*(const PeriodicGridFunction& a, const PeriodicGridFunction& b) {
    return zip(a, b, [](double x, double y) { return x * y; });
  }
  friend PeriodicGridFunction operator/(const PeriodicGridFunction& a, const PeriodicGridFunction& b) {
    return zip(a, b, [](double x, double y) { return x / y; });
  }
  friend PeriodicGridFunction operator*(double c, const PeriodicGridFunction& a) {
    return a.apply([c](double x) { return c * x; });
  }
  friend PeriodicGridFunction operator*(const PeriodicGridFunction& a, double c) { return c * a; }
  friend PeriodicGridFunction operator+(const PeriodicGridFunction& a, double c) {
    return a.apply([c](double x) { return x + c; });
  }
  friend PeriodicGridFunction operator+(double c, const PeriodicGridFunction& a) { return a + c; }
  friend PeriodicGridFunction operator-(const PeriodicGridFunction& a, double c) { return a + (-c); }
  friend PeriodicGridFunction operator-(double c, const PeriodicGridFunction& a) {
    return a.apply([c](double x) { return c - x; });
  }
  friend PeriodicGridFunction operator-(const PeriodicGridFunction& a) {
    return a.apply([](double x) { return -x; });
  }
  friend PeriodicGridFunction operator/(double c, const PeriodicGridFunction& a) {
    return a.apply([c](double x) { return c / x; });
  }

 private:
  static PeriodicGridFunction from_spectrum(std::vector<std::complex<double>> c, double period) {
    const std::size_t n = c.size();
    for (auto& x : c) x *= static_cast<double>(n);
    fft::inverse(c);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = c[i].real();
    return PeriodicGridFunction(std::move(s), period);
  }

  template <typename F>
  static PeriodicGridFunction zip(const PeriodicGridFunction& a, const PeriodicGridFunction& b, F op) {
    if (a.period_ != b.period_ || a.size() != b.size())
      throw std::invalid_argument("PeriodicGridFunction: mismatched grids");
    std::vector<double> s(a.samples_.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = op(a.samples_[i], b.samples_[i]);
    return PeriodicGridFunction(std::move(s), a.period_);
  }

  void rebuild_spectrum() {
    const std::size_t n = samples_.size();
    std::vector<std::complex<double>> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = samples_[i];
    fft::forward(a);
    const double inv_n = 1.0 / static_cast<double>(n);
    for (auto& x : a) x *= inv_n;
    coeff_ = std::move(a);
    // real cosine/sine series for point evaluation
    const int half = static_cast<int>(n) / 2;
    cos_coeff_.assign(static_cast<std::size_t>(half) + 1, 0.0);
    sin_coeff_.assign(static_cast<std::size_t>(half) + 1, 0.0);
    cos_coeff_[0] = coeff_[0].real();
    for (int m = 1; m < half; ++m) {
      cos_coeff_[static_cast<std::size_t>(m)] = 2.0 * coeff_[static_cast<std::size_t>(m)].real();
      sin_coeff_[static_cast<std::size_t>(m)] = -2.0 * coeff_[static_cast<std::size_t>(m)].imag();
    }
    cos_coeff_[static_cast<std::size_t>(half)] = coeff_[static_cast<std::size_t>(half)].real();
  }

  double period_;
  std::vector<double> samples_;
  std::vector<std::complex<double>> coeff_;  // DFT scaled by 1/N
  std::vector<double> cos_coeff_, sin_coeff_;
};

// Decomposition of the running integral of g: int_0^t g = mean*t + P(t) - P(0)
// with P periodic and zero-mean.
struct Antiderivative {
  double mean;
  PeriodicGridFunction periodic_part;

  double integral_to(double t) const {
    return mean * t + periodic_part(t) - periodic_part.sample(0);
  }
};

inline Antiderivative PeriodicGridFunction::antiderivative() const {
  const int n = size();
  std::vector<std::complex<double>> c = coeff_;
  const std::complex<double> iunit(0.0, 1.0);
  const double m0 = c[0].real();
  c[0] = 0.0;
  for (int m = 1; m < n / 2; ++m) {
    const double freq = kTwoPi * m / period_;
    c[static_cast<std::size_t>(m)] /= iunit * freq;
    c[static_cast<std::size_t>(n - m)] /= -iunit * freq;
  }
  // The Nyquist cosine integrates to a sine that vanishes at every node.
  c[static_cast<std::size_t>(n / 2)] = 0.0;
  return Antiderivative{m0, from_spectrum(std::move(c), period_)};
}

}  // namespace ecsq

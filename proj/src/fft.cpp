#include "fraclap/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace fraclap::fft {

namespace {
constexpr double kPi = 3.14159265358979323846;

bool is_pow2(size_t n) { return n && (n & (n - 1)) == 0; }
}  // namespace

void transform(std::vector<std::complex<double>>& a, bool inverse) {
  size_t n = a.size();
  if (!is_pow2(n)) throw std::invalid_argument("fft: size must be a power of two");
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    double ang = 2.0 * kPi / (double)len * (inverse ? 1.0 : -1.0);
    std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t j = 0; j < len / 2; ++j) {
        std::complex<double> u = a[i + j];
        std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= (double)n;
}

void transform_nd(std::vector<std::complex<double>>& a, int d, int n,
                  bool inverse) {
  size_t total = 1;
  for (int i = 0; i < d; ++i) total *= (size_t)n;
  if (a.size() != total) throw std::invalid_argument("fft_nd: bad size");
  std::vector<std::complex<double>> line(n);
  // strides: last axis is contiguous
  for (int axis = 0; axis < d; ++axis) {
    size_t stride = 1;
    for (int k = axis + 1; k < d; ++k) stride *= (size_t)n;
    size_t block = stride * (size_t)n;
    for (size_t base = 0; base < total; base += block) {
      for (size_t off = 0; off < stride; ++off) {
        for (int i = 0; i < n; ++i) line[i] = a[base + off + stride * (size_t)i];
        transform(line, inverse);
        for (int i = 0; i < n; ++i) a[base + off + stride * (size_t)i] = line[i];
      }
    }
  }
}

}  // namespace fraclap::fft

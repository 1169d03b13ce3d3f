#pragma once

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fraclap {

// Points live in R^d with d in {1,2,3}; only the first d coordinates are used.
using Point = std::array<double, 3>;

inline Point point(double x0 = 0.0, double x1 = 0.0, double x2 = 0.0) {
  return {x0, x1, x2};
}

inline double dot(const Point& a, const Point& b, int d) {
  double s = 0;
  for (int i = 0; i < d; ++i) s += a[i] * b[i];
  return s;
}

inline double norm2(const Point& a, int d) { return dot(a, a, d); }
inline double norm(const Point& a, int d) { return std::sqrt(norm2(a, d)); }

inline Point axpy(const Point& a, double s, const Point& dir, int d) {
  Point r{0, 0, 0};
  for (int i = 0; i < d; ++i) r[i] = a[i] + s * dir[i];
  return r;
}

inline Point sub(const Point& a, const Point& b, int d) {
  Point r{0, 0, 0};
  for (int i = 0; i < d; ++i) r[i] = a[i] - b[i];
  return r;
}

struct PoleError : std::domain_error {
  using std::domain_error::domain_error;
};

struct Unsupported : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct QuadratureFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fraclap

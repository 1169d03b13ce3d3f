#include "fraclap/sphere.hpp"

#include <cmath>

#include "fraclap/quad.hpp"

namespace fraclap::sphere {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Half-sphere nodes mirrored by exact negation so that linear functions
// average to zero in floating point.
AngularRule mirror(std::vector<Point> half, std::vector<double> w) {
  AngularRule r;
  for (size_t i = 0; i < half.size(); ++i) {
    r.dirs.push_back(half[i]);
    r.w.push_back(0.5 * w[i]);
  }
  for (size_t i = 0; i < half.size(); ++i) {
    Point m{-half[i][0], -half[i][1], -half[i][2]};
    r.dirs.push_back(m);
    r.w.push_back(0.5 * w[i]);
  }
  return r;
}

AngularRule make_rule(int d, int n2, int ngl, int nphi) {
  if (d == 1) return mirror({point(1, 0, 0)}, {1.0});
  if (d == 2) {
    std::vector<Point> half;
    std::vector<double> w;
    for (int i = 0; i < n2; ++i) {
      double phi = kPi * (i + 0.5) / n2;
      half.push_back(point(std::cos(phi), std::sin(phi), 0));
      w.push_back(1.0 / n2);
    }
    return mirror(half, w);
  }
  // d = 3: Gauss-Legendre in cos(theta) on the upper half, trapezoid in phi.
  std::vector<Point> half;
  std::vector<double> w;
  const auto& gl = fraclap::quad::gauss_legendre(ngl);
  for (int i = 0; i < ngl; ++i) {
    if (gl.x[i] < 0) continue;  // keep the upper hemisphere, mirror the rest
    double ct = gl.x[i], st = std::sqrt(1.0 - ct * ct);
    for (int j = 0; j < nphi; ++j) {
      double phi = 2.0 * kPi * (j + 0.25) / nphi;
      half.push_back(point(st * std::cos(phi), st * std::sin(phi), ct));
      w.push_back(gl.w[i] / nphi);  // sum over half = 1
    }
  }
  return mirror(half, w);
}

}  // namespace

const AngularRule& rule(int d) {
  static AngularRule r1 = make_rule(1, 0, 0, 0);
  static AngularRule r2 = make_rule(2, 32, 0, 0);
  static AngularRule r3 = make_rule(3, 0, 8, 16);
  switch (d) {
    case 1:
      return r1;
    case 2:
      return r2;
    default:
      return r3;
  }
}

const AngularRule& dense_rule(int d) {
  static AngularRule r2 = make_rule(2, 64, 0, 0);
  static AngularRule r3 = make_rule(3, 0, 20, 40);
  switch (d) {
    case 1:
      return rule(1);
    case 2:
      return r2;
    default:
      return r3;
  }
}

}  // namespace fraclap::sphere

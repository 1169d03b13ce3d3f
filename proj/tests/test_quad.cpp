#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fraclap/quad.hpp"

using namespace fraclap;
namespace q = fraclap::quad;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("gauss-legendre rules integrate polynomials exactly") {
  for (int n : {7, 15, 32, 64}) {
    const auto& r = q::gauss_legendre(n);
    double s0 = 0, s2 = 0;
    for (int i = 0; i < n; ++i) {
      s0 += r.w[i];
      s2 += r.w[i] * r.x[i] * r.x[i];
    }
    CHECK(std::abs(s0 - 2.0) < 1e-14);
    CHECK(std::abs(s2 - 2.0 / 3.0) < 1e-14);
  }
}

TEST_CASE("gauss-hermite rule moments") {
  for (int n : {12, 24, 40}) {
    const auto& r = q::gauss_hermite(n);
    REQUIRE((int)r.x.size() == n);
    double s0 = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
      s0 += r.w[i];
      s2 += r.w[i] * r.x[i] * r.x[i];
      s4 += r.w[i] * std::pow(r.x[i], 4);
    }
    CHECK(std::abs(s0 - std::sqrt(kPi)) < 1e-12);
    CHECK(std::abs(s2 - 0.5 * std::sqrt(kPi)) < 1e-12);
    CHECK(std::abs(s4 - 0.75 * std::sqrt(kPi)) < 1e-11);
  }
}

TEST_CASE("adaptive quadrature on smooth and singular integrands") {
  auto g = [](double x) { return std::exp(-x * x); };
  q::Result r = q::adaptive(g, -8.0, 8.0, 1e-13, 1e-13);
  CHECK(r.converged);
  CHECK(std::abs(r.value - std::sqrt(kPi)) < 1e-12);

  // integrable endpoint singularity 1/sqrt(x)
  q::Result s = q::adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                            1e-10, 1e-10, 20000);
  CHECK(std::abs(s.value - 2.0) < 1e-8);

  // breakpoint-aware split of a kinked integrand
  q::Result k = q::adaptive_pts([](double x) { return std::abs(x - 0.3); }, 0.0,
                                1.0, {0.3}, 1e-14, 1e-14);
  double want = 0.5 * (0.09 + 0.49);
  CHECK(std::abs(k.value - want) < 1e-13);
}

TEST_CASE("oscillatory integrator matches closed forms") {
  // int_0^inf e^{-s} cos(w s) ds = 1/(1+w^2)
  for (double w : {5.0, 40.0, 300.0}) {
    q::Result r = q::osc_cos([](double s) { return std::exp(-s); }, w, 0.0, 0.0,
                             60.0, 1e-13, 1e-11);
    CHECK(r.converged);
    CHECK(std::abs(r.value - 1.0 / (1.0 + w * w)) < 1e-12);
  }
  // int_0^inf e^{-s} sin(w s) ds = w/(1+w^2), via phase shift
  for (double w : {12.0, 150.0}) {
    q::Result r = q::osc_cos([](double s) { return std::exp(-s); }, w, -0.5 * kPi,
                             0.0, 60.0, 1e-13, 1e-11);
    CHECK(std::abs(r.value - w / (1.0 + w * w)) < 1e-11);
  }
  // slowly decaying amplitude: int_0^inf cos(ws)/(1+s)^2 ds at w=50 vs adaptive fine
  double w = 50.0;
  q::Result filon = q::osc_cos([](double s) { return 1.0 / ((1 + s) * (1 + s)); },
                               w, 0.0, 0.0, 400.0, 1e-12, 1e-10);
  q::Result brute = q::adaptive(
      [w](double s) { return std::cos(w * s) / ((1 + s) * (1 + s)); }, 0.0, 400.0,
      1e-12, 1e-12, 2000000);
  CHECK(std::abs(filon.value - brute.value) < 1e-9);
}

#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fraclap/kernels.hpp"
#include "fraclap/types.hpp"

namespace fraclap {

enum class Decay { schwartz, power, poly_growth, compact };

// Radial shell data for the pathological bank entries; all shells are radial
// about the entry's center and the operator quadratures integrate them
// piecewise with the appropriate edge substitutions.
struct EdgeShell {  // eps * (rho^2 - rn^2)^{alpha/2 - 1} on [rn, 2 rn]
  double rn, eps;
};
struct PairShell {  // +eps rho^{1+alpha} on [rn,(1+delta)rn], -eps on [(1-delta)rn, rn]
  double rn, delta, eps;
};
struct RadialStructure {
  std::vector<EdgeShell> edge_shells;
  std::vector<PairShell> pair_shells;
};

struct TestFunction {
  std::string name;
  int dim = 1;
  Decay decay = Decay::schwartz;
  double decay_param = 0;  // power beta / growth exponent / support radius
  bool radial = false;     // radial about `center`
  Point center{0, 0, 0};
  std::function<double(const Point&)> f;
  std::function<Point(const Point&)> grad;       // optional analytic gradient
  std::function<double(double)> fourier_radial;  // optional radial F f about center
  double fourier_xi_max = 60.0;                  // effective support of F f
  std::function<double(const Params&, const Point&)> oracle;  // optional exact L f
  std::string oracle_note;
  // radii at which the spherical mean about x is non-smooth
  std::function<std::vector<double>(const Point&)> kinks;
  std::optional<RadialStructure> structure;
  std::set<std::string> refuses;  // method tags this entry must be refused by
  std::set<std::string> nonconv;  // method tags expected to flag non-convergence
  std::string note;
  double far_scale = 8.0;  // radius about center beyond which f is negligible
                           // (or, for growth classes, purely asymptotic)

  double operator()(const Point& x) const { return f(x); }
  double far_radius() const { return far_scale; }
  bool has_grad() const { return static_cast<bool>(grad); }
  bool has_fourier() const { return static_cast<bool>(fourier_radial); }
  bool has_oracle() const { return static_cast<bool>(oracle); }
};

}  // namespace fraclap

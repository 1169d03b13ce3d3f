#pragma once

#include <string>
#include <vector>

namespace fraclap::probe {

// Numerical probe of complete monotonicity of sqrt(r) K_{alpha/2}(r^{1/alpha}).
// Derivatives are taken by exact term-list differentiation through the Bessel
// recurrence (each derivative is a finite sum  c r^{1/2 + i/alpha - j} K_mu),
// so the only numerical content is cancellation among the terms, which is
// tracked and reported as per-order noise.
struct Row {
  double r = 0;
  std::vector<double> derivs;  // orders 0..N
  std::vector<double> noise;   // cancellation-noise bound per order
  bool consistent = true;      // signs alternate up to the noise level
};

struct Report {
  double alpha = 0;
  int orders = 0;
  std::vector<Row> rows;
  bool consistent = true;
  std::string violation;  // description of the first violation found
};

Report conjecture_cm(double alpha, int orders, double rmin = 1e-3,
                     double rmax = 1e3, int npts = 61);

}  // namespace fraclap::probe

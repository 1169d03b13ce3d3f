#pragma once

#include <memory>
#include <vector>

#include "fraclap/types.hpp"

namespace fraclap::profile {

// Tabulated radial profile of the unit-time stable density p_1 on a
// log-uniform grid, with a quadratic small-rho segment and a power-law tail
// matched at rho_max.
struct RadialProfile {
  int d = 1;
  double alpha = 1.0;
  double rho_min = 0, rho_max = 0;
  std::vector<double> lnrho, lnp, slope;  // slope = d ln p / d ln rho at nodes
  double p0 = 0;                          // p_1(0)
  double c2 = 0;                          // p ~ p0 + c2 rho^2 below rho_min
  double tail_coef = 0;                   // p ~ A rho^{-(d+alpha)} above rho_max

  double value(double rho) const;
  double dlog(double rho) const;  // d ln p / d ln rho
  int size() const { return (int)lnrho.size(); }
};

// One-point evaluation of p_1 by direct radial Fourier inversion of
// exp(-|xi|^alpha).  Used to build profiles and as an independent oracle.
// Beyond rho ~ 25 a far-field power series takes over unless allow_series
// is cleared (the quadrature route then serves as a second, independent path).
double p1_direct(int d, double alpha, double rho, double rel_tol = 1e-9,
                 bool allow_series = true);

// Closed form p_1(0).
double p1_at_zero(int d, double alpha);

RadialProfile build_p1_profile(int d, double alpha, int n = 2048);

// Process-wide cache keyed by (d, alpha); first access builds (or loads the
// on-disk table) under a lock.
std::shared_ptr<const RadialProfile> p1_profile(int d, double alpha);

// Cache directory resolution (FRACLAP_CACHE_DIR, else ~/.cache/fraclap).
std::string cache_dir();

}  // namespace fraclap::profile

#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "fraclap/types.hpp"

namespace fraclap::quad {

struct Result {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
  long evals = 0;

  Result& operator+=(const Result& o) {
    value += o.value;
    error += o.error;
    converged = converged && o.converged;
    evals += o.evals;
    return *this;
  }
};

// Gauss-Legendre rule on [-1,1]; nodes/weights cached per n.
struct Rule {
  std::vector<double> x, w;
};
const Rule& gauss_legendre(int n);

// Gauss-Hermite rule for weight exp(-x^2) on R (physicists' convention).
const Rule& gauss_hermite(int n);

using Fn = std::function<double(double)>;

// Globally adaptive quadrature on [a,b] with an embedded GL7/GL15 pair.
Result adaptive(const Fn& f, double a, double b, double abs_tol, double rel_tol,
                int max_intervals = 4000);

// Same, with initial subdivision at the given interior breakpoints.
Result adaptive_pts(const Fn& f, double a, double b, std::vector<double> pts,
                    double abs_tol, double rel_tol, int max_intervals = 4000);

// Oscillatory integral  int_a^b g(s) cos(omega*s + phi) ds  for slowly varying g.
// Uses Filon panels (degree-6 fit, exact trig moments) where omega*len is large
// and plain adaptive panels elsewhere.
Result osc_cos(const Fn& g, double omega, double phi, double a, double b,
               double abs_tol, double rel_tol, int max_panels = 4000);

// Fixed-order Gauss-Legendre on [a,b] (no error estimate).
double fixed_gl(const Fn& f, double a, double b, int n);

// int_a^infty g(rho) drho for g with power-law decay ~ C rho^{-1-lam}.
// Substituting rho = a m^{-1/lam} flattens the leading term exactly.
Result tail_power(const Fn& g, double a, double lam, double abs_tol,
                  double rel_tol, int max_intervals = 4000);

// int_r^b f(rho) (rho^2 - r^2)^{-alpha/2} drho via rho = r cosh(u), u = w^q,
// which removes the edge singularity exactly for alpha in (0,2).
Result edge_power(const Fn& f, double r, double b, double alpha, double abs_tol,
                  double rel_tol, int max_intervals = 20000);

}  // namespace fraclap::quad

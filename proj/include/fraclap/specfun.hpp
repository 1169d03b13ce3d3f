#pragma once

#include "fraclap/types.hpp"

namespace fraclap::specfun {

// Gamma function on the real line, poles at non-positive integers.
double gamma(double x);

// ln Gamma(x) for x > 0.
double log_gamma(double x);

// ln |Gamma(x)| for any non-pole x; if sign is non-null it receives +1/-1.
double log_abs_gamma(double x, int* sign = nullptr);

// Modified Bessel function of the second kind K_nu(x), x > 0.
// The order is taken as |nu| (K is even in the order). Supports |nu| <= 12.
double bessel_k(double nu, double x);

// Gauss hypergeometric 2F1(a,b;c;z) for z < 1.
double hyp2f1(double a, double b, double c, double z);

// Bessel J0, used by the Hankel transforms in the kernel module.
double bessel_j0(double x);

// Amplitude/phase functions of the J0 asymptotic form, valid for x >= 30:
// J0(x) = sqrt(2/(pi x)) (P cos(x - pi/4) - Q sin(x - pi/4)).
void bessel_j0_pq(double x, double* P, double* Q);

}  // namespace fraclap::specfun

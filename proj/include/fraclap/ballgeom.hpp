#pragma once

#include "fraclap/kernels.hpp"

namespace fraclap::ballgeom {

struct BallSpec {
  double r;
  Point y;

  BallSpec(double r_, Point y_ = point()) : r(r_), y(y_) {}
};

void validate(const Params& P, const BallSpec& b);

// Normalizing constant of the Poisson kernel,
// 2 Gamma(d/2) / (alpha pi^{d/2} Gamma(a/2) |Gamma(-a/2)|).
double poisson_constant(const Params& P);

// Exit-position density pi_r(y, z) for |z| > r.  The classical M. Riesz form
// carries |y - z|^{-d}; see the project notes on the printed variant.
double poisson_ball(const Params& P, const BallSpec& b, const Point& z);

// Green function gamma_r(y, z) for |z| < r, z != y, by the integral form.
double green_ball(const Params& P, const BallSpec& b, const Point& z);

// Same through the hypergeometric closed form (cross-check route).
double green_ball_hyp(const Params& P, const BallSpec& b, const Point& z);

// Closed-form expected exit time (mass of the Green function).
double green_mass(const Params& P, double r, double ynorm);

// Quadrature checks used by the audit.
double poisson_normalization(const Params& P, const BallSpec& b);
double green_mass_quadrature(const Params& P, const BallSpec& b);
double check_green_poisson_identity(const Params& P, const BallSpec& b,
                                    const Point& z);
double check_nu_mu_identity(const Params& P, double R, const Point& z);

}  // namespace fraclap::ballgeom

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "fraclap/profile.hpp"
#include "fraclap/types.hpp"

namespace fraclap {

// Dimension and stability index with the two derived constants used all over.
struct Params {
  int d;
  double alpha;
  double c_dalpha;  // 2^a Gamma((d+a)/2) / (pi^{d/2} |Gamma(-a/2)|)
  double c_alpha;   // |Gamma(-a/2)| / (2^a Gamma(a/2))

  Params(int d_, double alpha_);
};

// The constant above for arbitrary (also negative) index a.
double cda(int d, double a);

double surface_area(int d);  // |S^{d-1}|
double ball_volume(int d);   // |B_1|

namespace kernels {

// nu_r: truncated jump kernel.
double nu_radial(const Params& P, double rho, double r);
double nu(const Params& P, const Point& z, double r);

// nu~_r: Dynkin kernel (zero on the closed ball).
double nu_tilde_radial(const Params& P, double rho, double r);
double nu_tilde(const Params& P, const Point& z, double r);

// Gauss-Weierstrass kernel.
double heat_radial(int d, double rho, double t);
double heat(const Params& P, const Point& z, double t);

// Stable kernel p_t via the cached p_1 profile.
std::shared_ptr<const profile::RadialProfile> p1(const Params& P);
double pt_radial(const Params& P, double rho, double t);
double pt(const Params& P, const Point& z, double t);

// Harmonic-extension kernel q_y and the ODE solution phi_lambda.
double qy_scale(const Params& P, double y);  // (y/c_alpha)^{1/alpha}
double qy_radial(const Params& P, double rho, double y);
double qy(const Params& P, const Point& z, double y);
double phi_lambda(const Params& P, double lambda, double y);

// Convolution kernel of (sI - Delta)^{-1}.
double resolvent_laplacian_radial(const Params& P, double rho, double s);
double resolvent_laplacian(const Params& P, const Point& x, double s);
// Scale-free form: G_s(rho) = s^{(d-2)/2} * resolvent_hat1(d, sqrt(s)*rho).
double resolvent_hat1(int d, double w);

// lambda-resolvent kernel of the stable semigroup, u_lambda(x).
double u_lambda_radial(const Params& P, double rho, double lambda,
                       double rel_tol = 1e-7);
double u_lambda(const Params& P, const Point& x, double lambda,
                double rel_tol = 1e-7);

struct BoundRow {
  double r, u1, shape, ratio;
};
struct BoundReport {
  std::vector<BoundRow> rows;
  double C = 0;       // smallest working constant
  bool finite = false;
};
BoundReport bound_check_u1(const Params& P);

// Radial profile m of c_{d,a}^{-1} rho^{d+a} p_1(rho) and its derivative.
struct ProfileM {
  Params P;
  std::shared_ptr<const profile::RadialProfile> prof;
  double m(double rho) const;
  double mprime(double rho) const;
  double rho_max() const { return prof->rho_max; }
};
ProfileM profile_m(const Params& P);

// Subordinator density for alpha = 1 (Laplace transform e^{-sqrt(xi)}).
double eta_alpha1(const Params& P, double s);

// Forward Fourier transform of a radial function with a rho^{-d-decay_a} tail.
double radial_ft(int d, const std::function<double(double)>& g, double xi,
                 double decay_a);

// |F q_y(xi) - phi_{xi^2}(y)|, the harmonic-extension kernel identity.
double qy_fourier_residual(const Params& P, double y, double xi);

}  // namespace kernels
}  // namespace fraclap

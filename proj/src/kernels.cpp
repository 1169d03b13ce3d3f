#include "fraclap/kernels.hpp"

#include <cmath>

#include "fraclap/quad.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap {

namespace {
constexpr double kPi = 3.14159265358979323846;
namespace sf = fraclap::specfun;
namespace q = fraclap::quad;
}  // namespace

double cda(int d, double a) {
  // 2^a Gamma((d+a)/2) / (pi^{d/2} |Gamma(-a/2)|), assembled in logs.
  double lg_num = sf::log_gamma(0.5 * (d + a));
  double lg_den = sf::log_abs_gamma(-0.5 * a);
  return std::exp(a * std::log(2.0) + lg_num - 0.5 * d * std::log(kPi) - lg_den);
}

double surface_area(int d) {
  return 2.0 * std::pow(kPi, 0.5 * d) / sf::gamma(0.5 * d);
}

double ball_volume(int d) { return surface_area(d) / d; }

Params::Params(int d_, double alpha_) : d(d_), alpha(alpha_) {
  if (d < 1 || d > 3)
    throw std::domain_error("Params: d must be in {1,2,3}");
  if (!(alpha > 0.0) || !(alpha < 2.0))
    throw std::domain_error("Params: alpha must lie in the open interval (0,2)");
  c_dalpha = cda(d, alpha);
  c_alpha = std::exp(sf::log_abs_gamma(-0.5 * alpha) - alpha * std::log(2.0) -
                     sf::log_gamma(0.5 * alpha));
}

namespace kernels {

double nu_radial(const Params& P, double rho, double r) {
  if (rho <= r || rho <= 0.0) return 0.0;
  return P.c_dalpha * std::pow(rho, -(double)P.d - P.alpha);
}

double nu(const Params& P, const Point& z, double r) {
  double rho = norm(z, P.d);
  if (r == 0.0 && rho == 0.0)
    throw std::domain_error("kernel_nu: z = 0 with r = 0");
  return nu_radial(P, rho, r);
}

double nu_tilde_radial(const Params& P, double rho, double r) {
  if (!(r > 0.0)) throw std::domain_error("kernel_nu_tilde: requires r > 0");
  if (rho <= r) return 0.0;  // closed-ball cutoff
  double q2 = (rho - r) * (rho + r);
  return P.c_dalpha / (std::pow(rho, (double)P.d) * std::pow(q2, 0.5 * P.alpha));
}

double nu_tilde(const Params& P, const Point& z, double r) {
  return nu_tilde_radial(P, norm(z, P.d), r);
}

double heat_radial(int d, double rho, double t) {
  if (!(t > 0.0)) throw std::domain_error("kernel_heat: requires t > 0");
  return std::pow(4.0 * kPi * t, -0.5 * d) * std::exp(-rho * rho / (4.0 * t));
}

double heat(const Params& P, const Point& z, double t) {
  return heat_radial(P.d, norm(z, P.d), t);
}

std::shared_ptr<const profile::RadialProfile> p1(const Params& P) {
  return profile::p1_profile(P.d, P.alpha);
}

double pt_radial(const Params& P, double rho, double t) {
  if (!(t > 0.0)) throw std::domain_error("kernel_pt: requires t > 0");
  if (P.alpha == 1.0) {
    // Cauchy case in closed form (Poisson kernel of the half-space)
    return sf::gamma(0.5 * (P.d + 1)) * std::pow(kPi, -0.5 * (P.d + 1)) * t *
           std::pow(t * t + rho * rho, -0.5 * (P.d + 1));
  }
  auto prof = p1(P);
  double s = std::pow(t, -1.0 / P.alpha);
  return std::pow(t, -(double)P.d / P.alpha) * prof->value(s * rho);
}

double pt(const Params& P, const Point& z, double t) {
  return pt_radial(P, norm(z, P.d), t);
}

double qy_scale(const Params& P, double y) {
  return std::pow(y / P.c_alpha, 1.0 / P.alpha);
}

double qy_radial(const Params& P, double rho, double y) {
  if (!(y > 0.0)) throw std::domain_error("kernel_qy: requires y > 0");
  double s = std::pow(y / P.c_alpha, 2.0 / P.alpha);
  return P.c_dalpha * y * std::pow(s + rho * rho, -0.5 * (P.d + P.alpha));
}

double qy(const Params& P, const Point& z, double y) {
  return qy_radial(P, norm(z, P.d), y);
}

double phi_lambda(const Params& P, double lambda, double y) {
  if (lambda < 0.0 || y < 0.0)
    throw std::domain_error("phi_lambda: requires lambda >= 0, y >= 0");
  if (lambda == 0.0 || y == 0.0) return 1.0;
  double a = P.alpha;
  double arg = std::pow(lambda, 0.5 * a) * y / P.c_alpha;
  double w = std::pow(arg, 1.0 / a);
  if (w > 690.0) return 0.0;
  return std::pow(2.0, 1.0 - 0.5 * a) / sf::gamma(0.5 * a) * std::sqrt(arg) *
         sf::bessel_k(0.5 * a, w);
}

double resolvent_hat1(int d, double w) {
  switch (d) {
    case 1:
      return 0.5 * std::exp(-w);
    case 2:
      return (w > 690.0) ? 0.0 : sf::bessel_k(0.0, w) / (2.0 * kPi);
    default:
      return std::exp(-w) / (4.0 * kPi * w);
  }
}

double resolvent_laplacian_radial(const Params& P, double rho, double s) {
  if (!(s > 0.0))
    throw std::domain_error("kernel_resolvent_laplacian: requires s > 0");
  if (P.d >= 2 && rho == 0.0)
    throw std::domain_error("kernel_resolvent_laplacian: singular at x = 0");
  double rs = std::sqrt(s);
  return std::pow(rs, P.d - 2.0) * resolvent_hat1(P.d, rs * rho);
}

double resolvent_laplacian(const Params& P, const Point& x, double s) {
  return resolvent_laplacian_radial(P, norm(x, P.d), s);
}

double u_lambda_radial(const Params& P, double rho, double lambda, double rel_tol) {
  if (!(lambda > 0.0)) throw std::domain_error("u_lambda: requires lambda > 0");
  if (!(rho > 0.0)) throw std::domain_error("u_lambda: requires x != 0");
  auto prof = p1(P);
  double da = (double)P.d / P.alpha;
  auto f = [&](double t) {
    return std::exp(-lambda * t) * std::pow(t, -da) *
           prof->value(std::pow(t, -1.0 / P.alpha) * rho);
  };
  double t_hi = 45.0 / lambda;
  double t_lo = 1e-8 * std::min(1.0, std::pow(rho, P.alpha)) * std::min(1.0, 1.0 / lambda);
  q::Fn g = [&](double v) {
    double t = std::exp(v);
    return f(t) * t;
  };
  q::Result r = q::adaptive(g, std::log(t_lo), std::log(t_hi), 1e-300,
                            0.2 * rel_tol, 40000);
  // analytic remainder of the small-t power-law piece
  double rem = prof->tail_coef * std::pow(rho, -(double)P.d - P.alpha) * 0.5 * t_lo * t_lo;
  double val = r.value + rem;
  if (!r.converged || !(r.error <= rel_tol * std::abs(val) + 1e-300))
    throw QuadratureFailure("u_lambda: quadrature failed to reach tolerance");
  return val;
}

double u_lambda(const Params& P, const Point& x, double lambda, double rel_tol) {
  return u_lambda_radial(P, norm(x, P.d), lambda, rel_tol);
}

BoundReport bound_check_u1(const Params& P) {
  BoundReport rep;
  auto shape = [&](double r) -> double {
    if (P.alpha < P.d)
      return std::min(std::pow(r, P.alpha - P.d), std::pow(r, -(double)P.d - P.alpha));
    if (P.alpha > P.d)
      return std::min(1.0, std::pow(r, -(double)P.d - P.alpha));
    return std::min(std::log(2.0 + 1.0 / r), std::pow(r, -2.0));
  };
  rep.finite = true;
  rep.C = 0.0;
  for (double lr = -3.0; lr <= 3.0 + 1e-9; lr += 1.0 / 3.0) {
    double r = std::pow(10.0, lr);
    double u = u_lambda_radial(P, r, 1.0);
    double s = shape(r);
    double ratio = u / s;
    rep.rows.push_back({r, u, s, ratio});
    if (!std::isfinite(ratio) || u < 0) rep.finite = false;
    rep.C = std::max(rep.C, ratio);
  }
  return rep;
}

double ProfileM::m(double rho) const {
  return std::pow(rho, (double)P.d + P.alpha) * prof->value(rho) / P.c_dalpha;
}

double ProfileM::mprime(double rho) const {
  if (!(rho > 0.0)) return 0.0;
  return m(rho) * ((double)P.d + P.alpha + prof->dlog(rho)) / rho;
}

ProfileM profile_m(const Params& P) { return ProfileM{P, p1(P)}; }

double eta_alpha1(const Params& P, double s) {
  if (P.alpha != 1.0)
    throw Unsupported("eta_alpha1: closed form available only for alpha = 1");
  if (!(s > 0.0)) throw std::domain_error("eta_alpha1: requires s > 0");
  return 0.5 / std::sqrt(kPi) * std::pow(s, -1.5) * std::exp(-0.25 / s);
}

}  // namespace kernels
}  // namespace fraclap

namespace fraclap::kernels {

double radial_ft(int d, const std::function<double(double)>& g, double xi,
                 double decay_a) {
  namespace q = fraclap::quad;
  namespace sf = fraclap::specfun;
  if (!(xi > 0)) {  // plain mass integral
    auto body = [&](double rho) {
      return surface_area(d) * std::pow(rho, d - 1.0) * g(rho);
    };
    q::Result r = q::adaptive(body, 0.0, 50.0, 1e-13, 1e-11, 40000);
    q::Result t = q::tail_power(body, 50.0, decay_a, 1e-13, 1e-10);
    return r.value + t.value;
  }
  // generous truncation: the Filon panels are logarithmic in the range
  double Rbig = std::pow(1e14 / xi, 1.0 / decay_a) + 100.0 / xi;
  if (d == 1 || d == 3) {
    double phi = (d == 1) ? 0.0 : -0.5 * kPi;
    auto amp = [&](double s) { return (d == 1) ? g(s) : g(s) * s; };
    double s0 = 8.0 / xi;
    q::Fn head = [&](double s) { return amp(s) * std::cos(xi * s + phi); };
    q::Result rh = q::adaptive(head, 0.0, s0, 1e-14, 1e-11, 20000);
    q::Result ro = q::osc_cos(amp, xi, phi, s0, Rbig, 1e-13, 1e-10, 40000);
    double pref = (d == 1) ? 2.0 : 4.0 * kPi / xi;
    return pref * (rh.value + ro.value);
  }
  // d = 2: 2 pi int g(rho) J0(xi rho) rho drho
  double s1 = 30.0 / xi;
  q::Fn head = [&](double s) { return g(s) * s * sf::bessel_j0(xi * s); };
  q::Result rh = q::adaptive(head, 0.0, s1, 1e-14, 1e-11, 20000);
  auto ampP = [&](double s) {
    double Pa, Qa;
    sf::bessel_j0_pq(s * xi, &Pa, &Qa);
    return g(s) * s * std::sqrt(2.0 / (kPi * s * xi)) * Pa;
  };
  auto ampQ = [&](double s) {
    double Pa, Qa;
    sf::bessel_j0_pq(s * xi, &Pa, &Qa);
    return g(s) * s * std::sqrt(2.0 / (kPi * s * xi)) * Qa;
  };
  q::Result r1 = q::osc_cos(ampP, xi, -0.25 * kPi, s1, Rbig, 1e-13, 1e-10, 40000);
  q::Result r2 =
      q::osc_cos(ampQ, xi, 0.25 * kPi, s1, Rbig, 1e-13, 1e-10, 40000);
  return 2.0 * kPi * (rh.value + r1.value + r2.value);
}

double qy_fourier_residual(const Params& P, double y, double xi) {
  auto g = [&](double rho) { return qy_radial(P, rho, y); };
  double ft = radial_ft(P.d, g, xi, P.alpha);
  return std::abs(ft - phi_lambda(P, xi * xi, y));
}

}  // namespace fraclap::kernels

#include "fraclap/ballgeom.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "fraclap/quad.hpp"
#include "fraclap/specfun.hpp"
#include "fraclap/sphere.hpp"

namespace fraclap::ballgeom {

namespace {
constexpr double kPi = 3.14159265358979323846;
namespace sf = fraclap::specfun;
namespace q = fraclap::quad;
using kernels::nu_radial;

const sphere::AngularRule& angular_rule(int d) { return sphere::dense_rule(d); }

// Distance from y (inside) to the sphere of radius r along direction th.
double ray_exit(const Point& y, const Point& th, double r, int d) {
  double b = dot(y, th, d);
  return -b + std::sqrt(std::max(0.0, r * r - norm2(y, d) + b * b));
}

// int_0^R f(rho) rho^{d-1} drho where f ~ rho^{alpha-d} near 0:
// rho = R v^{1/alpha} flattens the leading power.
q::Result ball_radial(const q::Fn& f_rho_dm1, double R, double alpha,
                      double abs_tol, double rel_tol) {
  q::Fn g = [&](double v) {
    double rho = R * std::pow(v, 1.0 / alpha);
    return f_rho_dm1(rho) * (R / alpha) * std::pow(v, 1.0 / alpha - 1.0);
  };
  return q::adaptive_pts(g, 0.0, 1.0, {0.7, 0.95}, abs_tol, rel_tol, 20000);
}

}  // namespace

void validate(const Params& P, const BallSpec& b) {
  if (!(b.r > 0.0)) throw std::domain_error("BallSpec: requires r > 0");
  if (!(norm(b.y, P.d) < b.r))
    throw std::domain_error("BallSpec: requires |y| < r strictly");
}

double poisson_constant(const Params& P) {
  return 2.0 * std::exp(sf::log_gamma(0.5 * P.d) - 0.5 * P.d * std::log(kPi) -
                        sf::log_gamma(0.5 * P.alpha) -
                        sf::log_abs_gamma(-0.5 * P.alpha)) /
         P.alpha;
}

double poisson_ball(const Params& P, const BallSpec& b, const Point& z) {
  validate(P, b);
  double zn = norm(z, P.d);
  if (!(zn > b.r)) throw std::domain_error("poisson_ball: requires |z| > r");
  double y2 = norm2(b.y, P.d);
  double dist = norm(sub(z, b.y, P.d), P.d);
  return poisson_constant(P) * std::pow(b.r * b.r - y2, 0.5 * P.alpha) /
         (std::pow((zn - b.r) * (zn + b.r), 0.5 * P.alpha) *
          std::pow(dist, (double)P.d));
}

namespace {

// I(W) = int_0^W (1+v^{2/a})^{-d/2} dv, tabulated on a log grid per (d, alpha)
// with series/asymptotic branches outside, so Green evaluations cost O(1).
struct InnerTable {
  int d;
  double a;
  double w0 = 1e-6, w1 = 1e8;
  std::vector<double> lnw, lni, slope;

  double series_small(double W) const {
    double e1 = 1.0 + 2.0 / a, e2 = 1.0 + 4.0 / a;
    return W - 0.5 * d * std::pow(W, e1) / e1 +
           0.125 * d * (d + 2.0) * std::pow(W, e2) / e2;
  }
  // int_{w1}^{W} v^{-d/a} (1+v^{-2/a})^{-d/2} dv by a 3-term expansion
  double tail_piece(double W) const {
    double c[3] = {1.0, -0.5 * d, 0.125 * d * (d + 2.0)};
    double s = 0;
    for (int k = 0; k < 3; ++k) {
      double qe = (d + 2.0 * k) / a;
      if (std::abs(qe - 1.0) < 1e-9)
        s += c[k] * std::log(W / w1);
      else
        s += c[k] * (std::pow(W, 1.0 - qe) - std::pow(w1, 1.0 - qe)) / (1.0 - qe);
    }
    return s;
  }
  double eval(double W) const {
    if (W <= w0) return series_small(W);
    if (W >= w1) return std::exp(lni.back()) + tail_piece(W);
    double lw = std::log(W);
    double dl = lnw[1] - lnw[0];
    int j = (int)((lw - lnw[0]) / dl);
    j = std::min(std::max(j, 0), (int)lnw.size() - 2);
    double t = (lw - lnw[j]) / dl;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
    return std::exp(h00 * lni[j] + h10 * dl * slope[j] + h01 * lni[j + 1] +
                    h11 * dl * slope[j + 1]);
  }
};

const InnerTable& inner_table(const Params& P) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, InnerTable> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_pair(P.d, P.alpha);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  InnerTable tb;
  tb.d = P.d;
  tb.a = P.alpha;
  const int n = 1200;
  tb.lnw.resize(n);
  tb.lni.resize(n);
  double l0 = std::log(tb.w0), l1 = std::log(tb.w1);
  auto h = [&](double v) {
    return std::pow(1.0 + std::pow(v, 2.0 / tb.a), -0.5 * tb.d);
  };
  double acc = tb.series_small(tb.w0);
  double prev = tb.w0;
  for (int i = 0; i < n; ++i) {
    tb.lnw[i] = l0 + (l1 - l0) * i / (n - 1.0);
    double W = std::exp(tb.lnw[i]);
    if (W > prev) {
      q::Result r = q::adaptive(h, prev, W, 1e-16, 5e-13, 4000);
      acc += r.value;
      prev = W;
    }
    tb.lni[i] = std::log(acc);
  }
  tb.slope.resize(n);
  double dl = tb.lnw[1] - tb.lnw[0];
  for (int i = 0; i < n; ++i) {
    if (i >= 2 && i <= n - 3)
      tb.slope[i] =
          (-tb.lni[i + 2] + 8 * tb.lni[i + 1] - 8 * tb.lni[i - 1] + tb.lni[i - 2]) /
          (12 * dl);
    else if (i == 0)
      tb.slope[i] = (-3 * tb.lni[0] + 4 * tb.lni[1] - tb.lni[2]) / (2 * dl);
    else if (i == n - 1)
      tb.slope[i] = (3 * tb.lni[n - 1] - 4 * tb.lni[n - 2] + tb.lni[n - 3]) / (2 * dl);
    else if (i == 1)
      tb.slope[i] = (tb.lni[2] - tb.lni[0]) / (2 * dl);
    else
      tb.slope[i] = (tb.lni[n - 1] - tb.lni[n - 3]) / (2 * dl);
  }
  return cache.emplace(key, std::move(tb)).first->second;
}

// inner(A) = int_0^A s^{a/2-1} (1+s)^{-d/2} ds = (2/a) I(A^{a/2})
double green_inner(const Params& P, double A) {
  return 2.0 / P.alpha * inner_table(P).eval(std::pow(A, 0.5 * P.alpha));
}

double green_prefactor(const Params& P) {
  return std::exp(sf::log_gamma(0.5 * P.d) - P.alpha * std::log(2.0) -
                  0.5 * P.d * std::log(kPi) - 2.0 * sf::log_gamma(0.5 * P.alpha));
}

}  // namespace

double green_ball(const Params& P, const BallSpec& b, const Point& z) {
  validate(P, b);
  double zn = norm(z, P.d);
  if (!(zn < b.r)) throw std::domain_error("green_ball: requires |z| < r");
  double dist = norm(sub(z, b.y, P.d), P.d);
  double y2 = norm2(b.y, P.d), z2 = zn * zn, r2 = b.r * b.r;
  if (dist == 0.0) {
    if (P.alpha <= P.d) return std::numeric_limits<double>::infinity();
    // finite on-diagonal limit for alpha > d
    double A0 = (r2 - y2) / b.r;  // sqrt of the A prefactor
    return green_prefactor(P) * (2.0 / P.alpha) / (1.0 - (double)P.d / P.alpha) *
           std::pow(A0, P.alpha - P.d);
  }
  double A = (r2 - y2) * (r2 - z2) / (r2 * dist * dist);
  return green_prefactor(P) * std::pow(dist, P.alpha - P.d) * green_inner(P, A);
}

double green_ball_hyp(const Params& P, const BallSpec& b, const Point& z) {
  validate(P, b);
  double zn = norm(z, P.d);
  if (!(zn < b.r)) throw std::domain_error("green_ball_hyp: requires |z| < r");
  double dist = norm(sub(z, b.y, P.d), P.d);
  double y2 = norm2(b.y, P.d), z2 = zn * zn, r2 = b.r * b.r;
  double A = (r2 - y2) * (r2 - z2) / (r2 * dist * dist);
  double a = P.alpha;
  double pref = std::exp(sf::log_gamma(0.5 * P.d) - (a - 1.0) * std::log(2.0) -
                         0.5 * P.d * std::log(kPi) -
                         2.0 * sf::log_gamma(0.5 * a)) /
                a;
  return pref * std::pow((r2 - y2) * (r2 - z2), 0.5 * a) /
         (std::pow(b.r, a) * std::pow(dist, (double)P.d)) *
         sf::hyp2f1(0.5 * P.d, 0.5 * a, 1.0 + 0.5 * a, -A);
}

double green_mass(const Params& P, double r, double ynorm) {
  double lg = sf::log_gamma(0.5 * P.d) - (P.alpha - 1.0) * std::log(2.0) -
              sf::log_gamma(0.5 * P.alpha) - sf::log_gamma(0.5 * (P.d + P.alpha));
  return std::exp(lg) / P.alpha * std::pow(r * r - ynorm * ynorm, 0.5 * P.alpha);
}

double poisson_normalization(const Params& P, const BallSpec& b) {
  validate(P, b);
  const auto& ang = angular_rule(P.d);
  double sd = surface_area(P.d);
  double C = poisson_constant(P) * std::pow(b.r * b.r - norm2(b.y, P.d), 0.5 * P.alpha);
  auto mean_dist = [&](double rho) {
    double s = 0;
    for (size_t i = 0; i < ang.dirs.size(); ++i) {
      Point z = axpy(point(), rho, ang.dirs[i], P.d);
      s += ang.w[i] * std::pow(norm(sub(z, b.y, P.d), P.d), -(double)P.d);
    }
    return s;
  };
  // edge [r, 2r] handles the (rho^2-r^2)^{-a/2} singularity
  q::Fn f_edge = [&](double rho) {
    return C * sd * std::pow(rho, P.d - 1.0) * mean_dist(rho);
  };
  q::Result e = q::edge_power(f_edge, b.r, 2.0 * b.r, P.alpha, 1e-13, 1e-11);
  // mid and power tail
  q::Fn f_full = [&](double rho) {
    return f_edge(rho) * std::pow((rho - b.r) * (rho + b.r), -0.5 * P.alpha);
  };
  double R0 = std::max(8.0 * b.r, 8.0);
  q::Result m = q::adaptive(f_full, 2.0 * b.r, R0, 1e-13, 1e-11, 20000);
  q::Result t = q::tail_power(f_full, R0, P.alpha, 1e-13, 1e-11);
  return e.value + m.value + t.value;
}

double green_mass_quadrature(const Params& P, const BallSpec& b) {
  validate(P, b);
  const auto& ang = angular_rule(P.d);
  double sd = surface_area(P.d);
  double total = 0;
  for (size_t i = 0; i < ang.dirs.size(); ++i) {
    double R = ray_exit(b.y, ang.dirs[i], b.r, P.d);
    q::Fn f = [&](double rho) {
      Point z = axpy(b.y, rho, ang.dirs[i], P.d);
      return green_ball(P, b, z) * std::pow(rho, P.d - 1.0);
    };
    q::Result r = ball_radial(f, R, P.alpha, 1e-13, 1e-10);
    total += ang.w[i] * sd * r.value;
  }
  return total;
}

double check_green_poisson_identity(const Params& P, const BallSpec& b,
                                    const Point& z) {
  validate(P, b);
  if (!(norm(z, P.d) > b.r))
    throw std::domain_error("check_green_poisson_identity: requires |z| > r");
  const auto& ang = angular_rule(P.d);
  double sd = surface_area(P.d);
  double lhs = 0;
  for (size_t i = 0; i < ang.dirs.size(); ++i) {
    double R = ray_exit(b.y, ang.dirs[i], b.r, P.d);
    q::Fn f = [&](double rho) {
      Point v = axpy(b.y, rho, ang.dirs[i], P.d);
      double dist = norm(sub(z, v, P.d), P.d);
      return green_ball(P, b, v) * nu_radial(P, dist, 0.0) *
             std::pow(rho, P.d - 1.0);
    };
    q::Result r = ball_radial(f, R, P.alpha, 1e-14, 1e-9);
    if (!r.converged)
      throw QuadratureFailure("check_green_poisson_identity: quadrature failure");
    lhs += ang.w[i] * sd * r.value;
  }
  double rhs = poisson_ball(P, b, z);
  return std::abs(lhs - rhs) / rhs;
}

double check_nu_mu_identity(const Params& P, double R, const Point& z) {
  if (!(R > 0)) throw std::domain_error("check_nu_mu_identity: requires R > 0");
  double zn = norm(z, P.d);
  if (zn <= R) return 0.0;  // both sides vanish on the closed ball
  double a = P.alpha;
  double K = 4.0 * std::pow(R, 2.0 - a) /
             (a * sf::gamma(0.5 * a) * std::abs(sf::gamma(-0.5 * a)));
  double span = zn * zn - R * R;
  auto h = [&](double v) {  // integrand without the endpoint powers
    double r2 = R * R + v * span;
    return 1.0 / (2.0 * r2);
  };
  // v in (0, 1/2]: v = w^{2/a} flattens v^{a/2-1}
  q::Fn left = [&](double w) {
    double v = std::pow(w, 2.0 / a);
    return (2.0 / a) * std::pow(1.0 - v, -0.5 * a) * h(v);
  };
  q::Result rl = q::adaptive(left, 0.0, std::pow(0.5, 0.5 * a), 1e-14, 1e-10, 20000);
  // v in [1/2, 1): 1 - v = w^{2/(2-a)} flattens (1-v)^{-a/2}
  q::Fn right = [&](double w) {
    double om = std::pow(w, 2.0 / (2.0 - a));
    double v = 1.0 - om;
    return (2.0 / (2.0 - a)) * std::pow(v, 0.5 * a - 1.0) * h(v);
  };
  q::Result rr =
      q::adaptive(right, 0.0, std::pow(0.5, 0.5 * (2.0 - a)), 1e-14, 1e-10, 20000);
  if (!rl.converged || !rr.converged)
    throw QuadratureFailure("check_nu_mu_identity: quadrature failure");
  double rhs = K * P.c_dalpha * std::pow(zn, -(double)P.d) * (rl.value + rr.value);
  double lhs = nu_radial(P, zn, 0.0);
  return std::abs(lhs - rhs) / lhs;
}

}  // namespace fraclap::ballgeom

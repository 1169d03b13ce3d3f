#include "fraclap/profile.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

#include "fraclap/quad.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap::profile {

namespace {

constexpr double kPi = 3.14159265358979323846;
namespace sf = fraclap::specfun;
namespace q = fraclap::quad;

void j0_pq(double x, double& P, double& Q) { sf::bessel_j0_pq(x, &P, &Q); }

double surface_area(int d) {  // |S^{d-1}|
  return 2.0 * std::pow(kPi, 0.5 * d) / sf::gamma(0.5 * d);
}

}  // namespace

double p1_at_zero(int d, double alpha) {
  return std::pow(2.0 * kPi, -d) * surface_area(d) * sf::gamma(d / alpha) / alpha;
}

namespace {

// 1/Gamma(x) as an entire function (zero at non-positive integers).
double inv_gamma(double x) {
  if (x > 0.5) return std::exp(-sf::log_gamma(x));
  if (x <= 0.5 && std::abs(x - std::round(x)) < 1e-11) return 0.0;
  double s = std::sin(kPi * std::remainder(x, 2.0));
  return s / kPi * std::exp(sf::log_gamma(1.0 - x));
}

// Far-field expansion of p_1:
//   p_1(rho) = sum_{k>=1} ((-1)^k / k!) 2^{k a} pi^{-d/2}
//              Gamma((d+ka)/2) / Gamma(-ka/2) * rho^{-d-ka},
// convergent for a < 1 and superasymptotic for a in [1,2) once rho >~ 20.
bool p1_far_series(int d, double alpha, double rho, double* out) {
  double sum = 0.0;
  double sign = -1.0;
  double lkf = 0.0;  // ln k!
  double prev = 1e300;
  for (int k = 1; k <= 400; ++k) {
    lkf += std::log((double)k);
    double ig = inv_gamma(-0.5 * k * alpha);
    double term = 0.0;
    if (ig != 0.0) {
      double lt = k * alpha * std::log(2.0) - 0.5 * d * std::log(kPi) +
                  sf::log_gamma(0.5 * (d + k * alpha)) - lkf -
                  (d + k * alpha) * std::log(rho);
      if (lt > 690.0) return false;
      term = sign * std::exp(lt) * ig;
    }
    sum += term;
    double at = std::abs(term);
    if (at > 0) {  // poles of 1/Gamma give exact zero terms; skip those
      if (k > 2 && at > prev) return false;  // asymptotic regime ended too early
      if (at < 1e-15 * std::abs(sum) && k >= 3) {
        *out = sum;
        return sum > 0.0;
      }
      prev = at;
    }
    sign = -sign;
  }
  return false;
}

}  // namespace

double p1_direct(int d, double alpha, double rho, double rel_tol,
                 bool allow_series) {
  if (rho < 1e-8) return p1_at_zero(d, alpha);
  if (allow_series && rho >= 25.0) {
    double v = 0.0;
    if (p1_far_series(d, alpha, rho, &v)) return v;
  }
  double smax = std::pow(39.0, 1.0 / alpha);  // e^{-s^alpha} < 1e-17 beyond
  double est = std::min(p1_at_zero(d, alpha), 3.0 * std::pow(rho, -(double)d - alpha));
  double abs_tol = std::max(1e-300, 0.2 * rel_tol * est);
  auto env = [alpha](double s) { return std::exp(-std::pow(s, alpha)); };

  if (d == 1 || d == 3) {
    // d=1: (1/pi) int e^{-s^a} cos(s rho) ds
    // d=3: (1/(2 pi^2 rho)) int e^{-s^a} s sin(s rho) ds
    double pref = (d == 1) ? 1.0 / kPi : 1.0 / (2.0 * kPi * kPi * rho);
    double phi = (d == 1) ? 0.0 : -0.5 * kPi;
    auto amp = [&](double s) { return (d == 1) ? env(s) : env(s) * s; };
    double s0 = std::min(smax, 6.0 / rho);
    // head with s = u^2 to remove the cusp of e^{-s^alpha} at 0
    q::Fn head = [&](double u) {
      double s = u * u;
      return 2.0 * u * amp(s) * std::cos(rho * s + phi);
    };
    q::Result rh = q::adaptive(head, 0.0, std::sqrt(s0), abs_tol / pref * 0.3,
                               1e-12, 20000);
    q::Result ro;
    if (s0 < smax)
      ro = q::osc_cos(amp, rho, phi, s0, smax, abs_tol / pref * 0.3, 1e-12, 20000);
    double val = pref * (rh.value + ro.value);
    double err = pref * (rh.error + ro.error);
    if (err > 50.0 * std::max(abs_tol, rel_tol * std::abs(val)))
      throw QuadratureFailure("p1_direct: inversion quadrature failed");
    return val;
  }

  // d == 2: (1/(2 pi)) int e^{-s^a} J0(s rho) s ds
  double pref = 1.0 / (2.0 * kPi);
  double s1 = std::min(smax, 30.0 / rho);
  q::Fn head = [&](double u) {
    double s = u * u;
    return 2.0 * u * env(s) * s * sf::bessel_j0(s * rho);
  };
  q::Result rh = q::adaptive(head, 0.0, std::sqrt(s1), abs_tol / pref * 0.3,
                             1e-12, 40000);
  q::Result r1, r2;
  if (s1 < smax) {
    auto ampP = [&](double s) {
      double P, Q;
      j0_pq(s * rho, P, Q);
      return env(s) * s * std::sqrt(2.0 / (kPi * s * rho)) * P;
    };
    auto ampQ = [&](double s) {
      double P, Q;
      j0_pq(s * rho, P, Q);
      return env(s) * s * std::sqrt(2.0 / (kPi * s * rho)) * Q;
    };
    // J0(x) = sqrt(2/(pi x)) (P cos(x - pi/4) - Q sin(x - pi/4))
    r1 = q::osc_cos(ampP, rho, -0.25 * kPi, s1, smax, abs_tol / pref * 0.2, 1e-12,
                    20000);
    r2 = q::osc_cos(ampQ, rho, -0.25 * kPi + 0.5 * kPi, s1, smax,
                    abs_tol / pref * 0.2, 1e-12, 20000);
  }
  double val = pref * (rh.value + r1.value + r2.value);
  double err = pref * (rh.error + r1.error + r2.error);
  if (err > 50.0 * std::max(abs_tol, rel_tol * std::abs(val)))
    throw QuadratureFailure("p1_direct: Hankel inversion failed");
  return val;
}

double RadialProfile::value(double rho) const {
  rho = std::abs(rho);
  if (rho < rho_min) return p0 + c2 * rho * rho;
  if (rho >= rho_max) {
    // the far field follows the asymptotically exact series; the matched
    // power law is only a fallback (and the dump/continuity diagnostic)
    double v = 0.0;
    if (p1_far_series(d, alpha, rho, &v)) return v;
    return tail_coef * std::pow(rho, -(double)d - alpha);
  }
  double lr = std::log(rho);
  double lr0 = lnrho.front();
  double dlr = lnrho[1] - lnrho[0];
  int j = (int)((lr - lr0) / dlr);
  if (j < 0) j = 0;
  if (j > (int)lnrho.size() - 2) j = (int)lnrho.size() - 2;
  double t = (lr - lnrho[j]) / dlr;
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
  double h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t);
  double h11 = t * t * (t - 1);
  double v = h00 * lnp[j] + h10 * dlr * slope[j] + h01 * lnp[j + 1] +
             h11 * dlr * slope[j + 1];
  return std::exp(v);
}

double RadialProfile::dlog(double rho) const {
  rho = std::abs(rho);
  if (rho < rho_min) {
    double p = p0 + c2 * rho * rho;
    return 2.0 * c2 * rho * rho / p;
  }
  if (rho >= rho_max) {
    double h = 1e-3;
    double va = value(rho), vb = value(rho * (1.0 + h));
    if (va > 0 && vb > 0) return std::log(vb / va) / std::log1p(h);
    return -(double)d - alpha;
  }
  double lr = std::log(rho);
  double lr0 = lnrho.front();
  double dlr = lnrho[1] - lnrho[0];
  int j = (int)((lr - lr0) / dlr);
  if (j < 0) j = 0;
  if (j > (int)lnrho.size() - 2) j = (int)lnrho.size() - 2;
  double t = (lr - lnrho[j]) / dlr;
  double dh00 = 6 * t * (t - 1);
  double dh10 = (1 - t) * (1 - 3 * t);
  double dh01 = -6 * t * (t - 1);
  double dh11 = t * (3 * t - 2);
  return (dh00 * lnp[j] + dh01 * lnp[j + 1]) / dlr + dh10 * slope[j] +
         dh11 * slope[j + 1];
}

namespace {
void fill_slopes(RadialProfile& pr) {
  int n = pr.size();
  pr.slope.resize(n);
  double dlr = pr.lnrho[1] - pr.lnrho[0];
  for (int i = 0; i < n; ++i) {
    if (i >= 2 && i <= n - 3)
      pr.slope[i] = (-pr.lnp[i + 2] + 8 * pr.lnp[i + 1] - 8 * pr.lnp[i - 1] +
                     pr.lnp[i - 2]) /
                    (12 * dlr);
    else if (i == 0)
      pr.slope[i] = (-3 * pr.lnp[0] + 4 * pr.lnp[1] - pr.lnp[2]) / (2 * dlr);
    else if (i == n - 1)
      pr.slope[i] =
          (3 * pr.lnp[n - 1] - 4 * pr.lnp[n - 2] + pr.lnp[n - 3]) / (2 * dlr);
    else if (i == 1)
      pr.slope[i] = (pr.lnp[2] - pr.lnp[0]) / (2 * dlr);
    else
      pr.slope[i] = (pr.lnp[n - 1] - pr.lnp[n - 3]) / (2 * dlr);
  }
}
}  // namespace

RadialProfile build_p1_profile(int d, double alpha, int n) {
  RadialProfile pr;
  pr.d = d;
  pr.alpha = alpha;
  pr.rho_min = 1e-3;
  pr.rho_max = (alpha < 0.9) ? 4000.0 : 50.0;
  pr.p0 = p1_at_zero(d, alpha);
  pr.lnrho.resize(n);
  pr.lnp.resize(n);
  double l0 = std::log(pr.rho_min), l1 = std::log(pr.rho_max);
  for (int i = 0; i < n; ++i) {
    double lr = l0 + (l1 - l0) * i / (n - 1.0);
    pr.lnrho[i] = lr;
    double p = p1_direct(d, alpha, std::exp(lr), 1e-9);
    if (!(p > 0)) throw QuadratureFailure("build_p1_profile: non-positive value");
    pr.lnp[i] = std::log(p);
  }
  pr.c2 = (std::exp(pr.lnp[0]) - pr.p0) / (pr.rho_min * pr.rho_min);
  pr.tail_coef = std::exp(pr.lnp[n - 1]) * std::pow(pr.rho_max, (double)d + alpha);
  fill_slopes(pr);
  return pr;
}

namespace {

namespace fs = std::filesystem;

std::string cache_file(int d, double alpha) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "p1_d%d_a%.12g_v1.txt", d, alpha);
  return (fs::path(cache_dir()) / buf).string();
}

bool load_profile(const std::string& path, int d, double alpha, int n,
                  RadialProfile& pr) {
  std::ifstream in(path);
  if (!in) return false;
  std::string header;
  std::getline(in, header);
  if (header != "fraclap-profile v1") return false;
  int fd = 0, fn = 0;
  double fa = 0, rmin = 0, rmax = 0, p0 = 0;
  in >> fd >> fa >> fn >> rmin >> rmax >> p0;
  if (!in || fd != d || fn != n || std::abs(fa - alpha) > 1e-14) return false;
  pr.d = d;
  pr.alpha = alpha;
  pr.rho_min = rmin;
  pr.rho_max = rmax;
  pr.p0 = p0;
  pr.lnrho.resize(n);
  pr.lnp.resize(n);
  for (int i = 0; i < n; ++i) {
    double rho = 0, p = 0;
    in >> rho >> p;
    if (!in || !(rho > 0) || !(p > 0)) return false;
    pr.lnrho[i] = std::log(rho);
    pr.lnp[i] = std::log(p);
  }
  pr.c2 = (std::exp(pr.lnp[0]) - pr.p0) / (pr.rho_min * pr.rho_min);
  pr.tail_coef = std::exp(pr.lnp[n - 1]) * std::pow(pr.rho_max, (double)d + alpha);
  fill_slopes(pr);
  return true;
}

void store_profile(const std::string& path, const RadialProfile& pr) {
  std::error_code ec;
  fs::create_directories(fs::path(path).parent_path(), ec);
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) return;
    out << "fraclap-profile v1\n";
    char buf[256];
    std::snprintf(buf, sizeof buf, "%d %.17g %d %.17g %.17g %.17g\n", pr.d,
                  pr.alpha, pr.size(), pr.rho_min, pr.rho_max, pr.p0);
    out << buf;
    for (int i = 0; i < pr.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g %.17g\n", std::exp(pr.lnrho[i]),
                    std::exp(pr.lnp[i]));
      out << buf;
    }
  }
  fs::rename(tmp, path, ec);
  if (ec) fs::remove(tmp, ec);
}

}  // namespace

std::string cache_dir() {
  if (const char* env = std::getenv("FRACLAP_CACHE_DIR")) return env;
  if (const char* home = std::getenv("HOME"))
    return (fs::path(home) / ".cache" / "fraclap").string();
  return "fraclap-cache";
}

std::shared_ptr<const RadialProfile> p1_profile(int d, double alpha) {
  static std::mutex mu;
  static std::map<std::pair<int, double>, std::shared_ptr<const RadialProfile>>
      cache;
  std::lock_guard<std::mutex> lk(mu);
  auto key = std::make_pair(d, alpha);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  const int n = 2048;
  auto pr = std::make_shared<RadialProfile>();
  std::string path = cache_file(d, alpha);
  if (!load_profile(path, d, alpha, n, *pr)) {
    *pr = build_p1_profile(d, alpha, n);
    store_profile(path, *pr);
  }
  cache[key] = pr;
  return pr;
}

}  // namespace fraclap::profile

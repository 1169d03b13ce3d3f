#include "fraclap/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <atomic>
#include <map>
#include <mutex>
#include <thread>

#include "fraclap/quad.hpp"
#include "fraclap/specfun.hpp"
#include "fraclap/sphere.hpp"

namespace fraclap::mc {

namespace {
constexpr double kPi = 3.14159265358979323846;
namespace q = fraclap::quad;
namespace sf = fraclap::specfun;

uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

uint64_t rotl(uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

void run_parallel(long n, int threads, const std::function<void(long)>& body) {
  threads = std::max(1, threads);
  if (threads == 1) {
    for (long i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<long> cursor{0};
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        long i = cursor.fetch_add(256);
        if (i >= n) break;
        long hi = std::min(n, i + 256);
        for (long j = i; j < hi; ++j) body(j);
      }
    });
  for (auto& th : pool) th.join();
}

}  // namespace

Rng::Rng(uint64_t seed) {
  uint64_t st = seed;
  for (int i = 0; i < 4; ++i) s[i] = splitmix64(st);
  if (!(s[0] | s[1] | s[2] | s[3])) s[0] = 1;
}

Rng Rng::for_path(uint64_t seed, uint64_t path) {
  return Rng(seed ^ (0x9E3779B97F4A7C15ULL * (path + 1)));
}

uint64_t Rng::next() {
  uint64_t result = rotl(s[0] + s[3], 23) + s[0];
  uint64_t t = s[1] << 17;
  s[2] ^= s[0];
  s[3] ^= s[1];
  s[1] ^= s[2];
  s[0] ^= s[3];
  s[2] ^= t;
  s[3] = rotl(s[3], 45);
  return result;
}

double Rng::uniform() {
  return ((next() >> 11) + 0.5) * (1.0 / 9007199254740992.0);
}

double Rng::normal() {
  if (has_cached) {
    has_cached = false;
    return cached;
  }
  double u1 = uniform(), u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  cached = r * std::sin(2.0 * kPi * u2);
  has_cached = true;
  return r * std::cos(2.0 * kPi * u2);
}

double Rng::expo() { return -std::log(uniform()); }

double sample_subordinator(double beta, Rng& rng) {
  double U = kPi * rng.uniform();
  double E = rng.expo();
  double A = std::sin((1.0 - beta) * U) *
             std::pow(std::sin(beta * U), beta / (1.0 - beta)) /
             std::pow(std::sin(U), 1.0 / (1.0 - beta));
  return std::pow(A / E, (1.0 - beta) / beta);
}

Point sample_stable_increment(const Params& P, double t, Rng& rng) {
  if (!(t > 0)) throw std::domain_error("sample_stable_increment: t > 0");
  double S = std::pow(t, 2.0 / P.alpha) * sample_subordinator(0.5 * P.alpha, rng);
  double sd = std::sqrt(2.0 * S);
  Point z{};
  for (int i = 0; i < P.d; ++i) z[i] = sd * rng.normal();
  return z;
}

// ---------------------------------------------------------------------------
// radial exit law

namespace {

// regularized incomplete beta-like CDF of s = T/(1+T), built by accumulation
struct FineCdf {
  std::vector<double> lnt, F;
};

FineCdf build_fine(double a) {
  // density over t: pdf(t) dt with s = t/(1+t):
  //   pdf_s(s) = s^{-a/2} (1-s)^{a/2-1} / B(1-a/2, a/2)
  double lB = sf::log_gamma(1.0 - 0.5 * a) + sf::log_gamma(0.5 * a);  // Beta(.)
  // note Gamma(1) = 1 so ln B = lg(1-a/2)+lg(a/2)-lg(1) reduces to the above
  FineCdf fc;
  const int n = 16384;
  fc.lnt.resize(n);
  fc.F.resize(n);
  double l0 = -34.0, l1 = 34.0;
  auto pdf_t = [&](double lt) {
    double t = std::exp(lt);
    double s = t / (1.0 + t);
    double lp = -0.5 * a * std::log(s) + (0.5 * a - 1.0) * std::log1p(-s) - lB;
    // jacobian ds = t/(1+t)^2 dlnt
    return std::exp(lp) * t / ((1.0 + t) * (1.0 + t));
  };
  // left analytic start: F ~ s^{1-a/2} / ((1-a/2) B)
  double t0 = std::exp(l0);
  double s0 = t0 / (1.0 + t0);
  double acc = std::exp((1.0 - 0.5 * a) * std::log(s0) - lB) / (1.0 - 0.5 * a);
  double prev = l0;
  for (int i = 0; i < n; ++i) {
    fc.lnt[i] = l0 + (l1 - l0) * i / (n - 1.0);
    if (fc.lnt[i] > prev) {
      q::Result r = q::adaptive(pdf_t, prev, fc.lnt[i], 1e-15, 1e-11, 2000);
      acc += r.value;
      prev = fc.lnt[i];
    }
    fc.F[i] = acc;
  }
  return fc;
}

}  // namespace

const RadialExitLaw& RadialExitLaw::get(double alpha) {
  static std::mutex mu;
  static std::map<double, RadialExitLaw> cache;
  std::lock_guard<std::mutex> lk(mu);
  auto it = cache.find(alpha);
  if (it != cache.end()) return it->second;
  RadialExitLaw law;
  law.alpha = alpha;
  law.lB = sf::log_gamma(1.0 - 0.5 * alpha) + sf::log_gamma(0.5 * alpha);
  FineCdf fc = build_fine(alpha);
  const int n = 4096;
  law.u.resize(n);
  law.lnt.resize(n);
  size_t j = 0;
  for (int i = 0; i < n; ++i) {
    double u = law.umin + (1.0 - 2.0 * law.umin) * i / (n - 1.0);
    law.u[i] = u;
    while (j + 2 < fc.F.size() && fc.F[j + 1] < u) ++j;
    // local linear-in-F inversion on the fine table, then refine by bisection
    double lo = fc.lnt[j], hi = fc.lnt[std::min(j + 1, fc.lnt.size() - 1)];
    double Flo = fc.F[j], Fhi = fc.F[std::min(j + 1, fc.F.size() - 1)];
    double lt = (Fhi > Flo) ? lo + (hi - lo) * (u - Flo) / (Fhi - Flo) : lo;
    law.lnt[i] = lt;
  }
  // analytic slopes dlnt/du = 1 / (pdf_s(s) ds/dlnt)
  law.slope.resize(n);
  for (int i = 0; i < n; ++i) {
    double t = std::exp(law.lnt[i]);
    double s = t / (1.0 + t);
    double lp = -0.5 * alpha * std::log(s) + (0.5 * alpha - 1.0) * std::log1p(-s) -
                law.lB;
    double dudlnt = std::exp(lp) * t / ((1.0 + t) * (1.0 + t));
    law.slope[i] = 1.0 / dudlnt;
  }
  return cache.emplace(alpha, std::move(law)).first->second;
}

double RadialExitLaw::sample_T(double unif) const {
  double a = alpha;
  if (unif <= umin) {
    // F ~ s^{1-a/2}/((1-a/2) B); here t ~ s
    double s = std::pow(unif * (1.0 - 0.5 * a) * std::exp(lB), 1.0 / (1.0 - 0.5 * a));
    return s / (1.0 - s);
  }
  if (unif >= 1.0 - umin) {
    // 1-F ~ (1-s)^{a/2}/((a/2) B)
    double om = std::pow((1.0 - unif) * 0.5 * a * std::exp(lB), 2.0 / a);
    om = std::min(om, 1.0 - 1e-15);
    return (1.0 - om) / om;
  }
  double du = u[1] - u[0];
  int j = (int)((unif - u[0]) / du);
  j = std::min(std::max(j, 0), (int)u.size() - 2);
  double t = (unif - u[j]) / du;
  // monotone cubic (Fritsch-Carlson limited slopes)
  double m0 = slope[j] * du, m1 = slope[j + 1] * du;
  double dlt = lnt[j + 1] - lnt[j];
  if (dlt > 0) {
    m0 = std::min(m0, 3.0 * dlt);
    m1 = std::min(m1, 3.0 * dlt);
  }
  double h00 = (1 + 2 * t) * (1 - t) * (1 - t), h10 = t * (1 - t) * (1 - t);
  double h01 = t * t * (3 - 2 * t), h11 = t * t * (t - 1);
  double lt = h00 * lnt[j] + h10 * m0 + h01 * lnt[j + 1] + h11 * m1;
  return std::exp(lt);
}

double RadialExitLaw::cdf_T(double T) const {
  if (!(T > 0)) return 0.0;
  double a = alpha;
  double s = T / (1.0 + T);
  // direct quadrature of the beta density with endpoint flattening
  // left piece v = s'^{1-a/2}; F = int_0^s pdf ds'
  double e1 = 1.0 - 0.5 * a;
  if (s <= 0.5) {
    q::Fn g = [&](double v) {
      double sp = std::pow(v, 1.0 / e1);
      return std::pow(1.0 - sp, 0.5 * a - 1.0) / e1;
    };
    q::Result r = q::adaptive(g, 0.0, std::pow(s, e1), 1e-14, 1e-11, 4000);
    return r.value * std::exp(-lB);
  }
  double e2 = 0.5 * a;
  q::Fn g = [&](double w) {
    double om = std::pow(w, 1.0 / e2);  // om = 1 - s'
    return std::pow(1.0 - om, -0.5 * a) / e2;
  };
  q::Result r = q::adaptive(g, 0.0, std::pow(1.0 - s, e2), 1e-14, 1e-11, 4000);
  return 1.0 - r.value * std::exp(-lB);
}

Point sample_exit_position(const Params& P, const ballgeom::BallSpec& ball,
                           Rng& rng) {
  const RadialExitLaw& law = RadialExitLaw::get(P.alpha);
  double yn = norm(ball.y, P.d);
  auto draw0 = [&]() {
    double T = law.sample_T(rng.uniform());
    double rho = ball.r * std::sqrt(1.0 + T);
    Point dir{};
    if (P.d == 1) {
      dir[0] = rng.uniform() < 0.5 ? -1.0 : 1.0;
    } else if (P.d == 2) {
      double phi = 2.0 * kPi * rng.uniform();
      dir = point(std::cos(phi), std::sin(phi), 0);
    } else {
      double ct = 2.0 * rng.uniform() - 1.0;
      double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      double phi = 2.0 * kPi * rng.uniform();
      dir = point(st * std::cos(phi), st * std::sin(phi), ct);
    }
    return axpy(point(), rho, dir, P.d);
  };
  if (yn == 0.0) return draw0();
  // rejection against the centered law
  double ratio_pref = std::pow((ball.r - yn) * (ball.r + yn), 0.5 * P.alpha) /
                      std::pow(ball.r, P.alpha);
  double M = ratio_pref * std::pow(ball.r / (ball.r - yn), (double)P.d);
  for (int it = 0; it < 100000; ++it) {
    Point z = draw0();
    double ratio = ratio_pref * std::pow(norm(z, P.d) / norm(sub(z, ball.y, P.d), P.d),
                                         (double)P.d);
    if (rng.uniform() * M <= ratio) return z;
  }
  throw std::runtime_error("sample_exit_position: rejection budget exhausted");
}

std::vector<ExitSample> simulate_exit(const Params& P, const MCConfig& cfg,
                                      const Point& start) {
  ballgeom::validate(P, cfg.ball);
  if (!(norm(sub(start, cfg.ball.y, P.d), P.d) < 1e-15) )
    throw std::invalid_argument("simulate_exit: start must equal ball.y");
  std::vector<ExitSample> out((size_t)cfg.n_paths);
  if (cfg.mode == ExitMode::exact_exit) {
    run_parallel(cfg.n_paths, cfg.threads, [&](long i) {
      Rng rng = Rng::for_path(cfg.seed, (uint64_t)i);
      ExitSample s;
      s.pos = sample_exit_position(P, cfg.ball, rng);
      s.time = std::numeric_limits<double>::quiet_NaN();
      s.steps = 1;
      out[(size_t)i] = s;
    });
    return out;
  }
  if (!(cfg.dt > 0)) throw std::domain_error("simulate_exit: dt > 0 in path mode");
  run_parallel(cfg.n_paths, cfg.threads, [&](long i) {
    Rng rng = Rng::for_path(cfg.seed, (uint64_t)i);
    Point pos = cfg.ball.y;
    long steps = 0;
    const long budget = 100000000;
    while (norm(pos, P.d) <= cfg.ball.r) {
      Point z = sample_stable_increment(P, cfg.dt, rng);
      pos = axpy(pos, 1.0, z, P.d);
      if (++steps > budget)
        throw std::runtime_error("simulate_exit: path exceeded step budget");
    }
    out[(size_t)i] = {pos, steps * cfg.dt, steps};
  });
  return out;
}

DynkinReport check_dynkin_formula(const Params& P, const MCConfig& cfg,
                                  const TestFunction& f, const Point& x,
                                  double lambda) {
  if (lambda != 0.0)
    throw Unsupported("check_dynkin_formula: the lambda = 0 form is implemented");
  DynkinReport rep;
  rep.n = cfg.n_paths;
  MCConfig c = cfg;
  c.mode = ExitMode::exact_exit;
  c.ball.y = point();  // exit from B(x, r): displacements from the center
  std::vector<ExitSample> samples = simulate_exit(P, c, point());
  double sum = 0, sum2 = 0;
  for (const auto& s : samples) {
    double v = f(axpy(x, 1.0, s.pos, P.d));
    sum += v;
    sum2 += v * v;
  }
  double n = (double)samples.size();
  rep.mc_mean = sum / n;
  double var = std::max(0.0, sum2 / n - rep.mc_mean * rep.mc_mean);
  rep.std_error = std::sqrt(var / n);

  // deterministic side: f(x) + int_{B_r} L f(x+z) gamma_r(0,z) dz
  namespace bg = fraclap::ballgeom;
  bg::BallSpec ball(c.ball.r, point());
  ops::OpOptions o;
  const auto& ang = fraclap::sphere::rule(P.d);
  double sd = surface_area(P.d);
  double integral = 0;
  auto lf_at = [&](const Point& y) {
    return ops::op_singular_compensated(P, f, y, o).value;
  };
  for (size_t ai = 0; ai < ang.dirs.size(); ++ai) {
    q::Fn g = [&](double rho) {
      Point z = axpy(point(), rho, ang.dirs[ai], P.d);
      return lf_at(axpy(x, 1.0, z, P.d)) * bg::green_ball(P, ball, z) *
             std::pow(rho, P.d - 1.0);
    };
    // rho = R v^{1/alpha} flattens the Green singularity at the center
    q::Fn h = [&](double v) {
      double rho = ball.r * std::pow(v, 1.0 / P.alpha);
      return g(rho) * (ball.r / P.alpha) * std::pow(v, 1.0 / P.alpha - 1.0);
    };
    q::Result r = q::adaptive_pts(h, 0.0, 1.0, {0.7, 0.95}, 1e-10, 1e-7, 600);
    integral += ang.w[ai] * sd * r.value;
  }
  rep.deterministic = f(x) + integral;
  rep.residual = rep.mc_mean - rep.deterministic;
  rep.sigmas = rep.std_error > 0 ? std::abs(rep.residual) / rep.std_error : 0.0;
  return rep;
}

CharopReport mc_characteristic_operator(const Params& P, const TestFunction& f,
                                        const Point& x,
                                        const std::vector<double>& radii,
                                        const MCConfig& cfg) {
  CharopReport rep;
  double fx = f(x);
  std::vector<double> vals;
  for (size_t k = 0; k < radii.size(); ++k) {
    MCConfig c = cfg;
    c.mode = ExitMode::exact_exit;
    c.ball = ballgeom::BallSpec(radii[k], point());
    c.seed = cfg.seed + 1000 * k;
    std::vector<ExitSample> samples = simulate_exit(P, c, point());
    double sum = 0, sum2 = 0;
    for (const auto& s : samples) {
      double v = f(axpy(x, 1.0, s.pos, P.d));
      sum += v;
      sum2 += v * v;
    }
    double n = (double)samples.size();
    double mean = sum / n;
    double se = std::sqrt(std::max(0.0, sum2 / n - mean * mean) / n);
    double mass = ballgeom::green_mass(P, radii[k], 0.0);
    vals.push_back((mean - fx) / mass);
    rep.std_errors.push_back(se / mass);
  }
  rep.table.scales = radii;
  rep.table.values = vals;
  // statistical floor check: inter-scale signal vs noise
  double sig = 0, noise = 0;
  for (size_t k = 0; k + 1 < vals.size(); ++k) {
    sig = std::max(sig, std::abs(vals[k + 1] - vals[k]));
    noise = std::max(noise, rep.std_errors[k] + rep.std_errors[k + 1]);
  }
  rep.statistical_floor = sig < 2.0 * noise;
  if (!rep.statistical_floor && radii.size() >= 4) {
    ops::ConvergenceTable t =
        ops::extrapolate(radii, vals, {{2.0 - P.alpha}, 1e-6, 1e-4});
    rep.table = t;
  } else {
    rep.table.extrapolated = vals.back();
    rep.table.converged = false;
  }
  double se_sum = 0;
  for (double s : rep.std_errors) se_sum += s * s;
  rep.combined_se = std::sqrt(se_sum / std::max<size_t>(1, rep.std_errors.size()));
  ops::EvalReport det = ops::op_dynkin(P, f, x);
  rep.reference = det.value;
  return rep;
}

double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf) {
  std::sort(samples.begin(), samples.end());
  double n = (double)samples.size();
  double d = 0;
  for (size_t i = 0; i < samples.size(); ++i) {
    double F = cdf(samples[i]);
    d = std::max(d, std::abs((i + 1) / n - F));
    d = std::max(d, std::abs(F - i / n));
  }
  return d;
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double d = 0;
  size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j])
      ++i;
    else
      ++j;
    d = std::max(d, std::abs((double)i / a.size() - (double)j / b.size()));
  }
  return d;
}

}  // namespace fraclap::mc

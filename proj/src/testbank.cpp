#include "fraclap/testbank.hpp"

#include <cmath>
#include <random>

#include "fraclap/quad.hpp"
#include "fraclap/specfun.hpp"

namespace fraclap::bank {

namespace {
constexpr double kPi = 3.14159265358979323846;
namespace q = fraclap::quad;
namespace sf = fraclap::specfun;

// Inverse radial Fourier transform used for the bank's own oracles and
// self-validation; independent of the operator module.
double inv_ft_radial(int d, const q::Fn& g, double rho, double xi_max) {
  q::Result r;
  std::vector<double> pts = {xi_max * 1e-3, xi_max * 0.03, xi_max * 0.3};
  if (d == 1) {
    r = q::adaptive_pts([&](double xi) { return g(xi) * std::cos(xi * rho); },
                        0.0, xi_max, pts, 1e-15, 1e-12, 40000);
    return r.value / kPi;
  }
  if (d == 2) {
    r = q::adaptive_pts(
        [&](double xi) { return g(xi) * xi * sf::bessel_j0(xi * rho); }, 0.0,
        xi_max, pts, 1e-15, 1e-12, 40000);
    return r.value / (2.0 * kPi);
  }
  if (rho < 1e-10) {
    r = q::adaptive_pts([&](double xi) { return g(xi) * xi * xi; }, 0.0, xi_max,
                        pts, 1e-15, 1e-12, 40000);
    return r.value / (2.0 * kPi * kPi);
  }
  r = q::adaptive_pts(
      [&](double xi) { return g(xi) * xi * std::sin(xi * rho); }, 0.0, xi_max,
      pts, 1e-15, 1e-12, 40000);
  return r.value / (2.0 * kPi * kPi * rho);
}

TestFunction make_gaussian(const Params& P, const std::string& name, Point c,
                           double scale) {
  // f(x) = exp(-|scale*(x-c)|^2), F f radial about c.
  TestFunction tf;
  tf.name = name;
  tf.dim = P.d;
  tf.decay = Decay::schwartz;
  tf.radial = true;
  tf.center = c;
  int d = P.d;
  tf.f = [c, scale, d](const Point& x) {
    return std::exp(-scale * scale * norm2(sub(x, c, d), d));
  };
  tf.grad = [c, scale, d](const Point& x) {
    Point g{0, 0, 0};
    double v = std::exp(-scale * scale * norm2(sub(x, c, d), d));
    for (int i = 0; i < d; ++i) g[i] = -2.0 * scale * scale * (x[i] - c[i]) * v;
    return g;
  };
  double pref = std::pow(kPi, 0.5 * d) / std::pow(scale, (double)d);
  tf.fourier_radial = [pref, scale](double xi) {
    return pref * std::exp(-xi * xi / (4.0 * scale * scale));
  };
  tf.fourier_xi_max = 14.0 * scale;
  tf.far_scale = 7.0 / scale;
  double xm = tf.fourier_xi_max;
  tf.oracle = [pref, scale, xm, c](const Params& Q, const Point& x) {
    q::Fn g = [&](double xi) {
      return -std::pow(xi, Q.alpha) * pref * std::exp(-xi * xi / (4 * scale * scale));
    };
    return inv_ft_radial(Q.d, g, norm(sub(x, c, Q.d), Q.d), xm);
  };
  tf.oracle_note = "radial Fourier quadrature of -(2pi)^{-d} |xi|^a F f";
  return tf;
}

}  // namespace

std::vector<TestFunction> bank_standard(const Params& P) {
  std::vector<TestFunction> out;
  out.push_back(make_gaussian(P, "gaussian", point(), 1.0));
  Point sh = point(0.6, -0.3, 0.2);
  for (int i = P.d; i < 3; ++i) sh[i] = 0.0;
  out.push_back(make_gaussian(P, "gaussian_shift", sh, 1.0));
  out.push_back(make_gaussian(P, "gaussian_wide", point(), 0.5));

  {
    TestFunction tf;
    tf.name = "cauchy";
    tf.dim = P.d;
    tf.decay = Decay::power;
    tf.decay_param = P.d + 1.0;
    tf.radial = true;
    int d = P.d;
    double ex = 0.5 * (d + 1.0);
    tf.f = [d, ex](const Point& x) {
      return std::pow(1.0 + norm2(x, d), -ex);
    };
    tf.grad = [d, ex](const Point& x) {
      Point g{0, 0, 0};
      double v = std::pow(1.0 + norm2(x, d), -ex - 1.0);
      for (int i = 0; i < d; ++i) g[i] = -2.0 * ex * x[i] * v;
      return g;
    };
    double pref = std::pow(kPi, 0.5 * (d + 1.0)) / sf::gamma(0.5 * (d + 1.0));
    tf.fourier_radial = [pref](double xi) { return pref * std::exp(-xi); };
    tf.fourier_xi_max = 42.0;
    tf.far_scale = 10.0;
    tf.oracle = [pref](const Params& Q, const Point& x) {
      q::Fn g = [&](double xi) {
        return -std::pow(xi, Q.alpha) * pref * std::exp(-xi);
      };
      return inv_ft_radial(Q.d, g, norm(x, Q.d), 120.0);
    };
    tf.oracle_note = "radial Fourier quadrature; F f = pref * exp(-|xi|)";
    out.push_back(tf);
  }

  {
    TestFunction tf;
    tf.name = "bump";
    tf.dim = P.d;
    tf.decay = Decay::compact;
    tf.decay_param = 2.0;  // support radius
    tf.radial = true;
    int d = P.d;
    tf.f = [d](const Point& x) {
      double s = 0.25 * norm2(x, d);
      if (s >= 1.0) return 0.0;
      return std::exp(1.0 - 1.0 / (1.0 - s));
    };
    tf.grad = [d](const Point& x) {
      Point g{0, 0, 0};
      double s = 0.25 * norm2(x, d);
      if (s >= 1.0) return g;
      double v = std::exp(1.0 - 1.0 / (1.0 - s));
      double w = 1.0 - s;
      for (int i = 0; i < d; ++i) g[i] = -v * 0.5 * x[i] / (w * w);
      return g;
    };
    tf.far_scale = 2.5;
    out.push_back(tf);
  }
  return out;
}

std::vector<TestFunction> bank_special(const Params& P) {
  std::vector<TestFunction> out;
  if (P.d >= 2) {
    TestFunction tf;
    tf.name = "harmonic_poly";
    tf.dim = P.d;
    tf.decay = Decay::poly_growth;
    tf.decay_param = 2.0;
    tf.f = [](const Point& x) { return x[0] * x[0] - x[1] * x[1]; };
    tf.grad = [](const Point& x) {
      return Point{2.0 * x[0], -2.0 * x[1], 0.0};
    };
    tf.oracle = [](const Params&, const Point&) { return 0.0; };
    tf.oracle_note = "harmonic: f*k_t = f, so the Bochner integrand vanishes";
    tf.refuses = {"F", "R", "BB"};
    tf.note = "admitted by the Bochner route only";
    out.push_back(tf);
  }
  if (P.alpha > 1.0) {
    TestFunction tf;
    double a = P.alpha;
    tf.name = "abs_x1";
    tf.dim = P.d;
    tf.decay = Decay::poly_growth;
    tf.decay_param = a - 1.0;
    tf.f = [a](const Point& x) { return std::pow(std::abs(x[0]), a - 1.0); };
    tf.grad = [a](const Point& x) {
      Point g{0, 0, 0};
      if (x[0] != 0.0)
        g[0] = (a - 1.0) * std::pow(std::abs(x[0]), a - 2.0) *
               (x[0] > 0 ? 1.0 : -1.0);
      return g;
    };
    int d = P.d;
    tf.kinks = [d](const Point& x) {
      return std::vector<double>{std::abs(x[0])};
    };
    tf.oracle = [](const Params&, const Point& x) {
      if (x[0] == 0.0) return 0.0;
      return 0.0;  // Dynkin value vanishes off the hyperplane as well
    };
    tf.oracle_note = "|x1|^{a-1} is in the Dynkin kernel off the hyperplane";
    tf.refuses = {"F", "R", "BB"};
    out.push_back(tf);
  }
  return out;
}

std::vector<TestFunction> bank_pathological(const Params& P) {
  std::vector<TestFunction> out;
  const int nmax = 20;
  {
    TestFunction tf;
    tf.name = "path_I_not_D";
    tf.dim = P.d;
    tf.decay = Decay::compact;
    tf.decay_param = 1.0;
    tf.radial = true;
    RadialStructure st;
    for (int n = 1; n <= nmax; ++n)
      st.edge_shells.push_back({std::pow(2.0, -n), std::pow(5.0, -n)});
    tf.structure = st;
    double a = P.alpha;
    int d = P.d;
    auto shells = st.edge_shells;
    tf.f = [shells, a, d](const Point& x) {
      double rho = norm(x, d);
      double s = 0;
      for (const auto& sh : shells)
        if (rho > sh.rn && rho <= 2.0 * sh.rn)
          s += sh.eps * std::pow(rho * rho - sh.rn * sh.rn, 0.5 * a - 1.0);
      return s;
    };
    tf.refuses = {"F", "R", "BB", "B", "I-compensated", "I-symmetrized"};
    tf.nonconv = {"D"};
    tf.note =
        "shell edges carry (rho^2-rn^2)^{a/2-1}; the Dynkin kernel at r = rn "
        "is not integrable against them";
    out.push_back(tf);
  }
  {
    TestFunction tf;
    tf.name = "path_S_not_I";
    tf.dim = P.d;
    tf.decay = Decay::compact;
    tf.decay_param = 1.5;
    tf.radial = true;
    RadialStructure st;
    for (int n = 1; n <= nmax; ++n)
      st.pair_shells.push_back(
          {std::pow(2.0, -n), std::pow(4.0, -n), n * std::pow(8.0, n)});
    tf.structure = st;
    double a = P.alpha;
    int d = P.d;
    auto shells = st.pair_shells;
    tf.f = [shells, a, d](const Point& x) {
      double rho = norm(x, d);
      double s = 0;
      for (const auto& sh : shells) {
        if (rho > sh.rn && rho <= (1.0 + sh.delta) * sh.rn)
          s += sh.eps * std::pow(rho, 1.0 + a);
        else if (rho > (1.0 - sh.delta) * sh.rn && rho <= sh.rn)
          s -= sh.eps * std::pow(rho, 1.0 + a);
      }
      return s;
    };
    tf.refuses = {"F", "R", "BB", "B", "I-compensated", "I-symmetrized"};
    tf.nonconv = {"I", "D"};
    tf.note =
        "antisymmetric double shells: scale-r partial singular integrals grow "
        "like n at r = 2^{-n} while the semigroup limit is 0";
    out.push_back(tf);
  }
  return out;
}

std::vector<TestFunction> bank_all(const Params& P) {
  auto a = bank_standard(P);
  auto b = bank_special(P);
  auto c = bank_pathological(P);
  a.insert(a.end(), b.begin(), b.end());
  a.insert(a.end(), c.begin(), c.end());
  return a;
}

TestFunction find(const Params& P, const std::string& name) {
  for (auto& tf : bank_all(P))
    if (tf.name == name) return tf;
  throw std::invalid_argument("unknown test function: " + name);
}

std::vector<std::string> validate(const Params& P, const TestFunction& tf) {
  std::vector<std::string> issues;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  if (tf.has_grad()) {
    int bad = 0;
    for (int it = 0; it < 10; ++it) {
      Point x{};
      for (int i = 0; i < P.d; ++i) x[i] = u(rng);
      if (tf.kinks) {  // keep away from non-smooth sets
        bool near = false;
        for (double r : tf.kinks(x))
          if (r < 0.2) near = true;
        if (near) continue;
      }
      Point g = tf.grad(x);
      for (int i = 0; i < P.d; ++i) {
        double h = 1e-6;
        Point xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        double fd = (tf(xp) - tf(xm)) / (2.0 * h);
        double scale = std::abs(g[i]) + std::abs(fd) + 1e-6;
        if (std::abs(fd - g[i]) / scale > 1e-4) ++bad;
      }
    }
    if (bad > 0) issues.push_back(tf.name + ": gradient mismatch");
  }
  if (tf.has_fourier()) {
    for (double rho : {0.0, 0.4, 1.1, 2.3, 3.7}) {
      double back = inv_ft_radial(P.d, tf.fourier_radial, rho, tf.fourier_xi_max);
      Point x = axpy(tf.center, rho, point(1, 0, 0), P.d);
      if (std::abs(back - tf(x)) > 1e-8 * (1.0 + std::abs(tf(x))))
        issues.push_back(tf.name + ": Fourier profile does not invert to f");
    }
  }
  return issues;
}

}  // namespace fraclap::bank

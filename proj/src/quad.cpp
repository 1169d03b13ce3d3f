#include "fraclap/quad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <queue>

namespace fraclap::quad {

namespace {

constexpr double kPi = 3.14159265358979323846;

Rule make_legendre(int n) {
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < n; ++i) {
    // Standard initial guess, then Newton on P_n.
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 1; k < n; ++k) {
        double p2 = ((2 * k + 1) * x * p1 - k * p0) / (k + 1);
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.x[i] = x;
    r.w[i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return r;
}

// Orthonormal Hermite recurrence for weight exp(-x^2).
double hermite_eval(int n, double x, double* dval) {
  double h0 = std::pow(kPi, -0.25), h1 = std::sqrt(2.0) * x * h0;
  if (n == 0) {
    if (dval) *dval = 0;
    return h0;
  }
  for (int k = 1; k < n; ++k) {
    double h2 = x * std::sqrt(2.0 / (k + 1.0)) * h1 - std::sqrt(k / (k + 1.0)) * h0;
    h0 = h1;
    h1 = h2;
  }
  if (dval) *dval = std::sqrt(2.0 * n) * h0;
  return h1;
}

Rule make_hermite(int n) {
  // Roots by sign scan + bisection + Newton, weights by Christoffel numbers.
  Rule r;
  double xmax = std::sqrt(2.0 * n + 1.0) + 1.0;
  int grid = 50 * n;
  double prev_x = -xmax, prev_v = hermite_eval(n, prev_x, nullptr);
  std::vector<double> roots;
  for (int i = 1; i <= grid; ++i) {
    double x = -xmax + 2.0 * xmax * i / grid;
    double v = hermite_eval(n, x, nullptr);
    if (prev_v == 0.0) roots.push_back(prev_x);
    if (prev_v * v < 0) {
      double a = prev_x, b = x;
      for (int it = 0; it < 80; ++it) {
        double m = 0.5 * (a + b);
        double vm = hermite_eval(n, m, nullptr);
        if (vm == 0) {
          a = b = m;
          break;
        }
        if (vm * prev_v < 0)
          b = m;
        else {
          a = m;
          prev_v = vm;
        }
      }
      double root = 0.5 * (a + b);
      for (int it = 0; it < 8; ++it) {
        double d;
        double v0 = hermite_eval(n, root, &d);
        if (d == 0) break;
        root -= v0 / d;
      }
      roots.push_back(root);
      prev_v = hermite_eval(n, x, nullptr);
    } else {
      prev_v = v;
    }
    prev_x = x;
  }
  r.x = roots;
  r.w.resize(roots.size());
  for (size_t i = 0; i < roots.size(); ++i) {
    double s = 0;
    for (int k = 0; k < n; ++k) {
      double hk = hermite_eval(k, roots[i], nullptr);
      s += hk * hk;
    }
    r.w[i] = 1.0 / s;
  }
  return r;
}

const Rule& cached(int n, std::map<int, Rule>& store, std::mutex& mu,
                   Rule (*make)(int)) {
  std::lock_guard<std::mutex> lk(mu);
  auto it = store.find(n);
  if (it == store.end()) it = store.emplace(n, make(n)).first;
  return it->second;
}

struct Panel {
  double a, b, val, err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

Panel eval_panel(const Fn& f, double a, double b, long* evals) {
  const Rule& g7 = gauss_legendre(7);
  const Rule& g15 = gauss_legendre(15);
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double i7 = 0, i15 = 0;
  for (int i = 0; i < 7; ++i) i7 += g7.w[i] * f(c + h * g7.x[i]);
  for (int i = 0; i < 15; ++i) i15 += g15.w[i] * f(c + h * g15.x[i]);
  *evals += 22;
  i7 *= h;
  i15 *= h;
  double err = std::abs(i15 - i7);
  return {a, b, i15, err};
}

}  // namespace

const Rule& gauss_legendre(int n) {
  static std::map<int, Rule> store;
  static std::mutex mu;
  return cached(n, store, mu, make_legendre);
}

const Rule& gauss_hermite(int n) {
  static std::map<int, Rule> store;
  static std::mutex mu;
  return cached(n, store, mu, make_hermite);
}

double fixed_gl(const Fn& f, double a, double b, int n) {
  const Rule& g = gauss_legendre(n);
  double c = 0.5 * (a + b), h = 0.5 * (b - a), s = 0;
  for (int i = 0; i < n; ++i) s += g.w[i] * f(c + h * g.x[i]);
  return s * h;
}

Result tail_power(const Fn& g, double a, double lam, double abs_tol,
                  double rel_tol, int max_intervals) {
  if (!(a > 0) || !(lam > 0))
    throw std::domain_error("tail_power: requires a > 0 and lam > 0");
  Fn h = [&](double m) {
    double rho = a * std::pow(m, -1.0 / lam);
    return g(rho) * (a / lam) * std::pow(m, -1.0 / lam - 1.0);
  };
  return adaptive(h, 0.0, 1.0, abs_tol, rel_tol, max_intervals);
}

Result edge_power(const Fn& f, double r, double b, double alpha, double abs_tol,
                  double rel_tol, int max_intervals) {
  double U = std::acosh(b / r);
  double qe = 1.0 / (2.0 - alpha);
  double W = std::pow(U, 1.0 / qe);
  Fn g = [&](double w) {
    double u = std::pow(w, qe);
    double rho = r * std::cosh(u);
    double sh = std::sinh(u);
    return f(rho) * std::pow(r, 1.0 - alpha) * std::pow(sh, 1.0 - alpha) * qe *
           std::pow(w, qe - 1.0);
  };
  return adaptive(g, 0.0, W, abs_tol, rel_tol, max_intervals);
}

Result adaptive_pts(const Fn& f, double a, double b, std::vector<double> pts,
                    double abs_tol, double rel_tol, int max_intervals) {
  Result out;
  if (a == b) return out;
  pts.push_back(a);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  std::priority_queue<Panel> heap;
  double total = 0, toterr = 0;
  int count = 0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    if (pts[i] < a || pts[i + 1] > b) continue;
    Panel p = eval_panel(f, pts[i], pts[i + 1], &out.evals);
    total += p.val;
    toterr += p.err;
    heap.push(p);
    ++count;
  }
  auto tol = [&]() { return std::max(abs_tol, rel_tol * std::abs(total)); };
  double best_err = toterr;
  int stale = 0;
  while (toterr > tol() && count < max_intervals && !heap.empty() && stale < 60) {
    Panel worst = heap.top();
    heap.pop();
    total -= worst.val;
    toterr -= worst.err;
    double m = 0.5 * (worst.a + worst.b);
    if (m <= worst.a || m >= worst.b) {  // cannot split further in doubles
      total += worst.val;
      toterr += worst.err;
      break;
    }
    Panel l = eval_panel(f, worst.a, m, &out.evals);
    Panel r = eval_panel(f, m, worst.b, &out.evals);
    total += l.val + r.val;
    toterr += l.err + r.err;
    heap.push(l);
    heap.push(r);
    ++count;
    if (toterr < 0.99 * best_err) {
      best_err = toterr;
      stale = 0;
    } else {
      ++stale;
    }
  }
  out.value = total;
  out.error = toterr;
  out.converged = toterr <= tol() * 1.000001 || toterr <= abs_tol;
  return out;
}

Result adaptive(const Fn& f, double a, double b, double abs_tol, double rel_tol,
                int max_intervals) {
  return adaptive_pts(f, a, b, {}, abs_tol, rel_tol, max_intervals);
}

namespace {

// Solve the small Vandermonde system sum_k c_k u_j^k = v_j.
void poly_fit(const std::vector<double>& u, const std::vector<double>& v,
              std::vector<double>& c) {
  int n = (int)u.size();
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1));
  for (int j = 0; j < n; ++j) {
    double p = 1;
    for (int k = 0; k < n; ++k) {
      m[j][k] = p;
      p *= u[j];
    }
    m[j][n] = v[j];
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(m[r][col]) > std::abs(m[piv][col])) piv = r;
    std::swap(m[col], m[piv]);
    for (int r = col + 1; r < n; ++r) {
      double fac = m[r][col] / m[col][col];
      for (int k = col; k <= n; ++k) m[r][k] -= fac * m[col][k];
    }
  }
  c.assign(n, 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double s = m[r][n];
    for (int k = r + 1; k < n; ++k) s -= m[r][k] * c[k];
    c[r] = s / m[r][r];
  }
}

// Moments M_k = int_{-1}^{1} u^k cos(theta*u + psi) du for theta not tiny.
void trig_moments(double theta, double psi, int kmax, std::vector<double>& M) {
  M.assign(kmax + 1, 0.0);
  auto S = [&](double u) { return std::sin(theta * u + psi); };
  auto C = [&](double u) { return std::cos(theta * u + psi); };
  M[0] = (S(1) - S(-1)) / theta;
  if (kmax >= 1) M[1] = (S(1) + S(-1)) / theta + (C(1) - C(-1)) / (theta * theta);
  for (int k = 2; k <= kmax; ++k) {
    double bnd = (S(1) - (k % 2 ? -1 : 1) * S(-1)) / theta +
                 k * (C(1) + (k % 2 ? -1 : 1) * C(-1)) / (theta * theta);
    M[k] = bnd - k * (k - 1.0) / (theta * theta) * M[k - 2];
  }
}

struct OscPanel {
  double a, b, val, err;
  bool operator<(const OscPanel& o) const { return err < o.err; }
};

OscPanel eval_osc_panel(const Fn& g, double omega, double phi, double a, double b,
                        long* evals) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double theta = omega * h;
  if (std::abs(theta) < 2.5) {
    Fn f = [&](double s) { return g(s) * std::cos(omega * s + phi); };
    Panel p = eval_panel(f, a, b, evals);
    return {a, b, p.val, p.err};
  }
  static const std::vector<double> u7 = [] {
    std::vector<double> u(7);
    for (int j = 0; j <= 6; ++j) u[j] = std::cos(kPi * j / 6.0);
    return u;
  }();
  std::vector<double> v(7);
  for (int j = 0; j < 7; ++j) v[j] = g(c + h * u7[j]);
  *evals += 7;
  std::vector<double> c6;
  poly_fit(u7, v, c6);
  std::vector<double> u5 = {u7[0], u7[1], u7[3], u7[5], u7[6]};
  std::vector<double> v5 = {v[0], v[1], v[3], v[5], v[6]};
  std::vector<double> c4;
  poly_fit(u5, v5, c4);
  double psi = omega * c + phi;
  std::vector<double> M;
  trig_moments(theta, psi, 6, M);
  double i6 = 0, i4 = 0;
  for (int k = 0; k <= 6; ++k) i6 += c6[k] * M[k];
  for (int k = 0; k <= 4; ++k) i4 += c4[k] * M[k];
  i6 *= h;
  i4 *= h;
  return {a, b, i6, std::abs(i6 - i4)};
}

}  // namespace

Result osc_cos(const Fn& g, double omega, double phi, double a, double b,
               double abs_tol, double rel_tol, int max_panels) {
  Result out;
  if (a >= b) return out;
  std::priority_queue<OscPanel> heap;
  // Initial panels grow geometrically from a, starting at the oscillation
  // scale so that the degree-6 fits start out sane even for enormous ranges.
  std::vector<double> pts;
  pts.push_back(a);
  double step = std::abs(omega) > 0 ? 4.0 / std::abs(omega) : (b - a);
  double x = a;
  while (x + step < b && pts.size() < 400) {
    x += step;
    pts.push_back(x);
    step *= 1.6;
  }
  pts.push_back(b);
  double total = 0, toterr = 0;
  int count = 0;
  for (size_t i = 0; i + 1 < pts.size(); ++i) {
    OscPanel p = eval_osc_panel(g, omega, phi, pts[i], pts[i + 1], &out.evals);
    total += p.val;
    toterr += p.err;
    heap.push(p);
    ++count;
  }
  auto tol = [&]() { return std::max(abs_tol, rel_tol * std::abs(total)); };
  double best_err = toterr;
  int stale = 0;
  while (toterr > tol() && count < max_panels && !heap.empty() && stale < 60) {
    OscPanel worst = heap.top();
    heap.pop();
    total -= worst.val;
    toterr -= worst.err;
    double m = 0.5 * (worst.a + worst.b);
    if (m <= worst.a || m >= worst.b) {
      total += worst.val;
      toterr += worst.err;
      break;
    }
    OscPanel l = eval_osc_panel(g, omega, phi, worst.a, m, &out.evals);
    OscPanel r = eval_osc_panel(g, omega, phi, m, worst.b, &out.evals);
    total += l.val + r.val;
    toterr += l.err + r.err;
    heap.push(l);
    heap.push(r);
    ++count;
    if (toterr < 0.99 * best_err) {
      best_err = toterr;
      stale = 0;
    } else {
      ++stale;
    }
  }
  out.value = total;
  out.error = toterr;
  out.converged = toterr <= tol() * 1.000001 || toterr <= abs_tol;
  return out;
}

}  // namespace fraclap::quad

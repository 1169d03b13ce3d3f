#include "fraclap/probe.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <tuple>

#include "fraclap/specfun.hpp"

namespace fraclap::probe {

namespace {
namespace sf = fraclap::specfun;

// term: c * r^{1/2 + i/alpha - j} * K_{nu + m}(r^{1/alpha})
using Key = std::tuple<int, int, int>;  // (i, j, m)

std::map<Key, double> differentiate(const std::map<Key, double>& terms,
                                    double alpha) {
  std::map<Key, double> out;
  for (const auto& [key, c] : terms) {
    auto [i, j, m] = key;
    double a = 0.5 + i / alpha - j;
    out[{i, j + 1, m}] += c * a;
    // dK_mu(u)/du = -(K_{mu-1} + K_{mu+1})/2, u = r^{1/alpha}
    out[{i + 1, j + 1, m - 1}] += -c / (2.0 * alpha);
    out[{i + 1, j + 1, m + 1}] += -c / (2.0 * alpha);
  }
  return out;
}

void eval_terms(const std::map<Key, double>& terms, double alpha, double r,
                double* value, double* abssum) {
  double u = std::pow(r, 1.0 / alpha);
  double nu = 0.5 * alpha;
  *value = 0;
  *abssum = 0;
  for (const auto& [key, c] : terms) {
    auto [i, j, m] = key;
    double a = 0.5 + i / alpha - j;
    double t = c * std::pow(r, a) * sf::bessel_k(std::abs(nu + m), u);
    *value += t;
    *abssum += std::abs(t);
  }
}

}  // namespace

Report conjecture_cm(double alpha, int orders, double rmin, double rmax,
                     int npts) {
  if (orders < 1 || orders > 8)
    throw std::domain_error("conjecture_cm: orders must be in [1, 8]");
  Report rep;
  rep.alpha = alpha;
  rep.orders = orders;
  std::vector<std::map<Key, double>> ds;
  ds.push_back({{{0, 0, 0}, 1.0}});  // phi itself
  for (int k = 1; k <= orders; ++k) ds.push_back(differentiate(ds.back(), alpha));

  for (int p = 0; p < npts; ++p) {
    double r = rmin * std::pow(rmax / rmin, p / (npts - 1.0));
    Row row;
    row.r = r;
    row.derivs.resize(orders + 1);
    row.noise.resize(orders + 1);
    for (int k = 0; k <= orders; ++k) {
      double v, s;
      eval_terms(ds[k], alpha, r, &v, &s);
      row.derivs[k] = v;
      row.noise[k] = 64.0 * 1e-16 * s;
      double want_sign = (k % 2 == 0) ? 1.0 : -1.0;
      if (v * want_sign < -row.noise[k]) {
        row.consistent = false;
        if (rep.consistent) {
          char buf[128];
          std::snprintf(buf, sizeof buf,
                        "order %d at r = %.6g: value %.3e breaks the sign pattern",
                        k, r, v);
          rep.violation = buf;
        }
        rep.consistent = false;
      }
    }
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace fraclap::probe

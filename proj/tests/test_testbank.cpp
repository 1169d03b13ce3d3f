#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fraclap/operators.hpp"
#include "fraclap/testbank.hpp"

using namespace fraclap;
using namespace fraclap::bank;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("bank_standard contents and metadata") {
  Params P(2, 1.0);
  auto entries = bank_standard(P);
  REQUIRE(entries.size() >= 5);
  auto g = find(P, "gaussian");
  CHECK(g.decay == Decay::schwartz);
  CHECK(g.radial);
  // F f(0) = integral of f = pi^{d/2}
  CHECK(std::abs(g.fourier_radial(0.0) - kPi) < 1e-14);
  auto c = find(P, "cauchy");
  CHECK(c.decay == Decay::power);
  CHECK(c.decay_param == P.d + 1.0);
  auto b = find(P, "bump");
  CHECK(b.decay == Decay::compact);
  CHECK(b.decay_param == 2.0);
  CHECK(b.f(point(2.0, 0.0)) == 0.0);
  CHECK(b.f(point()) == 1.0);
  CHECK_FALSE(b.has_fourier());
  CHECK_THROWS_AS(find(P, "no_such_entry"), std::invalid_argument);
}

TEST_CASE("bank_special availability rules") {
  CHECK(bank_special(Params(1, 1.5)).size() == 1);  // abs_x1 only
  CHECK(bank_special(Params(1, 0.5)).empty());
  CHECK(bank_special(Params(2, 0.5)).size() == 1);  // harmonic only
  CHECK(bank_special(Params(2, 1.5)).size() == 2);
  Params P(2, 1.0);
  auto h = find(P, "harmonic_poly");
  CHECK(h.f(point(1.0, 2.0)) == 1.0 - 4.0);
  CHECK(h.oracle(P, point(1.0, 2.0)) == 0.0);
}

TEST_CASE("pathological entries: evaluator and metadata") {
  Params P(1, 1.0);
  auto p1 = find(P, "path_I_not_D");
  REQUIRE(p1.structure.has_value());
  CHECK(p1.structure->edge_shells.size() == 20);
  CHECK(p1.nonconv.count("D") == 1);
  // evaluator: inside the n=1 shell [1/2, 1] the value is eps1 (r^2-rn^2)^{a/2-1}
  double rho = 0.75;
  double want = 0.2 * std::pow(rho * rho - 0.25, -0.5);
  CHECK(std::abs(p1.f(point(rho)) - want) < 1e-14);
  // the shells tile (0,1]; outside the union the entry vanishes
  CHECK(p1.f(point(1.5)) == 0.0);
  CHECK(p1.f(point(3.0)) == 0.0);

  auto p2 = find(P, "path_S_not_I");
  REQUIRE(p2.structure.has_value());
  CHECK(p2.structure->pair_shells.size() == 20);
  CHECK(p2.nonconv.count("I") == 1);
  // antisymmetric values around rn = 1/2
  double rn = 0.5, dl = 0.25, eps = 8.0;
  double up = p2.f(point(rn * (1 + 0.5 * dl)));
  double dn = p2.f(point(rn * (1 - 0.5 * dl)));
  CHECK(up == eps * std::pow(rn * (1 + 0.5 * dl), 2.0));
  CHECK(dn == -eps * std::pow(rn * (1 - 0.5 * dl), 2.0));
}

TEST_CASE("bank self-validation across the parameter grid") {
  for (int d : {1, 2, 3})
    for (double a : {0.5, 1.0, 1.5}) {
      Params P(d, a);
      for (const auto& tf : bank_all(P)) {
        auto issues = validate(P, tf);
        for (auto& s : issues) INFO(s);
        CHECK(issues.empty());
      }
    }
}

TEST_CASE("oracle-bearing entries: admitting operators reproduce the oracle") {
  Params P(1, 1.0);
  for (const char* name : {"gaussian", "cauchy"}) {
    TestFunction f = find(P, name);
    REQUIRE(f.has_oracle());
    Point x = point(0.4);
    double want = f.oracle(P, x);
    for (const auto& tag : ops::default_definitions()) {
      ops::EvalReport r = ops::evaluate(P, tag, f, x);
      if (r.status != ops::Status::converged) continue;
      INFO(name << " " << tag);
      CHECK(std::abs(r.value - want) < std::max(r.error_estimate * 3.0, 2e-5));
    }
  }
  // harmonic polynomial: the only admitting operator reproduces 0 everywhere
  Params P2(2, 0.5);
  TestFunction h = find(P2, "harmonic_poly");
  ops::EvalReport r = ops::op_bochner(P2, h, point(-0.7, 1.3));
  CHECK(std::abs(r.value - h.oracle(P2, point(-0.7, 1.3))) < 1e-8);
}

#pragma once

#include <map>
#include <string>
#include <vector>

#include "fraclap/ballgeom.hpp"
#include "fraclap/testfunction.hpp"

namespace fraclap::ops {

enum class Status { converged, not_converged, refused };

struct EvalReport {
  double value = std::numeric_limits<double>::quiet_NaN();
  double error_estimate = 0.0;
  std::string method;
  Status status = Status::converged;
  std::map<std::string, double> diagnostics;
  std::string note;
  std::vector<double> scales, scale_values;  // ladder data when applicable

  bool ok() const { return status == Status::converged; }
};

struct ConvergenceTable {
  std::vector<double> scales, values;
  double extrapolated = std::numeric_limits<double>::quiet_NaN();
  double order = std::numeric_limits<double>::quiet_NaN();
  double error = std::numeric_limits<double>::infinity();
  bool converged = false;
};

struct ExtrapOptions {
  std::vector<double> exponents;  // known error-model exponents, may be empty
  double abs_tol = 1e-8;
  double rel_tol = 1e-6;
};

ConvergenceTable extrapolate(const std::vector<double>& scales,
                             const std::vector<double>& values,
                             const ExtrapOptions& opt = {});

struct OpOptions {
  double r0 = 1.0;   // singular/Dynkin ladder start, halvings
  int k_id = 12;
  double t0 = 1.0;   // semigroup ladder start, quarterings
  int k_s = 10;
  double y0 = 1.0;   // harmonic-extension ladder start, quarterings
  int k_h = 10;
  double quad_abs = 1e-11;
  double quad_rel = 1e-9;
  double extrap_abs = 1e-8;  // converged-flag tie-break tolerances
  double extrap_rel = 1e-6;
};

EvalReport op_singular(const Params& P, const TestFunction& f, const Point& x,
                       const OpOptions& o = {});
EvalReport op_singular_compensated(const Params& P, const TestFunction& f,
                                   const Point& x, const OpOptions& o = {});
EvalReport op_singular_symmetrized(const Params& P, const TestFunction& f,
                                   const Point& x, const OpOptions& o = {});
EvalReport op_dynkin(const Params& P, const TestFunction& f, const Point& x,
                     const OpOptions& o = {});
EvalReport op_semigroup(const Params& P, const TestFunction& f, const Point& x,
                        const OpOptions& o = {});
EvalReport op_harmonic(const Params& P, const TestFunction& f, const Point& x,
                       const OpOptions& o = {});
EvalReport op_bochner(const Params& P, const TestFunction& f, const Point& x,
                      const OpOptions& o = {});
EvalReport op_balakrishnan(const Params& P, const TestFunction& f, const Point& x,
                           const OpOptions& o = {});
EvalReport op_fourier(const Params& P, const TestFunction& f, const Point& x,
                      const OpOptions& o = {});
// Value implied by Riesz-potential inversion (alpha < d only): scales the
// singular-integral value by f(x) / (-I_alpha(L f)(x)).
EvalReport op_riesz_value(const Params& P, const TestFunction& f, const Point& x,
                          const OpOptions& o = {});

// Evaluate one definition by its tag ("F", "B", "BB", "I", "I-compensated",
// "I-symmetrized", "D", "S", "H", "R").
EvalReport evaluate(const Params& P, const std::string& tag,
                    const TestFunction& f, const Point& x, const OpOptions& o = {});

// Riesz potential I_alpha g(x) for a callable with power decay |g| ~ |y|^{-beta}.
double op_riesz_potential(const Params& P,
                          const std::function<double(const Point&)>& g,
                          double beta, const Point& x, double rel_tol = 1e-8);
double op_riesz_potential(const Params& P, const TestFunction& g, const Point& x,
                          double rel_tol = 1e-8);
double check_riesz_inversion(const Params& P, const TestFunction& f,
                             const Point& x);

// Dirichlet form E(f,g) and the adjoint-identity residual |int (L_I f) g + E|.
double op_form(const Params& P, const TestFunction& f, const TestFunction& g,
               double rel_tol = 1e-7);
double check_form_adjoint(const Params& P, const TestFunction& f,
                          const TestFunction& g);

// Distributional pairing residual |int (L_I f) phi - int f (L phi)| on a grid
// (1-d realization; L phi via the Fourier route when phi carries a profile).
double op_weak_pairing(const Params& P, const TestFunction& f,
                       const TestFunction& phi);

struct FourierGrid {
  int d = 1, n = 0;
  double box = 0;
  std::vector<double> values;  // row-major, n points per axis
  double alias_ratio = 0;
  bool alias_flag = false;

  double value_at(const Point& x) const;  // exact-node lookup
};
FourierGrid op_fourier_grid(const Params& P, const TestFunction& f, double box,
                            int n);

struct MatrixCell {
  std::string a, b;
  double diff = 0, tol = 0;
  enum Outcome { pass, fail, skipped } outcome = pass;
};

struct AgreementMatrix {
  std::vector<std::string> methods;
  std::map<std::string, EvalReport> reports;
  std::vector<MatrixCell> cells;
  bool all_pass = true;
};

// Pairwise agreement over the listed definitions (default: the ten of the
// classical equivalence). Structural exclusions come back as skipped cells.
AgreementMatrix agreement_matrix(const Params& P, const TestFunction& f,
                                 const Point& x,
                                 std::vector<std::string> defs = {},
                                 double abs_cap = 1e-3,
                                 const OpOptions& o = {});

const std::vector<std::string>& default_definitions();

// Decay-class admissibility of a definition for a given entry.
bool admissible(const Params& P, const std::string& tag, const TestFunction& f);

}  // namespace fraclap::ops

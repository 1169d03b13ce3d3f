#pragma once

#include <cstdint>
#include <vector>

#include "fraclap/ballgeom.hpp"
#include "fraclap/operators.hpp"
#include "fraclap/testfunction.hpp"

namespace fraclap::mc {

// xoshiro256++ stream; per-path streams are derived from (seed, path index)
// so results are independent of the thread count.
struct Rng {
  uint64_t s[4];
  bool has_cached = false;
  double cached = 0;

  explicit Rng(uint64_t seed);
  static Rng for_path(uint64_t seed, uint64_t path);
  uint64_t next();
  double uniform();  // in (0,1)
  double normal();
  double expo();
};

enum class ExitMode { path_stepping, exact_exit };

struct MCConfig {
  long n_paths = 10000;
  double dt = 1e-4;
  uint64_t seed = 1;
  ballgeom::BallSpec ball{1.0, point()};
  ExitMode mode = ExitMode::exact_exit;
  int threads = 1;
};

struct ExitSample {
  Point pos{};        // exit position relative to the ball center
  double time = 0;    // n*dt in path mode; NaN in exact-exit mode
  long steps = 0;
};

// One-sided stable variable with Laplace transform exp(-u^beta), beta in (0,1)
// (Kanter's construction).
double sample_subordinator(double beta, Rng& rng);

// Increment of the isotropic alpha-stable process over time t,
// X_t = sqrt(2 S) Z with S the subordinator at level t.
Point sample_stable_increment(const Params& P, double t, Rng& rng);

// Radial exit law of pi_r(0,.) through T = (|Z|^2 - r^2)/r^2; tabulated
// inverse CDF with monotone cubic interpolation plus exact endpoint branches.
struct RadialExitLaw {
  double alpha;
  std::vector<double> u, lnt, slope;
  double umin = 1e-4;
  double lB;  // ln Beta(1 - a/2, a/2)

  double sample_T(double unif) const;
  double cdf_T(double T) const;
  static const RadialExitLaw& get(double alpha);
};

Point sample_exit_position(const Params& P, const ballgeom::BallSpec& ball,
                           Rng& rng);  // from pi_r(y, .), rejection for y != 0

std::vector<ExitSample> simulate_exit(const Params& P, const MCConfig& cfg,
                                      const Point& start);

struct DynkinReport {
  double mc_mean = 0, std_error = 0;
  double deterministic = 0;
  double residual = 0;
  double sigmas = 0;
  long n = 0;
};
DynkinReport check_dynkin_formula(const Params& P, const MCConfig& cfg,
                                  const TestFunction& f, const Point& x,
                                  double lambda = 0.0);

struct CharopReport {
  ops::ConvergenceTable table;
  std::vector<double> std_errors;
  bool statistical_floor = false;
  double reference = 0;  // deterministic Dynkin value
  double combined_se = 0;
};
CharopReport mc_characteristic_operator(const Params& P, const TestFunction& f,
                                        const Point& x,
                                        const std::vector<double>& radii,
                                        const MCConfig& cfg);

// Kolmogorov-Smirnov statistics.
double ks_statistic(std::vector<double> samples,
                    const std::function<double(double)>& cdf);
double ks_two_sample(std::vector<double> a, std::vector<double> b);

}  // namespace fraclap::mc

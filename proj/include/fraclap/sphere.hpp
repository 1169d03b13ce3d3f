#pragma once

#include <vector>

#include "fraclap/types.hpp"

namespace fraclap::sphere {

// Antipodally exact angular rules on S^{d-1}; weights sum to 1.
struct AngularRule {
  std::vector<Point> dirs;
  std::vector<double> w;
};

const AngularRule& rule(int d);

// Denser variant for the ball-geometry audits (d=3: GL20 x 40 azimuths).
const AngularRule& dense_rule(int d);

template <class G>
double mean(int d, G&& g) {
  const AngularRule& r = rule(d);
  double s = 0;
  for (size_t i = 0; i < r.dirs.size(); ++i) s += r.w[i] * g(r.dirs[i]);
  return s;
}

}  // namespace fraclap::sphere

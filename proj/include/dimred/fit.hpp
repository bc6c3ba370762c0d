#pragma once

#include <span>

namespace dimred::fit {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
  int points = 0;
};

// Least squares y = slope x + intercept. Needs `min_points` samples and at
// least two distinct x.
LineFit linear(std::span<const double> x, std::span<const double> y, int min_points = 2);
// Fit of log y against log x; all values must be positive.
LineFit loglog(std::span<const double> x, std::span<const double> y, int min_points = 2);

}  // namespace dimred::fit

#include "dimred/fit.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "dimred/errors.hpp"

namespace dimred::fit {

LineFit linear(std::span<const double> x, std::span<const double> y, int min_points) {
  if (x.size() != y.size()) throw DomainError("fit needs equally many x and y values");
  const int n = static_cast<int>(x.size());
  if (n < std::max(2, min_points)) {
    throw InsufficientDataError("fit needs at least " + std::to_string(std::max(2, min_points)) + " points, got " +
                                std::to_string(n));
  }
  double mx = 0.0;
  double my = 0.0;
  for (int i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (int i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 1e-24 * std::max(1.0, mx * mx))) throw InsufficientDataError("fit needs at least two distinct x values");
  LineFit f;
  f.points = n;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

LineFit loglog(std::span<const double> x, std::span<const double> y, int min_points) {
  if (x.size() != y.size()) throw DomainError("fit needs equally many x and y values");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw DomainError("log-log fit needs positive values");
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  return linear(lx, ly, min_points);
}

}  // namespace dimred::fit

#pragma once

#include <functional>
#include <span>
#include <vector>

namespace dimred::quad {

// Adaptive Gauss-Kronrod (61-point) on [a,b]; throws ToleranceError when the
// estimated error exceeds max(tol*|I|, tol).
double adaptive(const std::function<double(double)>& f, double a, double b, double tol = 1e-10);

// Same, but split at the given interior breakpoints first.
double adaptive_piecewise(const std::function<double(double)>& f, double a, double b,
                          std::span<const double> breakpoints, double tol = 1e-10);

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Composite Gauss-Legendre rule: `panels` equal panels on [a,b], `order`
// points each (order in {8, 16, 20, 30}).
Rule gauss_legendre(double a, double b, int panels, int order = 16);

}  // namespace dimred::quad

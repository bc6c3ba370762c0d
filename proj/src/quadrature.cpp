#include <cstdio>
#include "dimred/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <string>

#include "dimred/errors.hpp"

namespace dimred::quad {

double adaptive(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  double err = 0.0;
  // Boost's error estimate degrades on narrow intervals far from the origin,
  // so integrate over [-1, 1] instead.
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double value =
      half * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                 [&](double t) { return f(mid + half * t); }, -1.0, 1.0, 20, tol, &err);
  err *= std::abs(half);
  if (!std::isfinite(value) || err > std::max(tol * std::abs(value), tol)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "adaptive quadrature on [%.9g, %.9g] did not converge (value %.6g, error estimate %.3g)",
                  a, b, value, err);
    throw ToleranceError(buf);
  }
  return value;
}

double adaptive_piecewise(const std::function<double(double)>& f, double a, double b,
                          std::span<const double> breakpoints, double tol) {
  std::vector<double> cuts{a};
  for (double c : breakpoints) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) sum += adaptive(f, cuts[i], cuts[i + 1], tol);
  return sum;
}

namespace {

template <int Order>
void fill_panel(double lo, double hi, Rule& rule) {
  using G = boost::math::quadrature::gauss<double, Order>;
  const auto& x = G::abscissa();
  const auto& w = G::weights();
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  // Boost stores the non-negative half of the symmetric rule.
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      rule.nodes.push_back(mid);
      rule.weights.push_back(half * w[i]);
    } else {
      rule.nodes.push_back(mid - half * x[i]);
      rule.weights.push_back(half * w[i]);
      rule.nodes.push_back(mid + half * x[i]);
      rule.weights.push_back(half * w[i]);
    }
  }
}

}  // namespace

Rule gauss_legendre(double a, double b, int panels, int order) {
  if (panels < 1) throw DomainError("gauss_legendre: panels must be >= 1");
  Rule rule;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * h;
    const double hi = (p + 1 == panels) ? b : lo + h;
    switch (order) {
      case 8: fill_panel<8>(lo, hi, rule); break;
      case 16: fill_panel<16>(lo, hi, rule); break;
      case 20: fill_panel<20>(lo, hi, rule); break;
      case 30: fill_panel<30>(lo, hi, rule); break;
      default: throw DomainError("gauss_legendre: unsupported order " + std::to_string(order));
    }
  }
  return rule;
}

}  // namespace dimred::quad

#include "dimred/auxiliary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "dimred/errors.hpp"
#include "dimred/fft.hpp"
#include "dimred/quadrature.hpp"

namespace dimred::auxiliary {

namespace {

constexpr double pi = std::numbers::pi;

double sphere_area(int d) { return d == 3 ? 4.0 * pi : 2.0 * pi; }

// Maximum of a smooth function on [a, b]: dense scan, then Brent around the
// best sample.
double maximize(const std::function<double(double)>& f, double a, double b, int scan = 2000) {
  double best = -1.0;
  double xb = a;
  for (int i = 0; i <= scan; ++i) {
    const double x = a + (b - a) * i / scan;
    const double v = f(x);
    if (v > best) {
      best = v;
      xb = x;
    }
  }
  const double lo = std::max(a, xb - (b - a) / scan);
  const double hi = std::min(b, xb + (b - a) / scan);
  auto r = boost::math::tools::brent_find_minima([&](double x) { return -f(x); }, lo, hi, 50);
  return std::max(best, -r.second);
}

std::vector<double> profile_breaks(const potentials::InteractionProfile& p) {
  std::vector<double> b;
  for (double x : p.breakpoints())
    if (x > 0.0 && x < p.support_radius()) b.push_back(x);
  std::sort(b.begin(), b.end());
  return b;
}

std::vector<double> inside(const std::vector<double>& pts, double a, double b) {
  std::vector<double> r;
  for (double x : pts)
    if (x > a && x < b) r.push_back(x);
  return r;
}

void check_regime(const potentials::ScaledInteraction& w) {
  const auto& p = w.point();
  if (!(p.mu() < p.epsilon())) throw DomainError("h_eps needs mu < eps");
  if (!(w.range() < p.epsilon())) throw DomainError("support of w_beta must lie inside the eps-ball");
  if (w.profile().space_dim() != 2 && w.profile().space_dim() != 3) throw DomainError("space dimension must be 2 or 3");
}

// Radial pieces in profile units s = r / mu:
//   q(s) = \int_0^s p(t) t^(d-1) dt,  tail(s) = \int_s^S p(t) t dt (d = 3)
//   or \int_s^S p(t) t ln t dt (d = 2).
struct RadialPieces {
  const potentials::InteractionProfile& p;
  int d;
  std::vector<double> breaks;
  double support;

  double q(double s) const {
    if (s <= 0.0) return 0.0;
    const double top = std::min(s, support);
    auto f = [&](double t) { return p(t) * std::pow(t, d - 1); };
    return quad::adaptive_piecewise(f, 0.0, top, inside(breaks, 0.0, top), 1e-12);
  }
  double tail(double s) const {
    if (s >= support) return 0.0;
    auto f = [&](double t) { return d == 3 ? p(t) * t : (t > 0.0 ? p(t) * t * std::log(t) : 0.0); };
    return quad::adaptive_piecewise(f, s, support, inside(breaks, s, support), 1e-12);
  }
  // h / (amp mu^2) at s with the boundary at e
  double h(double s, double e, double qtot) const {
    if (s >= e) return 0.0;
    if (d == 3) {
      if (s >= support) return qtot * (1.0 / e - 1.0 / s);
      const double qs = q(s);
      return qtot / e - (s > 0.0 ? qs / s : 0.0) - tail(s);
    }
    if (s >= support) return qtot * std::log(s / e);
    const double qs = q(s);
    return (s > 0.0 ? qs * std::log(s) : 0.0) + tail(s) - qtot * std::log(e);
  }
  // h' / (amp mu)
  double dh(double s) const {
    if (s <= 0.0) return 0.0;
    return q(s) / std::pow(s, d - 1);
  }
};

}  // namespace

// ------------------------------------------------------------ LineFunction

double LineFunction::operator()(double x) const {
  if (xs.empty() || x < xs.front() || x > xs.back()) return 0.0;
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  if (it == xs.end()) return values.back();
  const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double t = (x - xs[i]) / (xs[i + 1] - xs[i]);
  return (1.0 - t) * values[i] + t * values[i + 1];
}

double LineFunction::evenness_error() const {
  double e = 0.0;
  const std::size_t n = values.size();
  for (std::size_t i = 0; i < n; ++i) e = std::max(e, std::abs(values[i] - values[n - 1 - i]));
  return e;
}

double LineFunction::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) s += 0.5 * (xs[i + 1] - xs[i]) * (values[i] + values[i + 1]);
  return s;
}

// -------------------------------------------------------------- smooth step

double smooth_step(double x, double a, double b) {
  if (x <= a) return 1.0;
  if (x >= b) return 0.0;
  const double half = 0.5 * (b - a);
  const double s = x - 0.5 * (a + b);
  const double g = (b - a) / (half - s) - (b - a) / (half + s);
  if (g > 700.0) return 0.0;
  return 1.0 / (1.0 + std::exp(g));
}

double smooth_step_derivative(double x, double a, double b) {
  if (x <= a || x >= b) return 0.0;
  const double th = smooth_step(x, a, b);
  const double w = th * (1.0 - th);
  if (w == 0.0) return 0.0;
  const double half = 0.5 * (b - a);
  const double s = x - 0.5 * (a + b);
  const double gp = (b - a) / ((half - s) * (half - s)) + (b - a) / ((half + s) * (half + s));
  return -w * gp;
}

// --------------------------------------------------------------- h_epsilon

RadialFunction build_h_epsilon(const potentials::ScaledInteraction& w, int n_samples) {
  check_regime(w);
  if (n_samples < 8) throw DomainError("h_eps needs at least 8 samples");
  const double mu = w.point().mu();
  const double eps = w.point().epsilon();
  const double range = w.range();
  const int d = w.profile().space_dim();
  RadialPieces rp{w.profile(), d, profile_breaks(w.profile()), w.profile().support_radius()};
  const double qtot = rp.q(rp.support);
  const double amp = w.amplitude();

  RadialFunction h;
  h.mu = mu;
  h.epsilon = eps;
  h.space_dim = d;
  const int n1 = std::max(4, n_samples / 2);
  const int n2 = std::max(4, n_samples - n1 + 1);
  h.segment_starts = {0, static_cast<std::size_t>(n1 - 1)};
  for (int i = 0; i < n1; ++i) h.radii.push_back(range * i / (n1 - 1));
  for (int i = 1; i < n2; ++i) h.radii.push_back(range + (eps - range) * i / (n2 - 1));
  h.radii.back() = eps;
  const double e = eps / mu;
  for (double r : h.radii) {
    const double s = r / mu;
    h.values.push_back(r >= eps ? 0.0 : amp * mu * mu * rp.h(s, e, qtot));
    h.derivative.push_back(amp * mu * rp.dh(std::min(s, e)));
  }
  return h;
}

double h_epsilon_direct(const potentials::ScaledInteraction& w, double r, double tol) {
  check_regime(w);
  if (w.profile().space_dim() != 3) throw DomainError("direct image-charge evaluation is three-dimensional");
  const double eps = w.point().epsilon();
  if (r >= eps) return 0.0;
  const double range = w.range();
  auto radial = [&](double rho) {
    if (rho <= 0.0) return 0.0;
    const double star = eps * eps / rho;
    // c = cos(angle) = 1 - v^2 removes the inverse square root at rho = r
    auto ang = [&](double v) {
      const double c = 1.0 - v * v;
      const double d1 = std::sqrt((r - rho) * (r - rho) + 2.0 * r * rho * v * v);
      const double d2 = std::sqrt(r * r + star * star - 2.0 * r * star * c);
      return 2.0 * v * ((d1 > 0.0 ? 1.0 / d1 : 0.0) - (eps / rho) / d2);
    };
    return 2.0 * pi * rho * rho * w(rho) * quad::adaptive(ang, 0.0, std::sqrt(2.0), tol);
  };
  std::vector<double> bp;
  for (double b : profile_breaks(w.profile())) bp.push_back(b * w.point().mu());
  if (r > 0.0 && r < range) bp.push_back(r);
  std::sort(bp.begin(), bp.end());
  // Laplace h = w: the Newton potential enters with a minus sign.
  return -quad::adaptive_piecewise(radial, 0.0, range, bp, tol) / (4.0 * pi);
}

GradientNorms h_epsilon_gradient(const potentials::ScaledInteraction& w) {
  check_regime(w);
  const double mu = w.point().mu();
  const double eps = w.point().epsilon();
  const int d = w.profile().space_dim();
  RadialPieces rp{w.profile(), d, profile_breaks(w.profile()), w.profile().support_radius()};
  const double amp = w.amplitude();
  const double e = eps / mu;
  const double big_s = rp.support;
  const double qtot = rp.q(big_s);
  // q along sorted nodes, accumulated panel by panel
  auto cumulative_q = [&](const std::vector<double>& nodes) {
    std::vector<double> q(nodes.size());
    double prev = 0.0;
    double acc = 0.0;
    auto f = [&](double t) { return rp.p(t) * std::pow(t, d - 1); };
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      // nodes never straddle a breakpoint, so a fixed rule is enough
      if (nodes[i] > prev) {
        auto rule = quad::gauss_legendre(prev, nodes[i], 1, 20);
        for (std::size_t j = 0; j < rule.nodes.size(); ++j) acc += rule.weights[j] * f(rule.nodes[j]);
      }
      prev = nodes[i];
      q[i] = acc;
    }
    return q;
  };
  std::vector<double> cuts{0.0};
  for (double b : rp.breaks) cuts.push_back(b);
  cuts.push_back(big_s);
  std::vector<double> nodes;
  std::vector<double> weights;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    auto rule = quad::gauss_legendre(cuts[k], cuts[k + 1], 16, 20);
    nodes.insert(nodes.end(), rule.nodes.begin(), rule.nodes.end());
    weights.insert(weights.end(), rule.weights.begin(), rule.weights.end());
  }
  {
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nodes[a] < nodes[b]; });
    std::vector<double> n2, w2;
    for (std::size_t i : order) {
      n2.push_back(nodes[i]);
      w2.push_back(weights[i]);
    }
    nodes.swap(n2);
    weights.swap(w2);
  }
  const auto qn = cumulative_q(nodes);
  double best = 0.0;
  double sbest = 0.0;
  double in = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double v = qn[i] / std::pow(nodes[i], d - 1);
    if (v > best) {
      best = v;
      sbest = nodes[i];
    }
    in += weights[i] * qn[i] * qn[i] * std::pow(nodes[i], 1 - d);
  }
  GradientNorms g;
  const double span = big_s / nodes.size() * 4.0;
  g.sup = amp * mu * maximize([&](double s) { return rp.dh(s); }, std::max(0.0, sbest - span), std::min(big_s, sbest + span), 40);
  g.sup = std::max(g.sup, amp * mu * best);
  // \int_0^eps h'^2 area r^(d-1) dr = area amp^2 mu^(d+2) \int q^2 s^(1-d) ds
  const double out = d == 3 ? qtot * qtot * (1.0 / big_s - 1.0 / e) : qtot * qtot * std::log(e / big_s);
  g.l2 = std::sqrt(sphere_area(d) * amp * amp * std::pow(mu, d + 2) * (in + out));
  return g;
}

PoissonReport verify_poisson(const RadialFunction& h, const potentials::ScaledInteraction& w) {
  PoissonReport rep;
  const int d = h.space_dim;
  const double wsup = w.amplitude() * w.profile().sup_bound();
  const std::size_t n = h.radii.size();
  std::vector<std::size_t> ends = h.segment_starts;
  ends.push_back(n - 1);
  for (std::size_t sgm = 0; sgm + 1 < ends.size(); ++sgm) {
    for (std::size_t i = ends[sgm] + 1; i < ends[sgm + 1]; ++i) {
      const double r = h.radii[i];
      if (r <= 0.0) continue;
      const double dr = h.radii[i + 1] - h.radii[i];
      const double lap = (h.values[i + 1] - 2.0 * h.values[i] + h.values[i - 1]) / (dr * dr) +
                         (d - 1) / r * (h.values[i + 1] - h.values[i - 1]) / (2.0 * dr);
      const double res = std::abs(lap - w(r));
      rep.max_residual = std::max(rep.max_residual, wsup > 0.0 ? res / wsup : res);
      ++rep.checked_points;
    }
  }
  rep.boundary_value = std::abs(h.values.back());
  return rep;
}

GradientScalingFit gradient_scaling_fit(const std::vector<scaling::ScalingPoint>& points,
                                        const potentials::InteractionProfile& profile) {
  if (points.size() < 4) throw InsufficientDataError("gradient scaling fit needs at least 4 scaling points");
  GradientScalingFit r;
  for (const auto& p : points) {
    const auto g = h_epsilon_gradient(potentials::scale(profile, p));
    const double n = static_cast<double>(p.n_particles());
    r.sup_values.push_back(g.sup);
    r.l2_values.push_back(g.l2);
    r.sup_predictor.push_back(p.epsilon() * p.epsilon() / (n * p.mu() * p.mu()));
    r.l2_predictor.push_back(p.epsilon() * p.epsilon() / (n * std::sqrt(p.mu())));
  }
  r.sup_fit = fit::loglog(r.sup_predictor, r.sup_values, 4);
  r.l2_fit = fit::loglog(r.l2_predictor, r.l2_values, 4);
  return r;
}

// ------------------------------------------------------------------- theta

ThetaReport theta(double mu, double epsilon, int n_samples, int space_dim) {
  if (!(mu > 0.0 && mu < epsilon)) throw DomainError("Theta needs 0 < mu < eps");
  if (space_dim != 2 && space_dim != 3) throw DomainError("space dimension must be 2 or 3");
  if (n_samples < 8) throw DomainError("Theta needs at least 8 samples");
  ThetaReport t;
  auto& f = t.theta;
  f.mu = mu;
  f.epsilon = epsilon;
  f.space_dim = space_dim;
  const int n1 = std::max(4, n_samples / 4);
  const int n2 = std::max(4, n_samples - n1 + 1);
  f.segment_starts = {0, static_cast<std::size_t>(n1 - 1)};
  for (int i = 0; i < n1; ++i) f.radii.push_back(mu * i / (n1 - 1));
  for (int i = 1; i < n2; ++i) f.radii.push_back(mu + (epsilon - mu) * i / (n2 - 1));
  f.radii.back() = epsilon;
  for (double r : f.radii) {
    f.values.push_back(smooth_step(r, mu, epsilon));
    f.derivative.push_back(smooth_step_derivative(r, mu, epsilon));
  }
  const int d = space_dim;
  const double area = sphere_area(d);
  t.sup = *std::max_element(f.values.begin(), f.values.end());
  const double ball = std::pow(mu, d) / d;
  const double shell =
      quad::adaptive([&](double r) { return std::pow(smooth_step(r, mu, epsilon), 2) * std::pow(r, d - 1); }, mu,
                     epsilon, 1e-11);
  t.l2 = std::sqrt(area * (ball + shell));
  t.grad_sup = maximize([&](double r) { return std::abs(smooth_step_derivative(r, mu, epsilon)); }, mu, epsilon);
  const double g2 = quad::adaptive(
      [&](double r) { return std::pow(smooth_step_derivative(r, mu, epsilon), 2) * std::pow(r, d - 1); }, mu, epsilon,
      1e-11);
  t.grad_l2 = std::sqrt(area * g2);
  t.grad_sup_times_eps = t.grad_sup * epsilon;
  t.midpoint_value = smooth_step(0.5 * (mu + epsilon), mu, epsilon);
  return t;
}

// ---------------------------------------------------------------- w-bar

namespace {

// Autocorrelation C(u) = \int |chi(y)|^2 |chi(y - u)|^2 dy on grid offsets.
struct Autocorrelation {
  int dim = 1;
  double h = 0.0;
  int reach = 0;               // offsets -reach..reach per axis
  std::vector<double> values;  // 1D: index j + reach; 2D: (j1 + reach) * (2 reach + 1) + j2 + reach
  double at_zero() const { return dim == 1 ? values[reach] : values[reach * (2 * reach + 1) + reach]; }

  // cubic Lagrange on the 1D table
  double operator()(double u) const {
    const double t = std::abs(u) / h;
    int j = static_cast<int>(std::floor(t));
    j = std::clamp(j - 1, -reach, reach - 3);
    double s = 0.0;
    for (int a = 0; a < 4; ++a) {
      double l = 1.0;
      for (int b = 0; b < 4; ++b)
        if (b != a) l *= (t - (j + b)) / double(a - b);
      s += l * values[j + a + reach];
    }
    return s;
  }
};

Autocorrelation autocorrelation(const potentials::ScaledInteraction& w, const transverse::RescaledMode& chi,
                                const QuasiOptions& opts) {
  const auto& g = chi.grid;
  if (g.dim != w.transverse_dim()) throw DomainError("transverse mode and interaction disagree on dimension");
  const double range = w.range();
  if (range / g.spacing < opts.min_points_per_range) {
    throw ResolutionError("transverse grid resolves the interaction range with only " +
                          std::to_string(range / g.spacing) + " points");
  }
  if (g.extent < range) throw ResolutionError("transverse grid does not cover the interaction range");
  Autocorrelation c;
  c.dim = g.dim;
  c.h = g.spacing;
  c.reach = std::min(g.n - 1, static_cast<int>(std::ceil(range / g.spacing)) + 4);
  const int n = g.n;
  if (g.dim == 1) {
    c.values.assign(static_cast<std::size_t>(2 * c.reach + 1), 0.0);
    for (int j = 0; j <= c.reach; ++j) {
      double s = 0.0;
      for (int i = 0; i + j < n; ++i) s += chi.chi[i] * chi.chi[i] * chi.chi[i + j] * chi.chi[i + j];
      c.values[c.reach + j] = c.values[c.reach - j] = s * g.spacing;
    }
    return c;
  }
  const int side = 2 * c.reach + 1;
  c.values.assign(static_cast<std::size_t>(side) * side, 0.0);
  for (int j1 = -c.reach; j1 <= c.reach; ++j1)
    for (int j2 = -c.reach; j2 <= c.reach; ++j2) {
      double s = 0.0;
      for (int a = std::max(0, -j1); a < std::min(n, n - j1); ++a)
        for (int b = std::max(0, -j2); b < std::min(n, n - j2); ++b) {
          const double p = chi.chi[a * n + b];
          const double q = chi.chi[(a + j1) * n + b + j2];
          s += p * p * q * q;
        }
      c.values[(j1 + c.reach) * side + j2 + c.reach] = s * g.cell();
    }
  return c;
}

// \int du C(u) f(u) over the u-disc |u| <= umax (1D: segment).
double transverse_integral(const Autocorrelation& c, double umax,
                           const std::function<double(double u, double cu)>& f, double tol) {
  if (umax <= 0.0) return 0.0;
  if (c.dim == 1) {
    auto g = [&](double u) {
      const double cu = c(u);
      return cu * f(u, cu);
    };
    // the last panel ends on the support edge, where f typically has a
    // square-root endpoint; u = umax - v^2 removes it
    std::vector<double> bp;
    for (int j = 1; j * c.h < umax; ++j) bp.push_back(j * c.h);
    const double a = bp.empty() ? 0.0 : bp.back();
    if (!bp.empty()) bp.pop_back();
    const double body = a > 0.0 ? quad::adaptive_piecewise(g, 0.0, a, bp, tol) : 0.0;
    const double tail = quad::adaptive(
        [&](double v) { return 2.0 * v * g(umax - v * v); }, 0.0, std::sqrt(umax - a), tol);
    return 2.0 * (body + tail);
  }
  const int side = 2 * c.reach + 1;
  double s = 0.0;
  for (int j1 = -c.reach; j1 <= c.reach; ++j1)
    for (int j2 = -c.reach; j2 <= c.reach; ++j2) {
      const double u = c.h * std::sqrt(double(j1 * j1 + j2 * j2));
      if (u > umax) continue;
      s += c.values[(j1 + c.reach) * side + j2 + c.reach] * f(u, c.values[(j1 + c.reach) * side + j2 + c.reach]);
    }
  return s * c.h * c.h;
}

// \int ds cos(k s) w(sqrt(s^2 + u^2)) over the support
double longitudinal(const potentials::ScaledInteraction& w, double u, double k, double tol) {
  const double range = w.range();
  if (u >= range) return 0.0;
  const double smax = std::sqrt(range * range - u * u);
  std::vector<double> bp;
  for (double b : profile_breaks(w.profile())) {
    const double rb = b * w.point().mu();
    if (rb > u) bp.push_back(std::sqrt(rb * rb - u * u));
  }
  std::sort(bp.begin(), bp.end());
  return 2.0 * quad::adaptive_piecewise(
                   [&](double s) { return std::cos(k * s) * w(std::sqrt(s * s + u * u)); }, 0.0, smax,
                   inside(bp, 0.0, smax), tol);
}

}  // namespace

LineFunction quasi1d(const potentials::ScaledInteraction& w, const transverse::RescaledMode& chi,
                     const QuasiOptions& opts) {
  const auto c = autocorrelation(w, chi, opts);
  const double range = w.range();
  const int n = std::max(3, opts.samples | 1);
  LineFunction f;
  f.half_width = range;
  f.xs.resize(static_cast<std::size_t>(n));
  f.values.assign(static_cast<std::size_t>(n), 0.0);
  const int mid = n / 2;
  for (int i = 0; i < n; ++i) f.xs[i] = range * (i - mid) / double(mid);
  for (int i = mid; i < n; ++i) {
    const double x = f.xs[i];
    double v = 0.0;
    if (x < range) {
      const double umax = std::sqrt(range * range - x * x);
      if (c.dim == 1) {
        std::vector<double> bp;
        for (int j = 1; j * c.h < umax; ++j) bp.push_back(j * c.h);
        for (double b : profile_breaks(w.profile())) {
          const double rb = b * w.point().mu();
          if (rb > x) bp.push_back(std::sqrt(rb * rb - x * x));
        }
        std::sort(bp.begin(), bp.end());
        v = 2.0 * quad::adaptive_piecewise([&](double u) { return c(u) * w(std::sqrt(x * x + u * u)); }, 0.0,
                                           umax, inside(bp, 0.0, umax), opts.tol);
      } else {
        v = transverse_integral(c, umax, [&](double u, double) { return w(std::sqrt(x * x + u * u)); }, opts.tol);
      }
    }
    f.values[i] = v;
    f.values[2 * mid - i] = v;
  }
  return f;
}

double quasi1d_mass(const potentials::ScaledInteraction& w, const transverse::RescaledMode& chi,
                    const QuasiOptions& opts) {
  const auto c = autocorrelation(w, chi, opts);
  return transverse_integral(c, w.range(), [&](double u, double) { return longitudinal(w, u, 0.0, opts.tol); },
                             opts.tol);
}

// ------------------------------------------------------------------- h-bar

double green(double xp, double x, double ell) {
  if (xp < x) return 0.5 / ell * (xp + ell) * (x - ell);
  return 0.5 / ell * (xp - ell) * (x + ell);
}

namespace {

// Running moments \int_{-inf}^x f and \int_{-inf}^x t f of a piecewise-linear
// sample table.
struct Moments {
  const LineFunction& f;
  std::vector<double> m0;
  std::vector<double> m1;

  explicit Moments(const LineFunction& lf) : f(lf) {
    const std::size_t n = f.xs.size();
    m0.assign(n, 0.0);
    m1.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      const auto [a, b] = partial(i, f.xs[i + 1]);
      m0[i + 1] = m0[i] + a;
      m1[i + 1] = m1[i] + b;
    }
  }
  std::pair<double, double> partial(std::size_t i, double x) const {
    const double dx = f.xs[i + 1] - f.xs[i];
    const double slope = (f.values[i + 1] - f.values[i]) / dx;
    const double tau = x - f.xs[i];
    const double xi = f.xs[i];
    const double fi = f.values[i];
    const double a = fi * tau + 0.5 * slope * tau * tau;
    const double b = xi * fi * tau + 0.5 * (xi * slope + fi) * tau * tau + slope * tau * tau * tau / 3.0;
    return {a, b};
  }
  std::pair<double, double> at(double x) const {
    if (x <= f.xs.front()) return {0.0, 0.0};
    if (x >= f.xs.back()) return {m0.back(), m1.back()};
    auto it = std::upper_bound(f.xs.begin(), f.xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - f.xs.begin()) - 1;
    const auto [a, b] = partial(i, x);
    return {m0[i] + a, m1[i] + b};
  }
};

}  // namespace

HBar build_h_bar(const LineFunction& wbar, double beta1, std::int64_t n_particles, double mu, int n_samples) {
  if (!(beta1 >= 0.0 && beta1 <= 1.0)) throw DomainError("beta1 must lie in [0, 1]");
  if (n_particles < 1) throw DomainError("N must be positive");
  const double ell = std::pow(static_cast<double>(n_particles), -beta1);
  if (!(wbar.half_width < ell)) throw DomainError("support of w-bar must lie inside (-N^-beta1, N^-beta1)");
  if (!(mu > 0.0 && mu < ell)) throw DomainError("Theta-bar needs 0 < mu < N^-beta1");
  if (n_samples < 5) throw DomainError("h-bar needs at least 5 samples");
  const Moments mom(wbar);
  const double a0t = mom.m0.back();
  const double a1t = mom.m1.back();
  HBar r;
  r.ell = ell;
  const int n = n_samples | 1;
  const int mid = n / 2;
  for (auto* lf : {&r.h, &r.dh, &r.theta_bar}) {
    lf->half_width = ell;
    lf->xs.resize(static_cast<std::size_t>(n));
    lf->values.resize(static_cast<std::size_t>(n));
  }
  for (int i = 0; i < n; ++i) {
    const double x = i == 0 ? -ell : (i == n - 1 ? ell : ell * (i - mid) / double(mid));
    const auto [a0, a1] = mom.at(x);
    const double left = a1 + ell * a0;
    const double right = (a1t - a1) - ell * (a0t - a0);
    const double hx = 0.5 / ell * ((x - ell) * left + (x + ell) * right);
    r.h.xs[i] = r.dh.xs[i] = r.theta_bar.xs[i] = x;
    r.h.values[i] = hx;
    r.dh.values[i] = a0 - 0.5 * a0t + 0.5 * a1t / ell;
    r.theta_bar.values[i] = smooth_step(std::abs(x), mu, ell);
  }
  r.boundary_max = std::max(std::abs(r.h.values.front()), std::abs(r.h.values.back()));
  double wsup = 0.0;
  for (double v : wbar.values) wsup = std::max(wsup, std::abs(v));
  const double dx = ell / mid;
  for (int i = 1; i + 1 < n; ++i) {
    const double d2 = (r.h.values[i + 1] - 2.0 * r.h.values[i] + r.h.values[i - 1]) / (dx * dx);
    const double res = std::abs(d2 - wbar(r.h.xs[i]));
    r.residual = std::max(r.residual, wsup > 0.0 ? res / wsup : res);
  }
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < wbar.xs.size(); ++i) {
    const double a = wbar.values[i];
    const double b = wbar.values[i + 1];
    const double h = wbar.xs[i + 1] - wbar.xs[i];
    if ((a >= 0.0) == (b >= 0.0)) {
      l1 += 0.5 * h * (std::abs(a) + std::abs(b));
    } else {
      l1 += 0.5 * h * (a * a + b * b) / (std::abs(a) + std::abs(b));
    }
  }
  r.wbar_l1 = l1;
  double g2 = 0.0;
  for (int i = 0; i < n; ++i) {
    r.grad_sup = std::max(r.grad_sup, std::abs(r.dh.values[i]));
    if (i + 1 < n) {
      // h' is piecewise quadratic; Simpson on each sample interval
      const double xm = 0.5 * (r.dh.xs[i] + r.dh.xs[i + 1]);
      const auto [m0, m1] = mom.at(xm);
      (void)m1;
      const double dm = m0 - 0.5 * a0t + 0.5 * a1t / ell;
      const double h = r.dh.xs[i + 1] - r.dh.xs[i];
      g2 += h / 6.0 * (r.dh.values[i] * r.dh.values[i] + 4.0 * dm * dm + r.dh.values[i + 1] * r.dh.values[i + 1]);
    }
  }
  r.grad_l2 = std::sqrt(g2);
  return r;
}

// ---------------------------------------------------------------- Gamma

GammaReport discrepancy_gamma(const potentials::ScaledInteraction& w, const nls::CondensateState& phi,
                              const transverse::RescaledMode& chi, const QuasiOptions& opts) {
  const auto c = autocorrelation(w, chi, opts);
  const auto& g = phi.grid;
  const int m = g.points;
  if (2.0 * w.range() >= g.length) throw DomainError("interaction range exceeds half the box");
  const double c0 = c.at_zero();
  const auto k = wavenumbers(m, g.length);

  // density coefficients rho_q (rho(x) = sum_q rho_q e^{i k_q x})
  Fft1d fft(m);
  for (int j = 0; j < m; ++j) fft.data()[j] = std::norm(phi.values[j]);
  fft.forward();
  std::vector<std::complex<double>> rho(static_cast<std::size_t>(m));
  for (int q = 0; q < m; ++q) rho[q] = fft.data()[q] * std::polar(1.0 / m, k[q] * 0.5 * g.length);

  // Gamma_q = N rho_q \int du \int ds (C(u) cos(k s) - C(0)) w
  const double n = static_cast<double>(w.point().n_particles());
  std::vector<double> kernel(static_cast<std::size_t>(m), 0.0);
  GammaReport rep;
  for (int q = 0; q < m; ++q) {
    const double kq = std::abs(k[q]);
    bool done = false;
    for (int p = 0; p < q; ++p)
      if (std::abs(k[p]) == kq) {
        kernel[q] = kernel[p];
        done = true;
        break;
      }
    if (done) continue;
    const double val = transverse_integral(
        c, w.range(),
        [&](double u, double cu) {
          const double a = longitudinal(w, u, kq, opts.tol);
          const double b = kq == 0.0 ? a : longitudinal(w, u, 0.0, opts.tol);
          return a - (c0 / cu) * b;
        },
        opts.tol);
    kernel[q] = val;
    if (q == 0) {
      rep.wbar_mass = transverse_integral(c, w.range(),
                                          [&](double u, double) { return longitudinal(w, u, 0.0, opts.tol); }, opts.tol);
      rep.point_mass = rep.wbar_mass - val;
    }
  }
  double sum2 = 0.0;
  for (int q = 0; q < m; ++q) {
    const auto gq = n * rho[q] * kernel[q];
    sum2 += std::norm(gq);
    fft.data()[q] = gq * std::polar(1.0, -k[q] * 0.5 * g.length);
  }
  fft.backward();
  rep.gamma.half_width = 0.5 * g.length;
  for (int j = 0; j < m; ++j) {
    rep.gamma.xs.push_back(g.x(j));
    rep.gamma.values.push_back(fft.data()[j].real());
  }
  rep.l2 = std::sqrt(g.length * sum2);
  rep.mu_over_eps = w.point().mu() / w.point().epsilon();
  return rep;
}

}  // namespace dimred::auxiliary

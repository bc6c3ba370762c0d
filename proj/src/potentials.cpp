#include "dimred/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "dimred/errors.hpp"
#include "dimred/quadrature.hpp"

namespace dimred::potentials {

namespace {

void require_space_dim(int d) {
  if (d != 2 && d != 3) {
    throw DomainError("space_dim must be 2 (one transverse dimension) or 3, got " +
                      std::to_string(d));
  }
}

double norm2(std::span<const double> y) {
  double s = 0.0;
  for (double v : y) s += v * v;
  return s;
}

}  // namespace

InteractionProfile::InteractionProfile(std::string name, int space_dim, Radial radial,
                                       double support_radius, double sup_bound,
                                       std::vector<double> breakpoints)
    : name_(std::move(name)),
      space_dim_(space_dim),
      radial_(std::move(radial)),
      support_radius_(support_radius),
      sup_bound_(sup_bound),
      breakpoints_(std::move(breakpoints)) {
  require_space_dim(space_dim);
  if (!(support_radius > 0.0)) throw DomainError("support_radius must be positive");
  if (sup_bound < 0.0) throw DomainError("sup_bound must be non-negative");
  l1_norm_ = radial_moment(0);
}

double InteractionProfile::sphere_area() const {
  return space_dim_ == 3 ? 4.0 * std::numbers::pi : 2.0 * std::numbers::pi;
}

double InteractionProfile::radial_moment(int power, double tol) const {
  const int jac = space_dim_ - 1 + power;
  auto f = [&](double r) { return std::pow(r, jac) * radial_(r); };
  return sphere_area() * quad::adaptive_piecewise(f, 0.0, support_radius_, breakpoints_, tol);
}

InteractionProfile InteractionProfile::uniform_ball(int space_dim, double height, double radius) {
  return InteractionProfile(
      "uniform_ball", space_dim, [height, radius](double r) { return r <= radius ? height : 0.0; },
      radius, std::abs(height));
}

InteractionProfile InteractionProfile::gaussian_bump(int space_dim, double height, double width) {
  if (!(width > 0.0)) throw DomainError("gaussian_bump width must be positive");
  return InteractionProfile(
      "gaussian_bump", space_dim,
      [height, width](double r) {
        return r <= 1.0 ? height * std::exp(-r * r / (2.0 * width * width)) : 0.0;
      },
      1.0, std::abs(height));
}

InteractionProfile InteractionProfile::smooth_bump(int space_dim, double height) {
  return InteractionProfile(
      "smooth_bump", space_dim,
      [height](double r) { return r < 1.0 ? height * std::exp(1.0 - 1.0 / (1.0 - r * r)) : 0.0; },
      1.0, std::abs(height));
}

InteractionProfile InteractionProfile::tabulated(int space_dim, std::vector<double> r,
                                                 std::vector<double> w) {
  if (r.size() < 2 || r.size() != w.size()) {
    throw DomainError("tabulated profile needs >= 2 matching (r, w) samples");
  }
  if (r.front() != 0.0) throw DomainError("tabulated profile must start at r = 0");
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (!(r[i] > r[i - 1])) throw DomainError("tabulated radii must be strictly increasing");
  }
  const double sup = std::abs(*std::max_element(w.begin(), w.end(), [](double a, double b) {
    return std::abs(a) < std::abs(b);
  }));
  const double rmax = r.back();
  std::vector<double> breaks(r.begin() + 1, r.end() - 1);
  auto fn = [r = std::move(r), w = std::move(w)](double x) {
    if (x > r.back()) return 0.0;
    auto it = std::upper_bound(r.begin(), r.end(), x);
    if (it == r.end()) return w.back();
    const std::size_t i = static_cast<std::size_t>(it - r.begin());
    const double t = (x - r[i - 1]) / (r[i] - r[i - 1]);
    return (1.0 - t) * w[i - 1] + t * w[i];
  };
  return InteractionProfile("tabulated", space_dim, std::move(fn), rmax, sup, std::move(breaks));
}

InteractionProfile InteractionProfile::from_csv(const std::string& path, int space_dim) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open interaction table " + path);
  std::string line;
  std::vector<double> r;
  std::vector<double> w;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      if (line.find_first_not_of("0123456789.-+eE, \t") != std::string::npos) continue;
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a = 0.0;
    double b = 0.0;
    if (!(ss >> a >> b)) throw ConfigError("malformed row in " + path + ": " + line);
    r.push_back(a);
    w.push_back(b);
  }
  return tabulated(space_dim, std::move(r), std::move(w));
}

InteractionProfile InteractionProfile::zero(int space_dim) {
  return InteractionProfile("zero", space_dim, [](double) { return 0.0; }, 1.0, 0.0);
}

ScaledInteraction::ScaledInteraction(scaling::ScalingPoint point, InteractionProfile profile)
    : point_(point), profile_(std::move(profile)) {
  const int d = transverse_dim();
  const double mu = point_.mu();
  amplitude_ = std::pow(point_.epsilon(), d) /
               (static_cast<double>(point_.n_particles()) * std::pow(mu, d + 1));
}

double ScaledInteraction::at(double x, std::span<const double> y) const {
  return (*this)(std::sqrt(x * x + norm2(y)));
}

double ScaledInteraction::integral() const {
  return profile_.l1_norm() * std::pow(point_.epsilon(), transverse_dim()) /
         static_cast<double>(point_.n_particles());
}

double ScaledInteraction::integral_by_quadrature(double tol) const {
  const double mu = point_.mu();
  std::vector<double> breaks;
  for (double b : profile_.breakpoints()) breaks.push_back(b * mu);
  const int jac = profile_.space_dim() - 1;
  auto f = [&](double r) { return std::pow(r, jac) * (*this)(r); };
  const double scale = amplitude_ * std::pow(mu, jac + 1);
  // Normalize the tolerance to the natural size of the integrand.
  return profile_.sphere_area() * scale *
         quad::adaptive_piecewise(
             [&](double s) { return f(s * mu) / scale * mu; }, 0.0, range() / mu,
             profile_.breakpoints(), tol);
}

ScaledInteraction scale(const InteractionProfile& profile, const scaling::ScalingPoint& point) {
  return ScaledInteraction(point, profile);
}

double coupling(const ScaledInteraction& scaled, double quartic) {
  if (!(quartic > 0.0)) throw DomainError("quartic integral must be positive");
  return scaled.coupling_mass() * quartic;
}

FamilyReport validate_family(const ScaledInteraction& scaled, double quartic, double eta,
                             double b_limit, const FamilyCheckOptions& opts) {
  FamilyReport rep;
  const auto& p = scaled.point();
  const int d = scaled.transverse_dim();
  const double mu = p.mu();
  rep.amplitude_scale = std::pow(p.epsilon(), d) /
                        (static_cast<double>(p.n_particles()) * std::pow(mu, d + 1));
  // Probe the radial function out to twice the stated support.
  const double probe = 2.0 * scaled.profile().support_radius();
  const int n = std::max(opts.radial_samples, 2);
  bool nonneg = true;
  double sup = 0.0;
  double last_nonzero = 0.0;
  std::vector<double> radii;
  radii.reserve(static_cast<std::size_t>(n) + scaled.profile().breakpoints().size());
  for (int i = 0; i < n; ++i) radii.push_back(probe * i / (n - 1));
  for (double b : scaled.profile().breakpoints()) radii.push_back(b);
  for (double s : radii) {
    const double v = scaled(s * mu);
    if (v < 0.0) nonneg = false;
    sup = std::max(sup, std::abs(v));
    if (v != 0.0) last_nonzero = std::max(last_nonzero, s);
  }
  rep.measured_sup = sup;
  rep.bounded = sup <= opts.sup_constant * rep.amplitude_scale * (1.0 + 1e-12);
  rep.nonnegative = nonneg;
  rep.measured_support = std::max(last_nonzero, scaled.profile().support_radius()) * mu;
  rep.supported = rep.measured_support <= opts.support_constant * mu * (1.0 + 1e-12);
  const double b_ne = coupling(scaled, quartic);
  rep.coupling_defect = std::pow(p.density_scale(), eta) * std::abs(b_ne - b_limit);
  rep.converging = rep.coupling_defect <= opts.limit_tolerance;
  return rep;
}

double born_length(const ScaledInteraction& scaled) {
  return scaled.integral() / (8.0 * std::numbers::pi);
}

ExternalPotential::ExternalPotential(std::string name, Evaluator f, double sup_norm,
                                     double time_derivative_sup, double transverse_gradient_sup,
                                     double mixed_sup, bool time_dependent)
    : name_(std::move(name)),
      f_(std::move(f)),
      sup_norm_(sup_norm),
      time_derivative_sup_(time_derivative_sup),
      transverse_gradient_sup_(transverse_gradient_sup),
      mixed_sup_(mixed_sup),
      time_dependent_(time_dependent) {}

ExternalPotential ExternalPotential::zero() {
  return ExternalPotential(
      "zero", [](double, double, std::span<const double>) { return 0.0; }, 0.0, 0.0, 0.0, 0.0,
      false);
}

ExternalPotential ExternalPotential::cosine(double amplitude, double wavenumber, double modulation,
                                            double frequency, double transverse_coupling) {
  const double a = amplitude;
  const double q = wavenumber;
  const double m = modulation;
  const double w = frequency;
  const double c = transverse_coupling;
  auto f = [=](double t, double x, std::span<const double> y) {
    return a * (1.0 + m * std::sin(w * t)) * std::cos(q * x) * (1.0 + c * (1.0 - std::exp(-norm2(y))));
  };
  // max of |d/dr (1 - exp(-r^2))| = sqrt(2) exp(-1/2)
  const double grad_factor = std::sqrt(2.0) * std::exp(-0.5);
  const double sup = std::abs(a) * (1.0 + std::abs(m)) * (1.0 + std::abs(c));
  const double dt_sup = std::abs(a * m * w) * (1.0 + std::abs(c));
  const double dy_sup = std::abs(a) * (1.0 + std::abs(m)) * std::abs(c) * grad_factor;
  const double dtdy_sup = std::abs(a * m * w * c) * grad_factor;
  const bool td = m != 0.0 && w != 0.0;
  return ExternalPotential("cosine", f, sup, dt_sup, dy_sup,
                           std::max({sup, dt_sup, dy_sup, dtdy_sup}), td);
}

double ExternalPotential::on_axis(double t, double x) const {
  static constexpr double origin[2] = {0.0, 0.0};
  return f_(t, x, std::span<const double>(origin, 2));
}

ConfinementPotential::ConfinementPotential(std::string name, int dimension, Evaluator f,
                                           double min_value, bool reflection_symmetric)
    : name_(std::move(name)),
      dimension_(dimension),
      f_(std::move(f)),
      min_value_(min_value),
      reflection_symmetric_(reflection_symmetric) {
  if (dimension != 1 && dimension != 2) {
    throw DomainError("transverse dimension must be 1 or 2, got " + std::to_string(dimension));
  }
}

ConfinementPotential ConfinementPotential::harmonic(int dimension, double omega, double shift) {
  const double w2 = omega * omega;
  return ConfinementPotential(
      "harmonic", dimension, [w2, shift](std::span<const double> y) { return w2 * norm2(y) + shift; },
      shift, true);
}

ConfinementPotential ConfinementPotential::gaussian_well(int dimension, double depth, double width) {
  if (!(depth > 0.0) || !(width > 0.0)) throw DomainError("gaussian_well needs positive depth and width");
  return ConfinementPotential(
      "gaussian_well", dimension,
      [depth, width](std::span<const double> y) { return -depth * std::exp(-norm2(y) / (width * width)); },
      -depth, true);
}

double ConfinementPotential::negative_part_bound(double energy0) const {
  return std::max(0.0, energy0 - min_value_);
}

}  // namespace dimred::potentials

#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dimred/scaling.hpp"

namespace dimred::potentials {

// Unscaled, spherically symmetric pair interaction w(|z|) on R^space_dim,
// where space_dim = 1 + transverse dimension (3 for the physical cigar, 2 for
// the one-transverse-dimension surrogate).
class InteractionProfile {
 public:
  using Radial = std::function<double(double)>;

  // `breakpoints` are radii where the profile has kinks or jumps; the L1 norm
  // quadrature splits there.
  InteractionProfile(std::string name, int space_dim, Radial radial, double support_radius,
                     double sup_bound, std::vector<double> breakpoints = {});

  // height * 1_{r <= radius}
  static InteractionProfile uniform_ball(int space_dim, double height = 1.0, double radius = 1.0);
  // height * exp(-r^2 / (2 width^2)) truncated at r = 1
  static InteractionProfile gaussian_bump(int space_dim, double height = 1.0, double width = 0.25);
  // height * exp(1 - 1/(1 - r^2)) for r < 1; infinitely smooth at the edge
  static InteractionProfile smooth_bump(int space_dim, double height = 1.0);
  // Piecewise-linear table (r ascending, first r = 0); zero beyond last r.
  static InteractionProfile tabulated(int space_dim, std::vector<double> r, std::vector<double> w);
  // CSV with header "r,w".
  static InteractionProfile from_csv(const std::string& path, int space_dim);
  static InteractionProfile zero(int space_dim);

  double operator()(double r) const { return r > support_radius_ ? 0.0 : radial_(r); }

  const std::string& name() const { return name_; }
  int space_dim() const { return space_dim_; }
  double support_radius() const { return support_radius_; }
  double sup_bound() const { return sup_bound_; }
  double l1_norm() const { return l1_norm_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }

  // Surface area of the unit sphere in space_dim dimensions (4 pi or 2 pi).
  double sphere_area() const;
  // Moment integral  sphere_area * \int r^(space_dim-1) r^power w(r) dr.
  double radial_moment(int power, double tol = 1e-10) const;

 private:
  std::string name_;
  int space_dim_;
  Radial radial_;
  double support_radius_;
  double sup_bound_;
  std::vector<double> breakpoints_;
  double l1_norm_ = 0.0;
};

// w_beta(z) = amplitude * w(|z| / mu) on R^(1+d). The amplitude is chosen so
// that N * eps^(-d) * \int w_beta = l1_norm, which for d = 2 is the familiar
// (N/eps^2)^(-1+3 beta).
class ScaledInteraction {
 public:
  ScaledInteraction(scaling::ScalingPoint point, InteractionProfile profile);

  const scaling::ScalingPoint& point() const { return point_; }
  const InteractionProfile& profile() const { return profile_; }
  int transverse_dim() const { return profile_.space_dim() - 1; }
  double amplitude() const { return amplitude_; }
  double range() const { return point_.mu() * profile_.support_radius(); }

  double operator()(double r) const { return amplitude_ * profile_(r / point_.mu()); }
  // Evaluate at z = (x, y).
  double at(double x, std::span<const double> y) const;
  // Exact integral l1_norm * eps^d / N.
  double integral() const;
  // N eps^(-d) \int w_beta, which equals l1_norm identically for this family.
  double coupling_mass() const { return profile_.l1_norm(); }
  // Radius-weighted quadrature of w_beta (independent of integral()).
  double integral_by_quadrature(double tol = 1e-10) const;

 private:
  scaling::ScalingPoint point_;
  InteractionProfile profile_;
  double amplitude_;
};

ScaledInteraction scale(const InteractionProfile& profile, const scaling::ScalingPoint& point);

// b_{N,eps} = N eps^(-d) \int w_beta \int |chi|^4 (quartic of the unscaled chi).
double coupling(const ScaledInteraction& scaled, double quartic);

struct FamilyCheckOptions {
  double sup_constant = 1.0;      // C in  sup|w_beta| <= C * amplitude scale
  double support_constant = 1.0;  // C in  supp w_beta within |z| <= C mu
  double limit_tolerance = 1e-8;  // threshold on (N/eps^2)^eta |b_{N,eps} - b|
  int radial_samples = 20001;
};

struct FamilyReport {
  bool bounded = false;      // (a)
  bool nonnegative = false;  // (b); spherical symmetry holds by construction
  bool supported = false;    // (c)
  bool converging = false;   // (d)
  double measured_sup = 0.0;
  double amplitude_scale = 0.0;
  double measured_support = 0.0;
  double coupling_defect = 0.0;  // (N/eps^2)^eta |b_{N,eps} - b|
  bool all() const { return bounded && nonnegative && supported && converging; }
};

FamilyReport validate_family(const ScaledInteraction& scaled, double quartic, double eta,
                             double b_limit, const FamilyCheckOptions& opts = {});

// First-order Born approximation a = \int w_beta / (8 pi).
double born_length(const ScaledInteraction& scaled);

// Possibly time-dependent external field V(t, x, y).
class ExternalPotential {
 public:
  using Evaluator = std::function<double(double t, double x, std::span<const double> y)>;

  ExternalPotential(std::string name, Evaluator f, double sup_norm, double time_derivative_sup,
                    double transverse_gradient_sup, double mixed_sup, bool time_dependent);

  static ExternalPotential zero();
  // A (1 + m sin(Omega t)) cos(q x) (1 + c (1 - exp(-|y|^2)))
  static ExternalPotential cosine(double amplitude, double wavenumber, double modulation = 0.0,
                                  double frequency = 0.0, double transverse_coupling = 0.0);

  double operator()(double t, double x, std::span<const double> y) const { return f_(t, x, y); }
  // V(t, (x, 0)) as used by the effective equation.
  double on_axis(double t, double x) const;

  const std::string& name() const { return name_; }
  double sup_norm() const { return sup_norm_; }
  double time_derivative_sup() const { return time_derivative_sup_; }
  double transverse_gradient_sup() const { return transverse_gradient_sup_; }
  // sup over i,j in {0,1} of ||d_t^i d_y^j V||_inf
  double mixed_sup() const { return mixed_sup_; }
  bool time_dependent() const { return time_dependent_; }
  bool is_zero() const { return name_ == "zero"; }

 private:
  std::string name_;
  Evaluator f_;
  double sup_norm_;
  double time_derivative_sup_;
  double transverse_gradient_sup_;
  double mixed_sup_;
  bool time_dependent_;
};

// Unscaled transverse confinement V_perp(y), y in R^dimension.
class ConfinementPotential {
 public:
  using Evaluator = std::function<double(std::span<const double> y)>;

  ConfinementPotential(std::string name, int dimension, Evaluator f, double min_value,
                       bool reflection_symmetric);

  // omega^2 |y|^2 + shift
  static ConfinementPotential harmonic(int dimension, double omega = 1.0, double shift = 0.0);
  // -depth exp(-|y|^2 / width^2): bounded, with a bound state below 0
  static ConfinementPotential gaussian_well(int dimension, double depth = 10.0, double width = 1.0);

  double operator()(std::span<const double> y) const { return f_(y); }
  int dimension() const { return dimension_; }
  const std::string& name() const { return name_; }
  double min_value() const { return min_value_; }
  // Even under y -> -y; lets the many-body code use transverse parity.
  bool reflection_symmetric() const { return reflection_symmetric_; }
  // sup (V - E0)_-  for this potential.
  double negative_part_bound(double energy0) const;

 private:
  std::string name_;
  int dimension_;
  Evaluator f_;
  double min_value_;
  bool reflection_symmetric_;
};

}  // namespace dimred::potentials

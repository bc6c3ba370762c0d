#pragma once

#include <vector>

#include "dimred/fit.hpp"
#include "dimred/nls.hpp"
#include "dimred/potentials.hpp"
#include "dimred/transverse.hpp"

namespace dimred::auxiliary {

// Samples of a radial function on [0, r_max]. The grid is uniform on each
// segment; segment_starts[i] is the index of the first sample of segment i
// (segments share their end points).
struct RadialFunction {
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<double> derivative;
  std::vector<std::size_t> segment_starts;
  double mu = 0.0;
  double epsilon = 0.0;
  int space_dim = 3;
};

// Samples on a symmetric grid [-half_width, half_width].
struct LineFunction {
  std::vector<double> xs;
  std::vector<double> values;
  double half_width = 0.0;
  double operator()(double x) const;  // piecewise linear, zero outside
  double evenness_error() const;
  double integral() const;            // of the piecewise-linear interpolant
};

// Smooth decreasing step: 1 for x <= a, 0 for x >= b,
// 1 / (1 + exp((b-a)/(b-x) - (b-a)/(x-a))) in between.
double smooth_step(double x, double a, double b);
double smooth_step_derivative(double x, double a, double b);

// h with  Laplace h = w_beta  in the ball of radius eps, h = 0 on its
// boundary and outside.
RadialFunction build_h_epsilon(const potentials::ScaledInteraction& w, int n_samples);
// h at radius r by the image-charge double integral (independent check).
double h_epsilon_direct(const potentials::ScaledInteraction& w, double r, double tol = 1e-11);

struct GradientNorms {
  double sup = 0.0;
  double l2 = 0.0;
};
GradientNorms h_epsilon_gradient(const potentials::ScaledInteraction& w);

struct PoissonReport {
  double max_residual = 0.0;   // relative to sup |w_beta|
  double boundary_value = 0.0; // |h(eps)|
  int checked_points = 0;
};
PoissonReport verify_poisson(const RadialFunction& h, const potentials::ScaledInteraction& w);

struct GradientScalingFit {
  fit::LineFit sup_fit;  // against N^-1 mu^-2 eps^2
  fit::LineFit l2_fit;   // against N^-1 mu^-1/2 eps^2
  std::vector<double> sup_values;
  std::vector<double> l2_values;
  std::vector<double> sup_predictor;
  std::vector<double> l2_predictor;
};
GradientScalingFit gradient_scaling_fit(const std::vector<scaling::ScalingPoint>& points,
                                        const potentials::InteractionProfile& profile);

struct ThetaReport {
  RadialFunction theta;
  double sup = 0.0;
  double l2 = 0.0;
  double grad_sup = 0.0;
  double grad_l2 = 0.0;
  double grad_sup_times_eps = 0.0;  // stays bounded
  double midpoint_value = 0.0;
};
ThetaReport theta(double mu, double epsilon, int n_samples, int space_dim = 3);

struct QuasiOptions {
  int samples = 401;
  int min_points_per_range = 8;
  double tol = 1e-11;
};
// w-bar(x) = \int\int |chi(y1)|^2 |chi(y2)|^2 w_beta(x, y1 - y2).
LineFunction quasi1d(const potentials::ScaledInteraction& w, const transverse::RescaledMode& chi,
                     const QuasiOptions& opts = {});
// \int w-bar computed by marginalising in the other order.
double quasi1d_mass(const potentials::ScaledInteraction& w, const transverse::RescaledMode& chi,
                    const QuasiOptions& opts = {});

// Green's function of h'' = f on [-ell, ell] with zero boundary values.
double green(double xp, double x, double ell);

struct HBar {
  double ell = 0.0;
  LineFunction h;
  LineFunction dh;
  LineFunction theta_bar;
  double boundary_max = 0.0;
  double residual = 0.0;        // max |h'' - w-bar| on interior samples, relative to sup w-bar
  double wbar_l1 = 0.0;
  double grad_sup = 0.0;
  double grad_l2 = 0.0;
};
HBar build_h_bar(const LineFunction& wbar, double beta1, std::int64_t n_particles, double mu, int n_samples = 2001);

struct GammaReport {
  LineFunction gamma;     // on the condensate grid (x shifted to be symmetric)
  double l2 = 0.0;
  double mu_over_eps = 0.0;
  double wbar_mass = 0.0;
  double point_mass = 0.0;  // ||w_beta||_1 \int |chi^eps|^4
};
GammaReport discrepancy_gamma(const potentials::ScaledInteraction& w, const nls::CondensateState& phi,
                              const transverse::RescaledMode& chi, const QuasiOptions& opts = {});

}  // namespace dimred::auxiliary

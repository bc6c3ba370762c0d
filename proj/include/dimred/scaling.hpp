#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

namespace dimred::scaling {

// One (N, epsilon, beta) triple. mu = (N/eps^2)^(-beta) is the interaction
// range, density_scale = N/eps^2.
class ScalingPoint {
 public:
  static ScalingPoint make(std::int64_t n_particles, double epsilon, double beta);

  std::int64_t n_particles() const { return n_; }
  double epsilon() const { return epsilon_; }
  double beta() const { return beta_; }
  double mu() const { return mu_; }
  double density_scale() const { return density_scale_; }

  double mu_over_epsilon() const { return mu_ / epsilon_; }
  double epsilon2_over_mu() const { return epsilon_ * epsilon_ / mu_; }

 private:
  ScalingPoint(std::int64_t n, double eps, double beta);

  std::int64_t n_;
  double epsilon_;
  double beta_;
  double mu_;
  double density_scale_;
};

struct ScalingSequence {
  std::vector<ScalingPoint> points;
  std::optional<double> gamma;  // set when eps = N^(-gamma)

  // eps = N^(-gamma) for every N in ns (must be strictly increasing).
  static ScalingSequence power_law(double beta, double gamma, const std::vector<std::int64_t>& ns);
  // Explicit (N, eps) pairs sharing beta.
  static ScalingSequence explicit_points(double beta,
                                         const std::vector<std::pair<std::int64_t, double>>& pairs);

  double beta() const { return points.front().beta(); }
};

struct RateInputs {
  double xi;
  double beta1;
  double eta;

  // Validates 0 < xi <= beta/4, 0 < beta1 <= beta, eta > 0.
  static RateInputs make(double beta, double xi, double beta1, double eta);
};

struct PointEvidence {
  std::int64_t n_particles;
  double epsilon;
  double epsilon2_over_mu;
  double mu_over_epsilon;
};

struct Classification {
  bool admissible = false;
  bool moderately_confining = false;
  std::vector<PointEvidence> evidence;
};

// Finite-sequence proxy for the two limits: a ratio "tends to zero" when it
// is strictly decreasing along the sequence and its last value is below
// threshold.
Classification classify(const ScalingSequence& seq, double threshold = 0.5);

// Open interval of gamma for which eps = N^(-gamma) is admissible and
// moderately confining. gamma_max is +infinity when beta >= 1/2.
struct GammaWindow {
  double gamma_min;
  double gamma_max;
  bool contains(double gamma) const { return gamma > gamma_min && gamma < gamma_max; }
  bool upper_unbounded() const { return gamma_max == std::numeric_limits<double>::infinity(); }
};
GammaWindow power_law_window(double beta);

// Unit-constant convergence rate
//   mu/eps + (eps^2/mu)^(1/2) + N^(-beta/4) + (N/eps^2)^(-eta).
struct RateBreakdown {
  double confinement;    // mu/eps
  double admissibility;  // (eps^2/mu)^(1/2)
  double depletion;      // N^(-beta/4)
  double coupling;       // (N/eps^2)^(-eta)
  double total() const { return confinement + admissibility + depletion + coupling; }
};
RateBreakdown theoretical_rate(const ScalingPoint& point, const RateInputs& rate);

}  // namespace dimred::scaling

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dimred/potentials.hpp"
#include "dimred/projectors.hpp"

// Measurement batteries shared by verify-all and the acceptance runner.
// Each returns measured quantities; callers compare against their bounds.
namespace dimred::battery {

struct ProjectorAlgebra {
  int systems = 0;
  int max_particles = 0;
  int max_dim = 0;
  double counting_residual = 0.0;   // sum_k P_k = 1, P_k^2 = P_k, sum_j q_j P_k = k P_k
  double factor_residual = 0.0;     // p = p^Phi p^chi, q = q^chi + q^Phi p^chi, ...
  double fqq_residual = 0.0;        // n^2 = (1/N) sum_j q_j
  double alpha_residual = 0.0;      // alpha_{n^2} = ||q_1 psi||^2
  double min_probability = 0.0;
};
// Random symmetric states on d^N-dimensional tensor spaces, N <= max_n,
// d <= max_d, d^N <= cap.
ProjectorAlgebra projector_algebra(std::uint64_t seed, int systems = 50, int max_n = 6, int max_d = 8,
                                   std::size_t cap = 729);

struct BridgeSurvey {
  int states = 0;
  int violations = 0;
  int factorial_path = 0;  // states measured through the factorial-moment path
  double max_lower_ratio = 0.0;  // alpha_{n^2} / trace distance
  double max_upper_ratio = 0.0;  // trace distance / sqrt(8 alpha_{n^2})
};
BridgeSurvey rate_bridge_survey(std::uint64_t seed, int states = 100, int max_n = 6, int max_modes = 8);

struct WeightSurvey {
  std::vector<projectors::WeightNormReport> reports;
  bool all_l_ok = false;
  double max_ln_norm = 0.0;
};
WeightSurvey weight_survey(const std::vector<int>& ns, const std::vector<double>& xis);

struct TransverseAnalytics {
  double e0_1d = 0.0, gap_1d = 0.0, quartic_1d = 0.0;
  double e0_2d = 0.0, quartic_2d = 0.0;
  double spacing_1d = 0.0, spacing_2d = 0.0;
};
TransverseAnalytics transverse_analytics(double spacing_1d = 1.5e-3, double spacing_2d = 0.025);

struct NlsBattery {
  double mass_drift = 0.0;
  double energy_drift = 0.0;
  double phase_error = 0.0;
  double strang_order = 0.0;
};
NlsBattery nls_battery();

struct AuxSetup {
  std::int64_t n_particles = 100;
  double epsilon = 0.5;
  double beta = 0.5;
  int samples = 2048;
};
struct AuxBattery {
  double h_oracle_error = 0.0;       // relative to |h(0)|
  double poisson_coarse = 0.0;
  double poisson_fine = 0.0;
  double poisson_order = 0.0;        // log2 of the residual ratio for doubled sampling
  double boundary_max = 0.0;         // |h(eps)|, |Theta(eps)|, |h-bar(+-ell)|, |1 - Theta(mu)|
  double theta_midpoint = 0.0;
  double theta_grad_eps = 0.0;       // eps ||grad Theta||_inf at mu = 1e-3, eps = 1e-1
  double hbar_slope_error = 0.0;     // |h-bar'(ell) - c a| / (c a)
  double hbar_order = 0.0;
  double green_asymmetry = 0.0;
  double grad_sup_slope = 0.0;
  double grad_l2_slope = 0.0;
  double wbar_oracle_error = 0.0;    // w-bar(0) against the erf closed form
};
// Throws DomainError when the configured point has mu >= eps.
AuxBattery aux_battery(const AuxSetup& setup = {});

struct CouplingSurvey {
  std::vector<double> couplings;
  double spread = 0.0;            // max |b_i - b_0|
  double limit_defect = 0.0;      // max |b_i - l1 quartic|
  std::vector<double> etas;
  std::vector<bool> condition_d;  // per eta, over every point
};
CouplingSurvey coupling_survey(const potentials::InteractionProfile& profile, double quartic, double beta, double gamma,
                               const std::vector<std::int64_t>& ns, const std::vector<double>& etas);

struct OracleSetup {
  double epsilon = 0.1;
  double beta = 0.17;
  double box_length = 1.0;
  int nx = 20;
  int ny = 31;
  int my = 12;
  double extent = 7.5;
  double t_final = 0.5;
  double oracle_dt = 2e-3;
};
struct OracleComparison {
  double trace_distance = 0.0;  // mode space vs grid oracle at t_final
  double change = 0.0;          // how far gamma moved from its initial value
  std::size_t dim = 0;
  double symmetry_error = 0.0;
  double seconds = 0.0;
};
OracleComparison oracle_comparison(const OracleSetup& setup = {});

}  // namespace dimred::battery

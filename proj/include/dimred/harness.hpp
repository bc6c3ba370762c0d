#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dimred/auxiliary.hpp"
#include "dimred/config.hpp"
#include "dimred/fit.hpp"
#include "dimred/manybody.hpp"
#include "dimred/nls.hpp"
#include "dimred/potentials.hpp"
#include "dimred/scaling.hpp"

namespace dimred::harness {

// Typed view of a key-value config. See configs/README for the keys.
struct ExperimentConfig {
  // scaling sequence: eps = N^-gamma over `ns`, or explicit (N, eps) pairs
  double beta = 0.5;
  std::optional<double> gamma;
  std::vector<std::int64_t> ns;
  std::vector<std::pair<std::int64_t, double>> points;

  std::string profile = "uniform_ball";
  double profile_height = 1.0;
  double profile_width = 0.25;
  std::string profile_file;
  int d_perp = 1;

  std::string confinement = "harmonic";
  double confinement_omega = 1.0;
  double confinement_depth = 10.0;
  double confinement_width = 1.0;

  std::string external = "zero";
  double external_amplitude = 0.0;
  double external_wavenumber = 1.0;
  double external_modulation = 0.0;
  double external_frequency = 0.0;
  double external_transverse = 0.0;

  std::string phi0 = "constant";
  double phi0_amplitude = 0.5;
  int phi0_mode = 0;
  double phi0_width = 0.5;
  double box_length = 6.283185307179586;
  int nls_points = 64;
  double nls_dt = 1e-3;

  int mx = 9;
  int my = 3;
  std::vector<int> sector_momenta;  // empty: no momentum filter
  int sector_parity = 1;
  double points_per_range = 8.0;
  double transverse_extent = 8.0;
  std::string quadrature = "panels";
  int x_points = 0;
  std::size_t cap = 200000;
  double krylov_tol = 1e-12;

  double dt = 0.5;  // many-body step (static H: a single Krylov-controlled step is exact)
  double t_final = 0.5;
  int checkpoints = 1;

  double xi = 0.1;
  double beta1 = 0.1;
  double eta = 1.0;

  bool gamma_discrepancy = true;
  // sweep: exit 1 unless trace_distance(T) strictly decreases in N
  bool assert_monotone = false;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  std::string inject_fault = "none";

  // auxiliary battery point
  std::int64_t aux_n = 100;
  double aux_epsilon = 0.5;
  double aux_beta = 0.5;
  int aux_samples = 2048;

  // transverse subcommand
  int transverse_points = 2001;
  int transverse_modes = 4;
  bool dump_samples = false;  // chi / auxiliary samples as CSV

  // nls-evolve: coupling override (default b_{N,eps} of the first point)
  std::optional<double> nls_b;
  // manybody-evolve
  bool dump_states = false;
  // alpha: state dump to analyse, and the projector it is measured against
  std::string state_file;
  std::string alpha_projector = "condensate";  // condensate | mode
  int alpha_mode = 0;
  double alpha_time = 0.0;  // Phi is evolved to this time first

  // verify-all: subset of projectors, bridge, weights, transverse, nls,
  // auxiliary, coupling, oracle (empty = all)
  std::vector<std::string> verify_modules;

  config::Config raw;
  std::string hash;

  // Throws ConfigError on unknown keys, malformed values, or violated
  // invariants (xi <= beta/4, beta1 <= beta).
  static ExperimentConfig from(const config::Config& c);
  static const std::vector<std::string>& known_keys();

  scaling::ScalingSequence sequence() const;
  scaling::RateInputs rate() const;
  potentials::InteractionProfile make_profile() const;
  potentials::ConfinementPotential make_confinement() const;
  potentials::ExternalPotential make_external() const;
  nls::CondensateState make_phi0() const;
  manybody::BasisOptions basis_options(const scaling::ScalingPoint& point) const;
  manybody::Sector sector() const;
};

struct SweepRow {
  std::int64_t n = 0;
  double epsilon = 0.0;
  double mu = 0.0;
  double t = 0.0;
  double trace_distance = 0.0;
  double alpha_m = 0.0;
  double alpha_xi = 0.0;
  double energy_gap = 0.0;
  double rate = 0.0;              // unit-constant theoretical rate
  double excited_fraction = 0.0;  // ||q^chi psi||
  double envelope = 0.0;          // e(t)
  double excited_ratio = 0.0;     // excited_fraction / (e(t) eps)
  double alpha_n2 = 0.0;
  bool bridge_holds = false;
  std::size_t dim = 0;

  static std::vector<std::string> columns();
  std::vector<double> values() const;
};

struct GammaRow {
  std::int64_t n = 0;
  double epsilon = 0.0;
  double mu = 0.0;
  double mu_over_eps = 0.0;
  double gamma_l2 = 0.0;
};

struct PointFailure {
  std::int64_t n = 0;
  double epsilon = 0.0;
  std::string error;
  bool size_cap = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<GammaRow> gamma_rows;
  std::vector<PointFailure> failures;
  double seconds = 0.0;
};

// Runs every scaling point; a failing point is logged and skipped.
SweepResult run_sweep(const ExperimentConfig& cfg, bool verbose = true);

struct RateFit {
  double constant = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
  double t = 0.0;
  int rows = 0;
};
// log(trace_distance) against log(rate^(1/2)) over the rows at the latest
// common time. InsufficientDataError below 4 usable rows.
RateFit fit_rate(const std::vector<SweepRow>& rows);

// trace_distance at the latest time, one entry per point in sweep order.
struct Trend {
  double t = 0.0;
  std::vector<std::int64_t> ns;
  std::vector<double> distances;
  bool strictly_decreasing = false;
  bool bridge_every_row = false;  // over all rows, every time
};
Trend trend(const std::vector<SweepRow>& rows);

// log ||Gamma|| against log(mu/eps).
fit::LineFit fit_gamma(const std::vector<GammaRow>& rows);

struct Check {
  std::string module;
  std::string name;
  double measured = 0.0;
  double bound = 0.0;
  bool passed = false;
  std::string detail;
};

struct VerificationReport {
  std::vector<Check> checks;
  bool passed() const;
  std::vector<Check> failures() const;
};

VerificationReport verify_all(const ExperimentConfig& cfg, bool verbose = true);

}  // namespace dimred::harness

#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "dimred/potentials.hpp"

namespace dimred::nls {

using cplx = std::complex<double>;

// Periodic grid x_j = -L/2 + j L/M, j = 0..M-1.
struct PeriodicGrid {
  double length = 0.0;
  int points = 0;

  static PeriodicGrid make(double length, int points);
  double dx() const { return length / points; }
  double x(int j) const { return -0.5 * length + j * dx(); }
};

struct CondensateState {
  PeriodicGrid grid;
  std::vector<cplx> values;
  double time = 0.0;

  // Samples f on the grid and normalizes to unit L2 norm.
  static CondensateState from_function(const PeriodicGrid& grid, const std::function<cplx(double)>& f);
  // e^{i k x} / sqrt(L) with k = 2 pi m / L.
  static CondensateState plane_wave(const PeriodicGrid& grid, int m);
  // Normalized Gaussian packet centred at x0 with width s and carrier k0.
  static CondensateState gaussian(const PeriodicGrid& grid, double x0, double width, double k0);

  double mass() const;
};

struct NormReport {
  double l2 = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
  double sup = 0.0;
};

NormReport norm_report(const CondensateState& state);

// <Phi, (-d_x^2 + V(t,(x,0)) + (b/2)|Phi|^2) Phi>, kinetic part spectral.
double effective_energy(const CondensateState& state, const potentials::ExternalPotential& external,
                        double b, double t);

// Fraction of the spectral L2 mass carried by |k| above two thirds of the
// Nyquist wavenumber.
double spectral_tail(const CondensateState& state);
// max |Phi| at the periodic seam x = -L/2.
double seam_value(const CondensateState& state);

struct EvolveOptions {
  double dt = 1e-3;
  double t_final = 1.0;
  int record_every = 0;          // steps between trajectory rows; 0 = first and last only
  bool keep_states = false;      // store the state at every recorded row
  double initial_tail_tol = 1e-8;
  double blowup_tail_tol = 1e-3;
};

struct TrajectoryRow {
  double t = 0.0;
  NormReport norms;
  double energy = 0.0;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  std::vector<CondensateState> states;
  CondensateState final_state;
  double max_seam = 0.0;
  long steps = 0;
};

// Strang splitting: half potential/nonlinear phase (V sampled at the step
// midpoint), full kinetic step in Fourier space, half phase.
Trajectory evolve(const CondensateState& initial, const potentials::ExternalPotential& external,
                  double b, const EvolveOptions& opts);

struct EnvelopeInputs {
  double e_psi0 = 0.0;                // |E^psi(0)|
  double e_phi0 = 0.0;                // |E^Phi(0)|
  double vpar_dot_l1_in_time = 0.0;   // \int_0^t ||dV/dt||_inf
  double vpar_mixed_sup = 0.0;        // sup ||d_t^i d_y^j V||_inf

  // Inputs for an external potential over [0, t], using its analytic norms.
  static EnvelopeInputs from_potential(const potentials::ExternalPotential& external, double e_psi0,
                                       double e_phi0, double t);
};

// e(t) = sqrt(1 + |E^psi(0)| + |E^Phi(0)| + \int ||dV|| + sup ||d d V||)
double envelope(const EnvelopeInputs& inputs);

// L2 distance between two states on the same grid.
double distance(const CondensateState& a, const CondensateState& b);

}  // namespace dimred::nls

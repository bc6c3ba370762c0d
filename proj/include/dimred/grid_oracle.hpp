#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "dimred/manybody.hpp"
#include "dimred/nls.hpp"

namespace dimred::grid_oracle {

// Direct split-step propagation of a two-particle wavefunction
// psi(x1, y1, x2, y2) on a tensor grid (one transverse dimension).
struct Options {
  int nx = 32;
  double box_length = 6.283185307179586;
  transverse::Grid transverse_grid = transverse::Grid::make(1, 8.0, 41);  // unscaled
  double dt = 5e-3;
  double t_final = 0.5;
  bool richardson = true;              // combine dt and dt/2 runs
  std::size_t max_points = std::size_t(1) << 28;
};

struct Result {
  // gamma^(1) in the orthonormal grid basis (x index major, y minor)
  Eigen::MatrixXcd gamma;
  double energy = 0.0;                 // <H> / 2
  double symmetry_error = 0.0;         // || psi - swap psi ||
  double norm_drift = 0.0;
  int nx = 0;
  int ny = 0;
};

Result run(const scaling::ScalingPoint& point, const potentials::ConfinementPotential& confinement,
           const potentials::ExternalPotential& external, const potentials::ScaledInteraction& interaction,
           const nls::CondensateState& phi0, const Options& opts);

// Embeds a mode-space gamma^(1) into the oracle's grid basis. The basis
// must use grid quadrature with x_points = nx on the same transverse grid.
Eigen::MatrixXcd embed(const manybody::ModeBasis& basis, const Eigen::MatrixXcd& gamma);

}  // namespace dimred::grid_oracle

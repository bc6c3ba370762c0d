#pragma once

#include <vector>

#include <Eigen/Dense>

#include "dimred/potentials.hpp"

namespace dimred::transverse {

// Uniform Dirichlet grid on [-extent, extent]^dim with n interior points per
// axis: y_i = -extent + (i + 1) * spacing, spacing = 2 extent / (n + 1).
// Row-major (last axis fastest) in two dimensions.
struct Grid {
  int dim = 1;
  int n = 0;
  double extent = 0.0;
  double spacing = 0.0;

  static Grid make(int dim, double extent, int n);
  // Smallest grid with spacing <= h.
  static Grid with_spacing(int dim, double extent, double h);

  double coord(int i) const { return -extent + (i + 1) * spacing; }
  int size() const { return dim == 1 ? n : n * n; }
  double cell() const { return dim == 1 ? spacing : spacing * spacing; }
  // Index of the mirror point y -> -y.
  int mirror(int idx) const;
  Grid scaled(double factor) const;
};

// Lowest eigenpairs of the second-order finite-difference -Delta + V.
// Columns of `modes` are sampled functions normalized so that
// sum |f|^2 * cell = 1.
struct Spectrum {
  Grid grid;
  std::vector<double> energies;
  Eigen::MatrixXd modes;
  std::vector<int> parity;  // +1 / -1 under y -> -y, 0 if mixed
};

struct TransverseMode {
  Grid grid;
  std::vector<double> chi;
  double energy0 = 0.0;
  double energy1 = 0.0;
  double gap = 0.0;
  double quartic = 0.0;
  double boundary_max = 0.0;
};

Spectrum solve_modes(const potentials::ConfinementPotential& confinement, const Grid& grid,
                     int n_modes);

// Throws ResolutionError when chi exceeds 1e-8 on the outermost grid points
// and DegeneracyError when the lowest gap is below 1e-10.
TransverseMode solve_ground(const potentials::ConfinementPotential& confinement, const Grid& grid);

// <f, (-Delta + V) f> / <f, f> with the same stencil used by the solver.
double rayleigh_quotient(const potentials::ConfinementPotential& confinement, const Grid& grid,
                         const std::vector<double>& f);

double grid_quartic(const Grid& grid, const std::vector<double>& f);
double grid_norm(const Grid& grid, const std::vector<double>& f);

// chi^eps(y) = eps^(-d/2) chi(y / eps), sampled on the dilated grid.
struct RescaledMode {
  Grid grid;
  std::vector<double> chi;
  double energy0 = 0.0;  // E0 / eps^2
  double quartic = 0.0;
};
RescaledMode rescale(const TransverseMode& mode, double epsilon);

// e(t) * eps
double excited_fraction_bound(double epsilon, double envelope_value);

}  // namespace dimred::transverse

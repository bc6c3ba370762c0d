#include "dimred/transverse.hpp"

#include <algorithm>
#include <cmath>
#include <lapacke.h>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "dimred/errors.hpp"

namespace dimred::transverse {

namespace {

constexpr double kBoundaryTol = 1e-8;
constexpr double kDegeneracyTol = 1e-10;

std::vector<double> sample_potential(const potentials::ConfinementPotential& v, const Grid& g) {
  std::vector<double> out(static_cast<std::size_t>(g.size()));
  if (g.dim == 1) {
    for (int i = 0; i < g.n; ++i) {
      const double y[1] = {g.coord(i)};
      out[i] = v(y);
    }
  } else {
    for (int i = 0; i < g.n; ++i) {
      for (int j = 0; j < g.n; ++j) {
        const double y[2] = {g.coord(i), g.coord(j)};
        out[static_cast<std::size_t>(i) * g.n + j] = v(y);
      }
    }
  }
  return out;
}

// y = (-Delta_h + V) x
void apply(const Grid& g, const std::vector<double>& pot, const double* x, double* y) {
  const double c = 1.0 / (g.spacing * g.spacing);
  if (g.dim == 1) {
    for (int i = 0; i < g.n; ++i) {
      double s = (2.0 * c + pot[i]) * x[i];
      if (i > 0) s -= c * x[i - 1];
      if (i + 1 < g.n) s -= c * x[i + 1];
      y[i] = s;
    }
    return;
  }
  const int n = g.n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int k = i * n + j;
      double s = (4.0 * c + pot[k]) * x[k];
      if (i > 0) s -= c * x[k - n];
      if (i + 1 < n) s -= c * x[k + n];
      if (j > 0) s -= c * x[k - 1];
      if (j + 1 < n) s -= c * x[k + 1];
      y[k] = s;
    }
  }
}

Spectrum tridiagonal_modes(const Grid& g, const std::vector<double>& pot, int k) {
  const int n = g.n;
  const double c = 1.0 / (g.spacing * g.spacing);
  std::vector<double> d(n);
  std::vector<double> e(std::max(n - 1, 1), -c);
  for (int i = 0; i < n; ++i) d[i] = 2.0 * c + pot[i];
  std::vector<double> w(n);
  Eigen::MatrixXd z(n, k);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(k));
  lapack_int m = 0;
  const lapack_int info = LAPACKE_dstevr(LAPACK_COL_MAJOR, 'V', 'I', n, d.data(), e.data(), 0.0, 0.0,
                                         1, k, 0.0, &m, w.data(), z.data(), n, isuppz.data());
  if (info != 0 || m != k) {
    throw ToleranceError("tridiagonal eigensolver failed (info " + std::to_string(info) + ")");
  }
  Spectrum s;
  s.grid = g;
  s.energies.assign(w.begin(), w.begin() + k);
  s.modes = z / std::sqrt(g.cell());
  return s;
}

Spectrum shift_invert_modes(const Grid& g, const std::vector<double>& pot, int k) {
  const int n = g.n;
  const int size = g.size();
  const double c = 1.0 / (g.spacing * g.spacing);
  const double sigma = *std::min_element(pot.begin(), pot.end());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(size) * 3);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int r = i * n + j;
      trip.emplace_back(r, r, 4.0 * c + pot[r] - sigma);
      if (i > 0) trip.emplace_back(r, r - n, -c);
      if (j > 0) trip.emplace_back(r, r - 1, -c);
    }
  }
  Eigen::SparseMatrix<double> a(size, size);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw ToleranceError("sparse factorization failed");

  const int block = k + 3;
  Eigen::MatrixXd x(size, block);
  // Deterministic smooth start vectors: low Fourier-like modes.
  for (int b = 0; b < block; ++b) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double u = (i + 1.0) / (n + 1.0);
        const double v = (j + 1.0) / (n + 1.0);
        x(i * n + j, b) = std::sin(M_PI * u * (1 + b / 2)) * std::sin(M_PI * v * (1 + (b + 1) / 2)) +
                          0.01 * std::cos(7.0 * b * u + 3.0 * v);
      }
    }
  }
  Eigen::VectorXd theta;
  Eigen::MatrixXd ax(size, block);
  for (int it = 0; it < 2000; ++it) {
    for (int b = 0; b < block; ++b) x.col(b) = ldlt.solve(Eigen::VectorXd(x.col(b)));
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    x = qr.householderQ() * Eigen::MatrixXd::Identity(size, block);
    for (int b = 0; b < block; ++b) apply(g, pot, x.col(b).data(), ax.col(b).data());
    Eigen::MatrixXd h = x.transpose() * ax;
    h = 0.5 * (h + h.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    theta = es.eigenvalues();
    x = x * es.eigenvectors();
    ax = ax * es.eigenvectors();
    double worst = 0.0;
    for (int b = 0; b < k; ++b) worst = std::max(worst, (ax.col(b) - theta(b) * x.col(b)).norm());
    // Residual floor is set by rounding in the stencil, ~ eps_mach * ||A||.
    if (worst < 1e-12 * (8.0 * c + std::abs(sigma)) + 1e-12) {
      Spectrum s;
      s.grid = g;
      s.energies.assign(theta.data(), theta.data() + k);
      s.modes = x.leftCols(k) / std::sqrt(g.cell());
      return s;
    }
  }
  throw ToleranceError("shift-invert iteration did not converge");
}

void fix_signs_and_parity(Spectrum& s) {
  const Grid& g = s.grid;
  const int size = g.size();
  s.parity.assign(s.energies.size(), 0);
  for (int m = 0; m < s.modes.cols(); ++m) {
    Eigen::Index imax = 0;
    s.modes.col(m).cwiseAbs().maxCoeff(&imax);
    if (s.modes(imax, m) < 0.0) s.modes.col(m) *= -1.0;
    double even = 0.0;
    double odd = 0.0;
    for (int i = 0; i < size; ++i) {
      const double a = s.modes(i, m);
      const double b = s.modes(g.mirror(i), m);
      even += (a + b) * (a + b);
      odd += (a - b) * (a - b);
    }
    const double tot = even + odd;
    if (odd <= 1e-16 * tot) s.parity[m] = 1;
    else if (even <= 1e-16 * tot) s.parity[m] = -1;
  }
}

double boundary_max(const Grid& g, const std::vector<double>& f) {
  double b = 0.0;
  if (g.dim == 1) return std::max(std::abs(f.front()), std::abs(f.back()));
  const int n = g.n;
  for (int i = 0; i < n; ++i) {
    b = std::max({b, std::abs(f[i]), std::abs(f[(n - 1) * n + i]), std::abs(f[i * n]),
                  std::abs(f[i * n + n - 1])});
  }
  return b;
}

}  // namespace

Grid Grid::make(int dim, double extent, int n) {
  if (dim != 1 && dim != 2) throw DomainError("grid dimension must be 1 or 2");
  if (!(extent > 0.0)) throw DomainError("grid extent must be positive");
  if (n < 3) throw DomainError("grid needs at least 3 points per axis");
  return Grid{dim, n, extent, 2.0 * extent / (n + 1)};
}

Grid Grid::with_spacing(int dim, double extent, double h) {
  if (!(h > 0.0)) throw DomainError("grid spacing must be positive");
  int n = static_cast<int>(std::ceil(2.0 * extent / h)) - 1;
  if (n % 2 == 0) ++n;  // keep y = 0 on the grid
  return make(dim, extent, std::max(n, 3));
}

int Grid::mirror(int idx) const {
  if (dim == 1) return n - 1 - idx;
  const int i = idx / n;
  const int j = idx % n;
  return (n - 1 - i) * n + (n - 1 - j);
}

Grid Grid::scaled(double factor) const {
  return Grid{dim, n, extent * factor, spacing * factor};
}

Spectrum solve_modes(const potentials::ConfinementPotential& confinement, const Grid& grid,
                     int n_modes) {
  if (confinement.dimension() != grid.dim) {
    throw DomainError("confinement and grid dimensions differ");
  }
  if (n_modes < 1 || n_modes > grid.size()) throw DomainError("invalid number of transverse modes");
  const auto pot = sample_potential(confinement, grid);
  Spectrum s = grid.dim == 1 ? tridiagonal_modes(grid, pot, n_modes)
                             : shift_invert_modes(grid, pot, n_modes);
  fix_signs_and_parity(s);
  return s;
}

TransverseMode solve_ground(const potentials::ConfinementPotential& confinement, const Grid& grid) {
  Spectrum s = solve_modes(confinement, grid, 2);
  TransverseMode m;
  m.grid = grid;
  m.chi.assign(s.modes.col(0).data(), s.modes.col(0).data() + grid.size());
  m.energy0 = s.energies[0];
  m.energy1 = s.energies[1];
  m.gap = s.energies[1] - s.energies[0];
  m.quartic = grid_quartic(grid, m.chi);
  m.boundary_max = boundary_max(grid, m.chi);
  if (m.boundary_max > kBoundaryTol) {
    throw ResolutionError("ground state is " + std::to_string(m.boundary_max) +
                          " at the grid boundary (needs < 1e-8); increase the transverse extent");
  }
  if (m.gap < kDegeneracyTol) {
    throw DegeneracyError("lowest transverse eigenvalues are degenerate (gap " +
                          std::to_string(m.gap) + ")");
  }
  return m;
}

double rayleigh_quotient(const potentials::ConfinementPotential& confinement, const Grid& grid,
                         const std::vector<double>& f) {
  const auto pot = sample_potential(confinement, grid);
  std::vector<double> hf(f.size());
  apply(grid, pot, f.data(), hf.data());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    num += f[i] * hf[i];
    den += f[i] * f[i];
  }
  return num / den;
}

double grid_quartic(const Grid& grid, const std::vector<double>& f) {
  double s = 0.0;
  for (double v : f) s += v * v * v * v;
  return s * grid.cell();
}

double grid_norm(const Grid& grid, const std::vector<double>& f) {
  double s = 0.0;
  for (double v : f) s += v * v;
  return std::sqrt(s * grid.cell());
}

RescaledMode rescale(const TransverseMode& mode, double epsilon) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  RescaledMode r;
  r.grid = mode.grid.scaled(epsilon);
  const double pref = std::pow(epsilon, -0.5 * mode.grid.dim);
  r.chi.resize(mode.chi.size());
  for (std::size_t i = 0; i < mode.chi.size(); ++i) r.chi[i] = pref * mode.chi[i];
  r.energy0 = mode.energy0 / (epsilon * epsilon);
  r.quartic = grid_quartic(r.grid, r.chi);
  return r;
}

double excited_fraction_bound(double epsilon, double envelope_value) {
  return envelope_value * epsilon;
}

}  // namespace dimred::transverse

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "dimred/nls.hpp"
#include "dimred/potentials.hpp"
#include "dimred/scaling.hpp"
#include "dimred/transverse.hpp"

namespace dimred::manybody {

using cplx = std::complex<double>;

enum class WQuadrature {
  panels,  // polar Gauss-Legendre panels in the relative coordinate; exact momentum conservation
  grid,    // sampled on the product grid; momentum conserved modulo the x-grid size
};

struct BasisOptions {
  int mx = 9;                 // plane waves m = -(mx-1)/2 .. (mx-1)/2 (odd), or -mx/2 .. mx/2-1 (even)
  int my = 3;                 // transverse eigenmodes
  double box_length = 6.283185307179586;
  transverse::Grid transverse_grid = transverse::Grid::make(1, 8.0, 401);  // unscaled coordinates
  WQuadrature quadrature = WQuadrature::panels;
  int x_points = 0;           // x quadrature grid; 0 picks max(4 mx, 64) (panels) / required in grid mode
  int radial_panels = 8;
  int radial_order = 16;
  int angular_points = 128;
  int min_points_per_range = 8;
};

struct ModeLabel {
  int m;  // longitudinal wavenumber index, k = 2 pi m / L
  int n;  // transverse mode index
};

// One-particle basis u_a(x, y) = e^{i k_m x}/sqrt(L) chi_n^eps(y) with its
// one-body and two-body matrix elements.
class ModeBasis {
 public:
  static ModeBasis build(const scaling::ScalingPoint& point,
                         const potentials::ConfinementPotential& confinement,
                         const potentials::ExternalPotential& external,
                         const potentials::ScaledInteraction& interaction, const BasisOptions& opts);

  int size() const { return static_cast<int>(modes_.size()); }
  int mx() const { return mx_; }
  int my() const { return my_; }
  const ModeLabel& label(int a) const { return modes_[a]; }
  int index(int m, int n) const;  // -1 when absent
  double wavenumber(int a) const;
  int transverse_parity(int a) const { return parity_[modes_[a].n]; }
  // 0 when momenta are conserved exactly, else the modulus.
  int momentum_modulus() const { return modulus_; }
  const scaling::ScalingPoint& point() const { return point_; }
  double box_length() const { return length_; }
  // E_n / eps^2 of the rescaled transverse operator.
  double transverse_energy(int n) const { return trans_energy_[n]; }
  double ground_energy_scaled() const { return trans_energy_[0]; }
  const transverse::Grid& rescaled_grid() const { return ygrid_; }
  // Rescaled transverse modes sampled on rescaled_grid(), columns = n.
  const Eigen::MatrixXd& transverse_modes() const { return ymodes_; }
  const potentials::ExternalPotential& external() const { return external_; }
  bool time_dependent() const { return external_.time_dependent(); }

  // h(t) = kinetic + transverse + V(t).
  Eigen::MatrixXcd one_body(double t) const;
  // V(t) part alone.
  Eigen::MatrixXcd external_matrix(double t) const;
  // W_abcd = \iint u_a^* u_b^* w(z - z') u_c u_d (real for these modes).
  double w(int a, int b, int c, int d) const;
  bool interaction_zero() const { return interaction_zero_; }
  double min_points_per_range() const { return points_per_range_; }

 private:
  int wrap_q(int q) const;

  scaling::ScalingPoint point_ = scaling::ScalingPoint::make(2, 0.5, 0.5);
  potentials::ExternalPotential external_ = potentials::ExternalPotential::zero();
  std::vector<ModeLabel> modes_;
  std::vector<int> mlist_;
  int mx_ = 0;
  int my_ = 0;
  int mmin_ = 0;
  int modulus_ = 0;
  double length_ = 0.0;
  int x_points_ = 0;
  transverse::Grid ygrid_;
  Eigen::MatrixXd ymodes_;
  std::vector<double> trans_energy_;
  std::vector<int> parity_;
  // F[((na*my + nc)*my + nb)*my + nd][q + qoff] / L
  std::vector<double> ftab_;
  int qcount_ = 0;
  int qoff_ = 0;
  bool interaction_zero_ = true;
  double points_per_range_ = 0.0;
};

// Which symmetric states to keep: total momentum in `momenta` (modulo
// `modulus` when nonzero; empty = any) and product of transverse parities
// equal to `parity` (0 = any).
struct Sector {
  std::vector<int> momenta;
  int modulus = 0;
  int parity = 0;
};

// Symmetric N-boson occupation basis over M modes. States are stored as
// non-decreasing tuples of mode indices; keys sum idx_i M^i.
class FockSpace {
 public:
  FockSpace(int n_particles, int n_modes, std::vector<std::uint64_t> keys);

  static FockSpace build(const ModeBasis& basis, int n_particles, const Sector& sector,
                         std::size_t cap = 200000);
  // Full symmetric space (no sector filter) over an abstract mode count.
  static FockSpace full(int n_particles, int n_modes, std::size_t cap = 200000);

  int n_particles() const { return n_; }
  int n_modes() const { return m_; }
  std::size_t dim() const { return keys_.size(); }
  std::uint64_t key(std::size_t i) const { return keys_[i]; }
  // Index of the state with this key, or npos.
  std::size_t find(std::uint64_t key) const;
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  void decode(std::uint64_t key, std::vector<int>& tuple) const;
  std::uint64_t encode(const std::vector<int>& tuple) const;
  std::vector<int> occupations(std::size_t i) const;
  std::size_t find_occupations(const std::vector<int>& occ) const;

 private:
  int n_;
  int m_;
  std::vector<std::uint64_t> keys_;
  std::vector<std::uint64_t> pow_;
};

using State = Eigen::VectorXcd;

// Sparse Hermitian operator stored as upper-triangular CSR in row blocks.
class Hamiltonian {
 public:
  static Hamiltonian build(const ModeBasis& basis, const FockSpace& space, double t = 0.0,
                           bool include_external = true);

  std::size_t dim() const { return dim_; }
  std::size_t nonzeros() const { return nnz_; }
  bool is_real() const { return real_; }
  void apply(const State& x, State& y) const;
  double expectation(const State& x) const;
  // Largest |H_ij - conj(H_ji)| is zero by construction; this checks the
  // stored diagonal is real.
  double diagonal_imag_max() const;
  // Dense copy (small spaces only).
  Eigen::MatrixXcd dense() const;

 private:
  struct Block {
    std::size_t row0 = 0;
    std::vector<std::uint32_t> ptr;
    std::vector<std::uint32_t> col;
    std::vector<double> re;
    std::vector<cplx> cx;
  };
  std::vector<Block> blocks_;
  std::size_t dim_ = 0;
  std::size_t nnz_ = 0;
  bool real_ = true;
};

struct KrylovOptions {
  int max_dim = 40;
  double tol = 1e-12;  // local error per unit time
};

struct KrylovStats {
  long matvecs = 0;
  long substeps = 0;
  double max_error = 0.0;
};

// psi <- exp(-i H tau) psi with adaptive Lanczos substeps.
void krylov_step(const Hamiltonian& h, State& psi, double tau, const KrylovOptions& opts,
                 KrylovStats& stats);

struct EvolveOptions {
  double dt = 0.05;
  double t_final = 0.5;
  int record_every = 0;
  KrylovOptions krylov;
  std::size_t cap = 200000;
};

struct EvolveRow {
  double t = 0.0;
  double norm = 0.0;
  double energy = 0.0;
};

struct Trajectory {
  std::vector<EvolveRow> rows;
  std::vector<State> states;
  State final_state;
  double max_norm_drift_per_time = 0.0;
  KrylovStats stats;
};

// Midpoint Hamiltonian per dt step; Krylov substeps inside.
Trajectory evolve(const ModeBasis& basis, const FockSpace& space, const State& initial,
                  const EvolveOptions& opts, const Hamiltonian* static_h = nullptr);

// gamma^(1)_ab = <a_b^dagger a_a> / N
Eigen::MatrixXcd reduced_density_1(const FockSpace& space, const State& psi);
// gamma^(2)_{(ab),(cd)} = <a_c^dagger a_d^dagger a_b a_a> / (N (N-1)), index a*M+b.
Eigen::MatrixXcd reduced_density_2(const FockSpace& space, const State& psi);

// E^psi = <H(t)>/N - E0/eps^2
double renormalized_energy(const ModeBasis& basis, const Hamiltonian& h, const State& psi);

// phi^{(x)N} restricted to the space; throws DomainError when more than
// `leak_tol` of its norm falls outside the sector.
State product_state(const FockSpace& space, const Eigen::VectorXcd& phi, double leak_tol = 1e-12);
// One-body coefficients of Phi (x) chi^eps in the mode basis (m within range, n = 0).
Eigen::VectorXcd condensate_coefficients(const ModeBasis& basis, const nls::CondensateState& phi);

// Sum of gamma_aa over transverse-excited modes, i.e. ||q^chi psi||^2.
double excited_population(const ModeBasis& basis, const Eigen::MatrixXcd& gamma1);
// Trace norm of gamma - |phi><phi|.
double trace_distance(const Eigen::MatrixXcd& gamma, const Eigen::VectorXcd& phi);
double trace_norm(const Eigen::MatrixXcd& hermitian);

}  // namespace dimred::manybody

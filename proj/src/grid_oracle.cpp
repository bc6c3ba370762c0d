#include "dimred/grid_oracle.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "dimred/errors.hpp"
#include "dimred/fft.hpp"

namespace dimred::grid_oracle {

namespace {

using cplx = std::complex<double>;
using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Model {
  int nx = 0;
  int ny = 0;
  int r = 0;
  double dx = 0.0;
  double dy = 0.0;
  Eigen::MatrixXd ty;                 // transverse FD operator
  Eigen::VectorXd ty_eval;
  Eigen::MatrixXd ty_evec;
  std::vector<double> k;
  std::vector<double> xs;
  std::vector<double> ys;
  std::vector<double> pair_w;         // w(x1 - x2, y1 - y2) on the R x R grid
  const potentials::ExternalPotential* ext = nullptr;
};

// Discrete Fourier propagator on the periodic x-grid.
Eigen::MatrixXcd x_propagator(const Model& m, double dt) {
  const double two_pi = 2.0 * std::numbers::pi;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(m.nx, m.nx);
  for (int i = 0; i < m.nx; ++i)
    for (int j = 0; j < m.nx; ++j) {
      cplx s = 0.0;
      for (int q = 0; q < m.nx; ++q) {
        const int mq = q <= m.nx / 2 ? q : q - m.nx;
        s += std::polar(1.0, -m.k[q] * m.k[q] * dt + two_pi * mq * (i - j) / m.nx);
      }
      u(i, j) = s / static_cast<double>(m.nx);
    }
  return u;
}

Eigen::MatrixXcd y_propagator(const Model& m, double dt) {
  Eigen::VectorXcd ph(m.ny);
  for (int i = 0; i < m.ny; ++i) ph(i) = std::polar(1.0, -m.ty_eval(i) * dt);
  return m.ty_evec.cast<cplx>() * ph.asDiagonal() * m.ty_evec.transpose().cast<cplx>();
}

// Apply (Ux (x) Uy) to the second particle of psi viewed as R x R.
void apply_second(const Model& m, const Eigen::MatrixXcd& ux, const Eigen::MatrixXcd& uy, cplx* psi) {
  const int r = m.r;
  Eigen::Map<RowMat> all(psi, static_cast<Eigen::Index>(r) * m.nx, m.ny);
  all = all * uy.transpose();
  RowMat tmp(m.nx, m.ny);
  for (int row = 0; row < r; ++row) {
    Eigen::Map<RowMat> a(psi + static_cast<std::size_t>(row) * r, m.nx, m.ny);
    tmp.noalias() = ux * a;
    a = tmp;
  }
}

void swap_particles(const Model& m, cplx* psi) {
  Eigen::Map<RowMat> a(psi, m.r, m.r);
  a.transposeInPlace();
}

void one_body(const Model& m, const Eigen::MatrixXcd& ux, const Eigen::MatrixXcd& uy, std::vector<cplx>& psi) {
  apply_second(m, ux, uy, psi.data());
  swap_particles(m, psi.data());
  apply_second(m, ux, uy, psi.data());
  swap_particles(m, psi.data());
}

std::vector<double> external_on_grid(const Model& m, double t) {
  std::vector<double> v(static_cast<std::size_t>(m.r), 0.0);
  if (m.ext->is_zero()) return v;
  for (int i = 0; i < m.nx; ++i)
    for (int j = 0; j < m.ny; ++j) {
      const double y[1] = {m.ys[j]};
      v[i * m.ny + j] = (*m.ext)(t, m.xs[i], std::span<const double>(y, 1));
    }
  return v;
}

void pointwise(const Model& m, double t, double h, std::vector<cplx>& psi) {
  const auto v = external_on_grid(m, t);
  const int r = m.r;
  for (int a = 0; a < r; ++a) {
    for (int b = 0; b < r; ++b) {
      const std::size_t idx = static_cast<std::size_t>(a) * r + b;
      psi[idx] *= std::polar(1.0, -h * (v[a] + v[b] + m.pair_w[idx]));
    }
  }
}

struct RunOut {
  Eigen::MatrixXcd gamma;
  double energy;
  double sym;
  double drift;
};

RunOut propagate(const Model& m, std::vector<cplx> psi, double dt, double t_final) {
  const long steps = std::lround(t_final / dt);
  const double h = steps > 0 ? t_final / steps : 0.0;
  const auto ux = x_propagator(m, h);
  const auto uy = y_propagator(m, h);
  for (long s = 0; s < steps; ++s) {
    const double tm = (s + 0.5) * h;
    pointwise(m, tm, 0.5 * h, psi);
    one_body(m, ux, uy, psi);
    pointwise(m, tm, 0.5 * h, psi);
  }
  RunOut out;
  Eigen::Map<RowMat> a(psi.data(), m.r, m.r);
  double nrm = 0.0;
  for (const auto& z : psi) nrm += std::norm(z);
  out.drift = std::abs(std::sqrt(nrm) - 1.0);
  out.gamma = a * a.adjoint();
  out.sym = (a - a.transpose()).norm();
  // energy per particle: Tr(gamma h1) + (1/2) <V1 + V2 + w>
  Eigen::MatrixXcd h1 = Eigen::MatrixXcd::Zero(m.r, m.r);
  for (int i = 0; i < m.nx; ++i)
    for (int j = 0; j < m.nx; ++j) {
      cplx kin = 0.0;
      for (int q = 0; q < m.nx; ++q) {
        const int mq = q <= m.nx / 2 ? q : q - m.nx;
        kin += m.k[q] * m.k[q] * std::polar(1.0, 2.0 * std::numbers::pi * mq * (i - j) / m.nx);
      }
      kin /= static_cast<double>(m.nx);
      for (int y = 0; y < m.ny; ++y) h1(i * m.ny + y, j * m.ny + y) += kin;
    }
  for (int i = 0; i < m.nx; ++i)
    for (int y1 = 0; y1 < m.ny; ++y1)
      for (int y2 = 0; y2 < m.ny; ++y2) h1(i * m.ny + y1, i * m.ny + y2) += m.ty(y1, y2);
  const auto v = external_on_grid(m, t_final);
  double e = (out.gamma * h1).trace().real();
  double pot = 0.0;
  for (int p = 0; p < m.r; ++p)
    for (int q = 0; q < m.r; ++q) {
      const std::size_t idx = static_cast<std::size_t>(p) * m.r + q;
      pot += std::norm(psi[idx]) * (v[p] + v[q] + m.pair_w[idx]);
    }
  out.energy = e + 0.5 * pot;
  out.gamma /= out.gamma.trace().real();
  return out;
}

}  // namespace

Result run(const scaling::ScalingPoint& point, const potentials::ConfinementPotential& confinement,
           const potentials::ExternalPotential& external, const potentials::ScaledInteraction& interaction,
           const nls::CondensateState& phi0, const Options& opts) {
  if (point.n_particles() != 2) throw DomainError("grid oracle handles N = 2 only");
  if (opts.transverse_grid.dim != 1 || confinement.dimension() != 1 || interaction.transverse_dim() != 1) {
    throw DomainError("grid oracle handles one transverse dimension only");
  }
  if (phi0.grid.points != opts.nx || std::abs(phi0.grid.length - opts.box_length) > 1e-12) {
    throw DomainError("initial condensate must live on the oracle x-grid");
  }
  Model m;
  m.nx = opts.nx;
  m.ny = opts.transverse_grid.n;
  m.r = m.nx * m.ny;
  const double pts = static_cast<double>(m.r) * m.r;
  if (pts > static_cast<double>(opts.max_points)) {
    throw SizeError("grid oracle needs " + std::to_string(pts) + " points, above the cap");
  }
  m.ext = &external;
  const double eps = point.epsilon();
  const auto yg = opts.transverse_grid.scaled(eps);
  m.dx = opts.box_length / m.nx;
  m.dy = yg.spacing;
  m.k = wavenumbers(m.nx, opts.box_length);
  for (int i = 0; i < m.nx; ++i) m.xs.push_back(-0.5 * opts.box_length + i * m.dx);
  for (int j = 0; j < m.ny; ++j) m.ys.push_back(yg.coord(j));

  // -d^2/dy^2 + eps^-2 V(y/eps) with the same three-point stencil.
  m.ty = Eigen::MatrixXd::Zero(m.ny, m.ny);
  const double c = 1.0 / (m.dy * m.dy);
  for (int j = 0; j < m.ny; ++j) {
    const double yu[1] = {m.ys[j] / eps};
    m.ty(j, j) = 2.0 * c + confinement(yu) / (eps * eps);
    if (j > 0) m.ty(j, j - 1) = m.ty(j - 1, j) = -c;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.ty);
  m.ty_eval = es.eigenvalues();
  m.ty_evec = es.eigenvectors();
  Eigen::VectorXd chi = m.ty_evec.col(0);
  Eigen::Index imax = 0;
  chi.cwiseAbs().maxCoeff(&imax);
  if (chi(imax) < 0) chi = -chi;

  m.pair_w.assign(static_cast<std::size_t>(m.r) * m.r, 0.0);
  for (int i1 = 0; i1 < m.nx; ++i1)
    for (int i2 = 0; i2 < m.nx; ++i2) {
      int dj = ((i1 - i2) % m.nx + m.nx) % m.nx;
      if (dj >= m.nx / 2) dj -= m.nx;
      const double s = dj * m.dx;
      for (int j1 = 0; j1 < m.ny; ++j1)
        for (int j2 = 0; j2 < m.ny; ++j2) {
          const double u = (j1 - j2) * m.dy;
          const std::size_t idx = static_cast<std::size_t>(i1 * m.ny + j1) * m.r + i2 * m.ny + j2;
          m.pair_w[idx] = interaction(std::sqrt(s * s + u * u));
        }
    }

  // phi(x, y) in orthonormal grid coordinates.
  Eigen::VectorXcd phi(m.r);
  const double sdx = std::sqrt(m.dx);
  for (int i = 0; i < m.nx; ++i)
    for (int j = 0; j < m.ny; ++j) phi(i * m.ny + j) = sdx * phi0.values[i] * chi(j);
  phi.normalize();
  std::vector<cplx> psi(static_cast<std::size_t>(m.r) * m.r);
  for (int a = 0; a < m.r; ++a)
    for (int b = 0; b < m.r; ++b) psi[static_cast<std::size_t>(a) * m.r + b] = phi(a) * phi(b);

  Result res;
  res.nx = m.nx;
  res.ny = m.ny;
  auto coarse = propagate(m, psi, opts.dt, opts.t_final);
  if (!opts.richardson) {
    res.gamma = coarse.gamma;
    res.energy = coarse.energy;
    res.symmetry_error = coarse.sym;
    res.norm_drift = coarse.drift;
    return res;
  }
  auto fine = propagate(m, std::move(psi), 0.5 * opts.dt, opts.t_final);
  res.gamma = (4.0 * fine.gamma - coarse.gamma) / 3.0;
  res.energy = (4.0 * fine.energy - coarse.energy) / 3.0;
  res.symmetry_error = std::max(coarse.sym, fine.sym);
  res.norm_drift = std::max(coarse.drift, fine.drift);
  return res;
}

Eigen::MatrixXcd embed(const manybody::ModeBasis& basis, const Eigen::MatrixXcd& gamma) {
  const auto& yg = basis.rescaled_grid();
  const int ny = yg.n;
  const int nx = basis.momentum_modulus();
  if (nx == 0) throw DomainError("embedding requires a grid-quadrature mode basis");
  const int r = nx * ny;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(r, basis.size());
  const double sdy = std::sqrt(yg.cell());
  const double dx = basis.box_length() / nx;
  for (int a = 0; a < basis.size(); ++a) {
    const double k = basis.wavenumber(a);
    for (int i = 0; i < nx; ++i) {
      const double x = -0.5 * basis.box_length() + i * dx;
      const cplx px = std::polar(1.0 / std::sqrt(double(nx)), k * x);
      for (int j = 0; j < ny; ++j) u(i * ny + j, a) = px * basis.transverse_modes()(j, basis.label(a).n) * sdy;
    }
  }
  return u * gamma * u.adjoint();
}

}  // namespace dimred::grid_oracle

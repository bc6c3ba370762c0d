#include "dimred/nls.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dimred/errors.hpp"
#include "dimred/fft.hpp"

namespace dimred::nls {

namespace {

// Fourier coefficients c_k = (1/M) sum_j Phi_j e^{-i k x_j}, up to the
// seam phase which drops out of every |c_k|.
std::vector<cplx> coefficients(const CondensateState& s) {
  Fft1d fft(s.grid.points);
  std::copy(s.values.begin(), s.values.end(), fft.data());
  fft.forward();
  std::vector<cplx> c(fft.data(), fft.data() + s.grid.points);
  const double inv = 1.0 / s.grid.points;
  for (auto& v : c) v *= inv;
  return c;
}

void normalize(std::vector<cplx>& v, double dx) {
  double m = 0.0;
  for (const auto& z : v) m += std::norm(z);
  const double f = 1.0 / std::sqrt(m * dx);
  for (auto& z : v) z *= f;
}

}  // namespace

PeriodicGrid PeriodicGrid::make(double length, int points) {
  if (!(length > 0.0)) throw DomainError("box length must be positive");
  if (points < 4 || points % 2 != 0) throw DomainError("grid points must be even and >= 4");
  return PeriodicGrid{length, points};
}

CondensateState CondensateState::from_function(const PeriodicGrid& grid,
                                               const std::function<cplx(double)>& f) {
  CondensateState s;
  s.grid = grid;
  s.values.resize(static_cast<std::size_t>(grid.points));
  for (int j = 0; j < grid.points; ++j) s.values[j] = f(grid.x(j));
  normalize(s.values, grid.dx());
  return s;
}

CondensateState CondensateState::plane_wave(const PeriodicGrid& grid, int m) {
  const double k = 2.0 * std::numbers::pi * m / grid.length;
  CondensateState s;
  s.grid = grid;
  s.values.resize(static_cast<std::size_t>(grid.points));
  const double a = 1.0 / std::sqrt(grid.length);
  for (int j = 0; j < grid.points; ++j) s.values[j] = a * std::polar(1.0, k * grid.x(j));
  return s;
}

CondensateState CondensateState::gaussian(const PeriodicGrid& grid, double x0, double width, double k0) {
  return from_function(grid, [=](double x) {
    const double u = (x - x0) / width;
    return std::exp(-0.5 * u * u) * std::polar(1.0, k0 * x);
  });
}

double CondensateState::mass() const {
  double m = 0.0;
  for (const auto& z : values) m += std::norm(z);
  return m * grid.dx();
}

NormReport norm_report(const CondensateState& state) {
  const auto c = coefficients(state);
  const auto k = wavenumbers(state.grid.points, state.grid.length);
  double k2 = 0.0;
  double k4 = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double p = std::norm(c[i]);
    k2 += k[i] * k[i] * p;
    k4 += k[i] * k[i] * k[i] * k[i] * p;
  }
  NormReport r;
  const double l2sq = state.mass();
  r.l2 = std::sqrt(l2sq);
  r.h1 = std::sqrt(l2sq + state.grid.length * k2);
  r.h2 = std::sqrt(l2sq + state.grid.length * (k2 + k4));
  for (const auto& z : state.values) r.sup = std::max(r.sup, std::abs(z));
  return r;
}

double effective_energy(const CondensateState& state, const potentials::ExternalPotential& external,
                        double b, double t) {
  const auto c = coefficients(state);
  const auto k = wavenumbers(state.grid.points, state.grid.length);
  double kin = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) kin += k[i] * k[i] * std::norm(c[i]);
  kin *= state.grid.length;
  double pot = 0.0;
  const bool has_v = !external.is_zero();
  for (int j = 0; j < state.grid.points; ++j) {
    const double rho = std::norm(state.values[j]);
    const double v = has_v ? external.on_axis(t, state.grid.x(j)) : 0.0;
    pot += (v + 0.5 * b * rho) * rho;
  }
  return kin + pot * state.grid.dx();
}

double spectral_tail(const CondensateState& state) {
  const auto c = coefficients(state);
  const auto k = wavenumbers(state.grid.points, state.grid.length);
  const double cut = (2.0 / 3.0) * std::numbers::pi * state.grid.points / state.grid.length;
  double hi = 0.0;
  double tot = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double p = std::norm(c[i]);
    tot += p;
    if (std::abs(k[i]) > cut) hi += p;
  }
  return tot > 0.0 ? std::sqrt(hi / tot) : 0.0;
}

double seam_value(const CondensateState& state) { return std::abs(state.values.front()); }

Trajectory evolve(const CondensateState& initial, const potentials::ExternalPotential& external,
                  double b, const EvolveOptions& opts) {
  if (!(opts.dt > 0.0)) throw DomainError("dt must be positive");
  if (!(opts.t_final >= 0.0)) throw DomainError("t_final must be non-negative");
  if (b < 0.0) throw DomainError("coupling b must be non-negative (defocusing)");
  const double tail0 = spectral_tail(initial);
  if (tail0 > opts.initial_tail_tol) {
    throw ResolutionError("initial state under-resolved: spectral tail " + std::to_string(tail0));
  }
  const int m = initial.grid.points;
  const auto k = wavenumbers(m, initial.grid.length);
  const long nsteps = std::lround(opts.t_final / opts.dt);
  const double dt = nsteps > 0 ? opts.t_final / nsteps : 0.0;

  std::vector<cplx> kinetic(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) kinetic[i] = std::polar(1.0 / m, -k[i] * k[i] * dt);
  std::vector<double> xs(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) xs[j] = initial.grid.x(j);
  const bool has_v = !external.is_zero();
  const bool td = external.time_dependent();
  std::vector<double> v(static_cast<std::size_t>(m), 0.0);
  auto sample_v = [&](double t) {
    if (!has_v) return;
    for (int j = 0; j < m; ++j) v[j] = external.on_axis(t, xs[j]);
  };
  sample_v(initial.time);

  Fft1d fft(m);
  cplx* u = fft.data();
  std::copy(initial.values.begin(), initial.values.end(), u);

  Trajectory traj;
  CondensateState cur = initial;
  auto record = [&](double t) {
    cur.values.assign(u, u + m);
    cur.time = t;
    traj.rows.push_back({t, norm_report(cur), effective_energy(cur, external, b, t)});
    traj.max_seam = std::max(traj.max_seam, seam_value(cur));
    if (opts.keep_states) traj.states.push_back(cur);
  };
  record(initial.time);

  auto phase = [&](double h) {
    for (int j = 0; j < m; ++j) {
      const double w = v[j] + b * std::norm(u[j]);
      u[j] *= std::polar(1.0, -w * h);
    }
  };

  const double cut = (2.0 / 3.0) * std::numbers::pi * m / initial.grid.length;
  for (long s = 0; s < nsteps; ++s) {
    const double t0 = initial.time + s * dt;
    if (td) sample_v(t0 + 0.5 * dt);
    phase(0.5 * dt);
    fft.forward();
    double hi = 0.0;
    double tot = 0.0;
    for (int i = 0; i < m; ++i) {
      const double p = std::norm(u[i]);
      tot += p;
      if (std::abs(k[i]) > cut) hi += p;
      u[i] *= kinetic[i];
    }
    if (!std::isfinite(tot)) {
      throw InstabilityError("NLS solution became non-finite at step " + std::to_string(s + 1));
    }
    if (std::sqrt(hi / tot) > opts.blowup_tail_tol) {
      throw ResolutionError("spectral tail exceeded " + std::to_string(opts.blowup_tail_tol) +
                            " at step " + std::to_string(s + 1) + "; refine the grid");
    }
    fft.backward();
    phase(0.5 * dt);
    ++traj.steps;
    const bool last = s + 1 == nsteps;
    if (last || (opts.record_every > 0 && (s + 1) % opts.record_every == 0)) {
      record(initial.time + (s + 1) * dt);
    }
  }
  cur.values.assign(u, u + m);
  cur.time = initial.time + nsteps * dt;
  traj.final_state = cur;
  return traj;
}

EnvelopeInputs EnvelopeInputs::from_potential(const potentials::ExternalPotential& external,
                                              double e_psi0, double e_phi0, double t) {
  EnvelopeInputs in;
  in.e_psi0 = std::abs(e_psi0);
  in.e_phi0 = std::abs(e_phi0);
  in.vpar_dot_l1_in_time = std::abs(t) * external.time_derivative_sup();
  in.vpar_mixed_sup = external.mixed_sup();
  return in;
}

double envelope(const EnvelopeInputs& in) {
  if (in.e_psi0 < 0.0 || in.e_phi0 < 0.0 || in.vpar_dot_l1_in_time < 0.0 || in.vpar_mixed_sup < 0.0) {
    throw DomainError("envelope inputs must be non-negative");
  }
  return std::sqrt(1.0 + in.e_psi0 + in.e_phi0 + in.vpar_dot_l1_in_time + in.vpar_mixed_sup);
}

double distance(const CondensateState& a, const CondensateState& b) {
  if (a.grid.points != b.grid.points) throw DomainError("states live on different grids");
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += std::norm(a.values[i] - b.values[i]);
  return std::sqrt(s * a.grid.dx());
}

}  // namespace dimred::nls

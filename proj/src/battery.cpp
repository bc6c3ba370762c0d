#include "dimred/battery.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>

#include "dimred/auxiliary.hpp"
#include "dimred/errors.hpp"
#include "dimred/grid_oracle.hpp"
#include "dimred/manybody.hpp"
#include "dimred/nls.hpp"
#include "dimred/transverse.hpp"

namespace dimred::battery {

namespace {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

Eigen::VectorXcd unit_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

double residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return a.size() == 0 ? 0.0 : (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

ProjectorAlgebra projector_algebra(std::uint64_t seed, int systems, int max_n, int max_d, std::size_t cap) {
  namespace dn = projectors::dense;
  std::mt19937_64 rng(seed);
  ProjectorAlgebra r;
  r.systems = systems;
  for (int trial = 0; trial < systems; ++trial) {
    int n = 0, dphi = 0, dchi = 0;
    for (;;) {
      n = std::uniform_int_distribution<int>(1, max_n)(rng);
      dphi = std::uniform_int_distribution<int>(1, 4)(rng);
      dchi = std::uniform_int_distribution<int>(1, std::max(1, max_d / dphi))(rng);
      const int d = dphi * dchi;
      if (d < 2 || d > max_d || std::pow(double(d), n) > double(cap)) continue;
      break;
    }
    const int d = dphi * dchi;
    r.max_particles = std::max(r.max_particles, n);
    r.max_dim = std::max(r.max_dim, d);
    auto proj = projectors::CondensateProjector::from_factors(unit_vector(rng, dphi), unit_vector(rng, dchi));
    auto space = dn::TensorSpace::make(n, d, cap);
    Eigen::VectorXcd psi = dn::symmetrize(space, unit_vector(rng, space.dim()));
    psi /= psi.norm();

    const Eigen::MatrixXcd id1 = Eigen::MatrixXcd::Identity(d, d);
    const Eigen::MatrixXcd p = proj.p();
    const Eigen::MatrixXcd& pf = proj.p_phi;
    const Eigen::MatrixXcd& pc = proj.p_chi;
    double fr = 0.0;
    fr = std::max(fr, residual(p, pf * pc));
    fr = std::max(fr, residual(pf * p, p));
    fr = std::max(fr, residual(pc * p, p));
    fr = std::max(fr, residual((id1 - pc) * p, Eigen::MatrixXcd::Zero(d, d)));
    fr = std::max(fr, residual(id1 - p, (id1 - pc) + (id1 - pf) * pc));
    fr = std::max(fr, residual(id1 - p, (id1 - pf) + pf * (id1 - pc)));
    r.factor_residual = std::max(r.factor_residual, fr);

    const auto dim = space.dim();
    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd qsum = Eigen::MatrixXcd::Zero(dim, dim);
    for (int j = 0; j < n; ++j) qsum += dn::site(space, j, id1 - p);
    double cr = 0.0;
    for (int k = 0; k <= n; ++k) {
      const Eigen::MatrixXcd pk = dn::counting(space, p, k);
      sum += pk;
      cr = std::max(cr, residual(qsum * pk, double(k) * pk));
      cr = std::max(cr, residual(pk * pk, pk));
    }
    cr = std::max(cr, residual(sum, Eigen::MatrixXcd::Identity(dim, dim)));
    r.counting_residual = std::max(r.counting_residual, cr);

    const auto n2 = dn::weighted(space, p, projectors::WeightFunction::n_squared(n));
    r.fqq_residual = std::max(r.fqq_residual, residual(n2, qsum / double(n)));

    const auto dist = dn::counting_distribution(space, psi, p);
    const double q1 = (dn::site(space, 0, id1 - p) * psi).squaredNorm();
    r.alpha_residual = std::max(r.alpha_residual,
                                std::abs(projectors::alpha(dist, projectors::WeightFunction::n_squared(n)) - q1));
    r.alpha_residual = std::max(r.alpha_residual, std::abs(dist.total() - 1.0));
    for (double x : dist.probs) r.min_probability = std::min(r.min_probability, x);
  }
  return r;
}

BridgeSurvey rate_bridge_survey(std::uint64_t seed, int states, int max_n, int max_modes) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  BridgeSurvey s;
  s.states = states;
  for (int i = 0; i < states; ++i) {
    const int n = std::uniform_int_distribution<int>(1, max_n)(rng);
    const int m = std::uniform_int_distribution<int>(2, max_modes)(rng);
    auto space = manybody::FockSpace::full(n, m);
    const int fav = std::uniform_int_distribution<int>(0, m - 1)(rng);
    // bias toward the favoured mode spreads alpha over its whole range
    const double bias = 4.0 * u(rng);
    manybody::State psi(static_cast<Eigen::Index>(space.dim()));
    for (std::size_t a = 0; a < space.dim(); ++a) {
      psi(static_cast<Eigen::Index>(a)) = std::exp(bias * space.occupations(a)[fav]) * cplx(g(rng), g(rng));
    }
    psi /= psi.norm();
    projectors::CondensateProjector proj;
    if (i % 2 == 0) {
      proj = projectors::CondensateProjector::from_mode(m, fav);
    } else {
      Eigen::VectorXcd v = 0.4 * unit_vector(rng, m);
      v(fav) += 1.0;
      proj = projectors::CondensateProjector::from_vector(v / v.norm());
    }
    if (projectors::counting_distribution(space, psi, proj).source == "factorial-moment") ++s.factorial_path;
    const auto rb = projectors::rate_bridge(space, psi, proj);
    if (!rb.holds) ++s.violations;
    if (rb.trace_distance > 0.0) s.max_lower_ratio = std::max(s.max_lower_ratio, rb.alpha_n2 / rb.trace_distance);
    if (rb.upper > 0.0) s.max_upper_ratio = std::max(s.max_upper_ratio, rb.trace_distance / rb.upper);
  }
  return s;
}

WeightSurvey weight_survey(const std::vector<int>& ns, const std::vector<double>& xis) {
  WeightSurvey w;
  w.all_l_ok = true;
  for (int n : ns) {
    for (double xi : xis) {
      auto r = projectors::weight_norm_checks(n, xi);
      w.all_l_ok = w.all_l_ok && r.l_ok;
      w.max_ln_norm = std::max(w.max_ln_norm, r.ln_norm);
      w.reports.push_back(r);
    }
  }
  return w;
}

TransverseAnalytics transverse_analytics(double spacing_1d, double spacing_2d) {
  TransverseAnalytics t;
  auto m1 = transverse::solve_ground(potentials::ConfinementPotential::harmonic(1),
                                     transverse::Grid::with_spacing(1, 8.0, spacing_1d));
  t.e0_1d = m1.energy0;
  t.gap_1d = m1.gap;
  t.quartic_1d = m1.quartic;
  t.spacing_1d = m1.grid.spacing;
  auto m2 = transverse::solve_ground(potentials::ConfinementPotential::harmonic(2),
                                     transverse::Grid::with_spacing(2, 6.5, spacing_2d));
  t.e0_2d = m2.energy0;
  t.quartic_2d = m2.quartic;
  t.spacing_2d = m2.grid.spacing;
  return t;
}

NlsBattery nls_battery() {
  NlsBattery r;
  {
    auto g = nls::PeriodicGrid::make(2.0 * pi, 64);
    auto s = nls::CondensateState::from_function(g, [](double x) { return cplx(1.0 + 0.1 * std::cos(x), 0.0); });
    auto v = potentials::ExternalPotential::cosine(0.2, 1.0);
    auto tr = nls::evolve(s, v, 1.0, {.dt = 1e-3, .t_final = 1.0, .record_every = 100});
    const double e0 = tr.rows.front().energy;
    for (const auto& row : tr.rows) {
      r.mass_drift = std::max(r.mass_drift, std::abs(row.norms.l2 - 1.0));
      r.energy_drift = std::max(r.energy_drift, std::abs(row.energy - e0));
    }
  }
  {
    auto g = nls::PeriodicGrid::make(2.0 * pi, 64);
    const int m = 3;
    const double b = 2.5;
    auto s = nls::CondensateState::plane_wave(g, m);
    auto tr = nls::evolve(s, potentials::ExternalPotential::zero(), b, {.dt = 1e-3, .t_final = 1.0});
    const cplx rot = std::polar(1.0, -(m * m + b / g.length));
    for (std::size_t j = 0; j < s.values.size(); ++j) {
      r.phase_error = std::max(r.phase_error,
                               std::abs(tr.final_state.values[j] - s.values[j] * rot) / std::abs(s.values[j]));
    }
  }
  {
    auto g = nls::PeriodicGrid::make(30.0, 256);
    auto s = nls::CondensateState::gaussian(g, 0.0, 2.0, 0.5);
    auto v = potentials::ExternalPotential::cosine(1.0, 0.4, 0.5, 3.0);
    auto run = [&](double dt) { return nls::evolve(s, v, 4.0, {.dt = dt, .t_final = 1.0}).final_state; };
    auto p1 = run(0.02);
    auto p2 = run(0.01);
    auto p3 = run(0.005);
    r.strang_order = std::log2(nls::distance(p1, p2) / nls::distance(p2, p3));
  }
  return r;
}

AuxBattery aux_battery(const AuxSetup& setup) {
  using namespace auxiliary;
  AuxBattery r;
  const auto point = scaling::ScalingPoint::make(setup.n_particles, setup.epsilon, setup.beta);
  const double mu = point.mu();
  const double eps = point.epsilon();
  if (!(mu < eps)) throw DomainError("auxiliary battery needs mu < eps (mu = " + std::to_string(mu) + ")");

  // uniform ball: piecewise closed form
  {
    auto w = potentials::scale(potentials::InteractionProfile::uniform_ball(3), point);
    const double c = w.amplitude();
    auto h = build_h_epsilon(w, setup.samples);
    const double scale = std::abs(h.values.front());
    for (std::size_t i = 0; i < h.radii.size(); ++i) {
      const double rr = h.radii[i];
      const double exact = rr <= mu ? c * (rr * rr / 6 - mu * mu / 2 + mu * mu * mu / (3 * eps))
                                    : c * mu * mu * mu / 3 * (1.0 / eps - 1.0 / rr);
      r.h_oracle_error = std::max(r.h_oracle_error, std::abs(h.values[i] - exact) / scale);
    }
    r.boundary_max = std::max(r.boundary_max, std::abs(h.values.back()));
  }
  // Poisson residual convergence on a smooth profile
  {
    auto w = potentials::scale(potentials::InteractionProfile::smooth_bump(3), point);
    r.poisson_coarse = verify_poisson(build_h_epsilon(w, setup.samples), w).max_residual;
    r.poisson_fine = verify_poisson(build_h_epsilon(w, 2 * setup.samples), w).max_residual;
    r.poisson_order = std::log2(r.poisson_coarse / r.poisson_fine);
  }
  // Theta
  {
    auto t = theta(mu, eps, 801);
    r.theta_midpoint = t.midpoint_value;
    r.boundary_max = std::max({r.boundary_max, std::abs(t.theta.values.back()), std::abs(1.0 - t.theta.values.front()),
                               std::abs(1.0 - smooth_step(mu, mu, eps))});
    r.theta_grad_eps = theta(1e-3, 1e-1, 801).grad_sup_times_eps;
  }
  // h-bar for an indicator w-bar = c 1_{|x| <= a}
  {
    const double cbar = 0.7, a = 0.05;
    LineFunction ind;
    ind.xs = {-a, a};
    ind.values = {cbar, cbar};
    ind.half_width = a;
    auto hb = build_h_bar(ind, 0.2, 100, 0.01);
    r.hbar_slope_error = std::abs(hb.dh.values.back() - cbar * a) / (cbar * a);
    r.hbar_slope_error = std::max(r.hbar_slope_error, std::abs(hb.grad_sup - cbar * a) / (cbar * a));
    r.boundary_max = std::max({r.boundary_max, hb.boundary_max, std::abs(hb.theta_bar.values.back()),
                               std::abs(hb.theta_bar.values.front())});

    // second-difference residual against a smooth w-bar
    LineFunction smooth;
    const int ns = 8001;
    smooth.half_width = 0.2;
    for (int i = 0; i < ns; ++i) {
      const double x = -0.2 + 0.4 * i / (ns - 1);
      smooth.xs.push_back(x);
      smooth.values.push_back(std::pow(std::cos(0.5 * pi * x / 0.2), 4));
    }
    const double c1 = build_h_bar(smooth, 0.2, 100, 0.01, 201).residual;
    const double c2 = build_h_bar(smooth, 0.2, 100, 0.01, 401).residual;
    r.hbar_order = std::log2(c1 / c2);
  }
  {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 1000; ++k) {
      const double x = u(rng), y = u(rng);
      r.green_asymmetry = std::max(r.green_asymmetry, std::abs(green(x, y, 1.0) - green(y, x, 1.0)));
    }
  }
  {
    std::vector<scaling::ScalingPoint> pts;
    for (std::int64_t n : {100, 400, 1600, 6400}) pts.push_back(scaling::ScalingPoint::make(n, 0.5, 0.4));
    auto f = gradient_scaling_fit(pts, potentials::InteractionProfile::uniform_ball(3));
    r.grad_sup_slope = f.sup_fit.slope;
    r.grad_l2_slope = f.l2_fit.slope;
  }
  {
    auto pt = scaling::ScalingPoint::make(400, 0.5, 0.3);
    auto w = potentials::scale(potentials::InteractionProfile::uniform_ball(2), pt);
    auto mode = transverse::solve_ground(potentials::ConfinementPotential::harmonic(1),
                                         transverse::Grid::make(1, 9.0, 6401));
    auto wb = quasi1d(w, transverse::rescale(mode, pt.epsilon()));
    const double exact = w.amplitude() * std::erf(pt.mu() / (pt.epsilon() * std::sqrt(2.0)));
    r.wbar_oracle_error = std::abs(wb.values[wb.values.size() / 2] - exact) / exact;
  }
  return r;
}

CouplingSurvey coupling_survey(const potentials::InteractionProfile& profile, double quartic, double beta,
                               double gamma, const std::vector<std::int64_t>& ns, const std::vector<double>& etas) {
  CouplingSurvey s;
  const auto seq = scaling::ScalingSequence::power_law(beta, gamma, ns);
  const double limit = profile.l1_norm() * quartic;
  for (const auto& p : seq.points) {
    const double b = potentials::coupling(potentials::scale(profile, p), quartic);
    s.couplings.push_back(b);
    s.spread = std::max(s.spread, std::abs(b - s.couplings.front()));
    s.limit_defect = std::max(s.limit_defect, std::abs(b - limit));
  }
  s.etas = etas;
  for (double eta : etas) {
    bool ok = true;
    for (const auto& p : seq.points) {
      ok = ok && potentials::validate_family(potentials::scale(profile, p), quartic, eta, limit).converging;
    }
    s.condition_d.push_back(ok);
  }
  return s;
}

OracleComparison oracle_comparison(const OracleSetup& st) {
  const auto t0 = std::chrono::steady_clock::now();
  auto p = scaling::ScalingPoint::make(2, st.epsilon, st.beta);
  auto w = potentials::scale(potentials::InteractionProfile::smooth_bump(2), p);
  auto conf = potentials::ConfinementPotential::harmonic(1);
  auto ext = potentials::ExternalPotential::zero();
  auto tg = transverse::Grid::make(1, st.extent, st.ny);
  manybody::BasisOptions o;
  o.mx = st.nx;
  o.my = st.my;
  o.box_length = st.box_length;
  o.transverse_grid = tg;
  o.quadrature = manybody::WQuadrature::grid;
  o.x_points = st.nx;
  auto basis = manybody::ModeBasis::build(p, conf, ext, w, o);
  auto space = manybody::FockSpace::build(basis, 2, manybody::Sector{{-2, -1, 0, 1, 2}, st.nx, 1}, 2000000);
  auto h = manybody::Hamiltonian::build(basis, space);
  auto g = nls::PeriodicGrid::make(st.box_length, st.nx);
  const double len = st.box_length;
  auto phi = nls::CondensateState::from_function(g, [&](double x) { return cplx(1.0 + 0.5 * std::cos(2 * pi * x / len)); });
  auto psi = manybody::product_state(space, manybody::condensate_coefficients(basis, phi));
  // static Hamiltonian: a single Krylov-controlled step covers [0, T]
  manybody::EvolveOptions eo;
  eo.dt = st.t_final;
  eo.t_final = st.t_final;
  auto tr = manybody::evolve(basis, space, psi, eo, &h);
  auto em = grid_oracle::embed(basis, manybody::reduced_density_1(space, tr.final_state));
  auto e0 = grid_oracle::embed(basis, manybody::reduced_density_1(space, psi));
  grid_oracle::Options go;
  go.nx = st.nx;
  go.box_length = st.box_length;
  go.transverse_grid = tg;
  go.dt = st.oracle_dt;
  go.t_final = st.t_final;
  auto r = grid_oracle::run(p, conf, ext, w, phi, go);
  OracleComparison c;
  c.trace_distance = manybody::trace_norm(em - r.gamma);
  c.change = manybody::trace_norm(em - e0);
  c.dim = space.dim();
  c.symmetry_error = r.symmetry_error;
  c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return c;
}

}  // namespace dimred::battery

#include "dimred/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "dimred/battery.hpp"
#include "dimred/errors.hpp"
#include "dimred/projectors.hpp"
#include "dimred/transverse.hpp"

namespace dimred::harness {

namespace {

double now_seconds(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::pair<std::int64_t, double>> parse_points(const std::string& key, const std::string& text) {
  std::vector<std::pair<std::int64_t, double>> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    std::string item = text.substr(pos, end - pos);
    pos = end + 1;
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("key '" + key + "': expected N:eps, got '" + item + "'");
    std::int64_t n = 0;
    double eps = 0.0;
    const char* a = item.data();
    const char* c = a + colon;
    const char* e = a + item.size();
    auto r1 = std::from_chars(a, c, n);
    auto r2 = std::from_chars(c + 1, e, eps);
    if (r1.ec != std::errc() || r1.ptr != c || r2.ec != std::errc() || r2.ptr != e) {
      throw ConfigError("key '" + key + "': cannot parse '" + item + "'");
    }
    out.emplace_back(n, eps);
  }
  return out;
}

template <class F>
auto as_config_error(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::known_keys() {
  static const std::vector<std::string> keys = {
      "beta", "gamma", "ns", "points",
      "profile", "profile_height", "profile_width", "profile_file", "d_perp",
      "confinement", "confinement_omega", "confinement_depth", "confinement_width",
      "external", "external_amplitude", "external_wavenumber", "external_modulation", "external_frequency",
      "external_transverse",
      "phi0", "phi0_amplitude", "phi0_mode", "phi0_width", "box_length", "nls_points", "nls_dt",
      "mx", "my", "sector_momenta", "sector_parity", "points_per_range", "transverse_extent", "quadrature",
      "x_points", "cap", "krylov_tol",
      "dt", "t_final", "checkpoints",
      "xi", "beta1", "eta",
      "gamma_discrepancy", "assert_monotone", "out_dir", "seed", "inject_fault",
      "aux_n", "aux_epsilon", "aux_beta", "aux_samples",
      "transverse_points", "transverse_modes", "dump_samples",
      "nls_b", "dump_states", "state_file", "alpha_projector", "alpha_mode", "alpha_time",
      "verify_modules",
  };
  return keys;
}

ExperimentConfig ExperimentConfig::from(const config::Config& c) {
  c.require_known(known_keys());
  ExperimentConfig e;
  e.raw = c;
  // where results go is not part of the experiment
  {
    std::string text;
    for (const auto& [k, v] : c.entries())
      if (k != "out_dir") text += k + " = " + v + "\n";
    e.hash = config::Config::parse(text).hash();
  }

  e.beta = c.get_double("beta", e.beta);
  if (c.has("gamma")) e.gamma = c.get_double("gamma");
  e.ns = c.get_ints("ns", {});
  if (c.has("points")) e.points = parse_points("points", c.get_string("points"));
  if (e.gamma && !e.points.empty()) throw ConfigError("give either gamma (with ns) or points, not both");
  if (e.gamma && e.ns.empty()) throw ConfigError("gamma needs an ns list");
  if (!e.gamma && !e.ns.empty()) throw ConfigError("ns needs gamma");

  e.profile = c.get_string("profile", e.profile);
  e.profile_height = c.get_double("profile_height", e.profile_height);
  e.profile_width = c.get_double("profile_width", e.profile_width);
  e.profile_file = c.get_string("profile_file", e.profile_file);
  e.d_perp = static_cast<int>(c.get_int("d_perp", e.d_perp));
  if (e.d_perp != 1 && e.d_perp != 2) throw ConfigError("d_perp must be 1 or 2");

  e.confinement = c.get_string("confinement", e.confinement);
  e.confinement_omega = c.get_double("confinement_omega", e.confinement_omega);
  e.confinement_depth = c.get_double("confinement_depth", e.confinement_depth);
  e.confinement_width = c.get_double("confinement_width", e.confinement_width);

  e.external = c.get_string("external", e.external);
  e.external_amplitude = c.get_double("external_amplitude", e.external_amplitude);
  e.external_wavenumber = c.get_double("external_wavenumber", e.external_wavenumber);
  e.external_modulation = c.get_double("external_modulation", e.external_modulation);
  e.external_frequency = c.get_double("external_frequency", e.external_frequency);
  e.external_transverse = c.get_double("external_transverse", e.external_transverse);

  e.phi0 = c.get_string("phi0", e.phi0);
  e.phi0_amplitude = c.get_double("phi0_amplitude", e.phi0_amplitude);
  e.phi0_mode = static_cast<int>(c.get_int("phi0_mode", e.phi0_mode));
  e.phi0_width = c.get_double("phi0_width", e.phi0_width);
  e.box_length = c.get_double("box_length", e.box_length);
  e.nls_points = static_cast<int>(c.get_int("nls_points", e.nls_points));
  e.nls_dt = c.get_double("nls_dt", e.nls_dt);

  e.mx = static_cast<int>(c.get_int("mx", e.mx));
  e.my = static_cast<int>(c.get_int("my", e.my));
  for (auto m : c.get_ints("sector_momenta", {})) e.sector_momenta.push_back(static_cast<int>(m));
  e.sector_parity = static_cast<int>(c.get_int("sector_parity", e.sector_parity));
  if (e.sector_parity < -1 || e.sector_parity > 1) throw ConfigError("sector_parity must be -1, 0 or 1");
  e.points_per_range = c.get_double("points_per_range", e.points_per_range);
  e.transverse_extent = c.get_double("transverse_extent", e.transverse_extent);
  e.quadrature = c.get_string("quadrature", e.quadrature);
  if (e.quadrature != "panels" && e.quadrature != "grid") throw ConfigError("quadrature must be panels or grid");
  e.x_points = static_cast<int>(c.get_int("x_points", e.x_points));
  const auto cap = c.get_int("cap", static_cast<std::int64_t>(e.cap));
  if (cap <= 0) throw ConfigError("cap must be positive");
  e.cap = static_cast<std::size_t>(cap);
  e.krylov_tol = c.get_double("krylov_tol", e.krylov_tol);

  e.dt = c.get_double("dt", e.dt);
  e.t_final = c.get_double("t_final", e.t_final);
  e.checkpoints = static_cast<int>(c.get_int("checkpoints", e.checkpoints));
  if (!(e.dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(e.nls_dt > 0.0)) throw ConfigError("nls_dt must be positive");
  if (!(e.t_final >= 0.0)) throw ConfigError("t_final must be nonnegative");
  if (e.checkpoints < 1) throw ConfigError("checkpoints must be at least 1");

  e.xi = c.get_double("xi", e.xi);
  e.beta1 = c.get_double("beta1", e.beta1);
  e.eta = c.get_double("eta", e.eta);

  e.gamma_discrepancy = c.get_bool("gamma_discrepancy", e.gamma_discrepancy);
  e.assert_monotone = c.get_bool("assert_monotone", e.assert_monotone);
  e.out_dir = c.get_string("out_dir", e.out_dir);
  e.seed = static_cast<std::uint64_t>(c.get_int("seed", static_cast<std::int64_t>(e.seed)));
  e.inject_fault = c.get_string("inject_fault", e.inject_fault);
  if (e.inject_fault != "none" && e.inject_fault != "negative_weight") {
    throw ConfigError("inject_fault must be none or negative_weight");
  }

  e.aux_n = c.get_int("aux_n", e.aux_n);
  e.aux_epsilon = c.get_double("aux_epsilon", e.aux_epsilon);
  e.aux_beta = c.get_double("aux_beta", e.aux_beta);
  e.aux_samples = static_cast<int>(c.get_int("aux_samples", e.aux_samples));

  e.transverse_points = static_cast<int>(c.get_int("transverse_points", e.transverse_points));
  e.transverse_modes = static_cast<int>(c.get_int("transverse_modes", e.transverse_modes));
  e.dump_samples = c.get_bool("dump_samples", e.dump_samples);

  if (c.has("nls_b")) e.nls_b = c.get_double("nls_b");
  e.dump_states = c.get_bool("dump_states", e.dump_states);
  e.state_file = c.get_string("state_file", e.state_file);
  e.alpha_projector = c.get_string("alpha_projector", e.alpha_projector);
  if (e.alpha_projector != "condensate" && e.alpha_projector != "mode") {
    throw ConfigError("alpha_projector must be condensate or mode");
  }
  e.alpha_mode = static_cast<int>(c.get_int("alpha_mode", e.alpha_mode));
  e.alpha_time = c.get_double("alpha_time", e.alpha_time);

  static const std::vector<std::string> modules = {"projectors", "bridge",   "weights",  "transverse",
                                                   "nls",        "auxiliary", "coupling", "oracle"};
  e.verify_modules = c.get_strings("verify_modules", {});
  for (const auto& m : e.verify_modules) {
    if (std::find(modules.begin(), modules.end(), m) == modules.end()) {
      throw ConfigError("verify_modules: unknown module '" + m + "'");
    }
  }

  // resolve everything once so that bad names and ranges surface here
  if (e.gamma || !e.points.empty()) as_config_error("scaling sequence", [&] { return e.sequence(); });
  as_config_error("rate inputs", [&] { return e.rate(); });
  as_config_error("interaction profile", [&] { return e.make_profile(); });
  as_config_error("confinement", [&] { return e.make_confinement(); });
  as_config_error("external potential", [&] { return e.make_external(); });
  as_config_error("initial condensate", [&] { return e.make_phi0(); });
  return e;
}

scaling::ScalingSequence ExperimentConfig::sequence() const {
  if (gamma) return scaling::ScalingSequence::power_law(beta, *gamma, ns);
  if (points.empty()) throw ConfigError("no scaling points: set gamma and ns, or points");
  return scaling::ScalingSequence::explicit_points(beta, points);
}

scaling::RateInputs ExperimentConfig::rate() const { return scaling::RateInputs::make(beta, xi, beta1, eta); }

potentials::InteractionProfile ExperimentConfig::make_profile() const {
  const int dim = d_perp + 1;
  if (profile == "uniform_ball") return potentials::InteractionProfile::uniform_ball(dim, profile_height);
  if (profile == "gaussian_bump") return potentials::InteractionProfile::gaussian_bump(dim, profile_height, profile_width);
  if (profile == "smooth_bump") return potentials::InteractionProfile::smooth_bump(dim, profile_height);
  if (profile == "zero") return potentials::InteractionProfile::zero(dim);
  if (profile == "csv") {
    if (profile_file.empty()) throw ConfigError("profile = csv needs profile_file");
    return potentials::InteractionProfile::from_csv(profile_file, dim);
  }
  throw ConfigError("unknown profile '" + profile + "'");
}

potentials::ConfinementPotential ExperimentConfig::make_confinement() const {
  if (confinement == "harmonic") return potentials::ConfinementPotential::harmonic(d_perp, confinement_omega);
  if (confinement == "gaussian_well") {
    return potentials::ConfinementPotential::gaussian_well(d_perp, confinement_depth, confinement_width);
  }
  throw ConfigError("unknown confinement '" + confinement + "'");
}

potentials::ExternalPotential ExperimentConfig::make_external() const {
  if (external == "zero") return potentials::ExternalPotential::zero();
  if (external == "cosine") {
    return potentials::ExternalPotential::cosine(external_amplitude, external_wavenumber, external_modulation,
                                                 external_frequency, external_transverse);
  }
  throw ConfigError("unknown external potential '" + external + "'");
}

nls::CondensateState ExperimentConfig::make_phi0() const {
  const auto g = nls::PeriodicGrid::make(box_length, nls_points);
  const double k = 2.0 * std::numbers::pi * phi0_mode / box_length;
  if (phi0 == "constant") return nls::CondensateState::from_function(g, [](double) { return nls::cplx(1.0); });
  if (phi0 == "cosine") {
    const double a = phi0_amplitude;
    return nls::CondensateState::from_function(g, [a, k](double x) { return nls::cplx(1.0 + a * std::cos(k * x)); });
  }
  if (phi0 == "plane_wave") return nls::CondensateState::plane_wave(g, phi0_mode);
  if (phi0 == "gaussian") return nls::CondensateState::gaussian(g, 0.0, phi0_width, k);
  throw ConfigError("unknown phi0 '" + phi0 + "'");
}

manybody::BasisOptions ExperimentConfig::basis_options(const scaling::ScalingPoint& point) const {
  manybody::BasisOptions o;
  o.mx = mx;
  o.my = my;
  o.box_length = box_length;
  o.min_points_per_range = static_cast<int>(std::ceil(points_per_range));
  // unscaled transverse grid fine enough to resolve the range mu/eps of the
  // interaction after the eps dilation
  const double support = make_profile().support_radius();
  const double h = point.mu() * support / (point.epsilon() * points_per_range);
  const double n_axis = 2.0 * transverse_extent / h;
  const double limit = d_perp == 1 ? 2.0e5 : 1500.0;
  if (n_axis > limit) {
    throw SizeError("transverse grid would need " + std::to_string(static_cast<long>(n_axis)) +
                    " points per axis to resolve mu/eps = " + std::to_string(point.mu_over_epsilon()));
  }
  o.transverse_grid = transverse::Grid::with_spacing(d_perp, transverse_extent, h);
  if (quadrature == "grid") {
    o.quadrature = manybody::WQuadrature::grid;
    o.x_points = x_points > 0 ? x_points : mx;
  } else {
    o.x_points = x_points;
  }
  return o;
}

manybody::Sector ExperimentConfig::sector() const { return manybody::Sector{sector_momenta, 0, sector_parity}; }

// ------------------------------------------------------------------ rows

std::vector<std::string> SweepRow::columns() {
  return {"n",     "epsilon",         "mu",       "t",        "trace_distance", "alpha_m",
          "alpha_xi", "energy_gap",   "rate",     "excited_fraction", "envelope", "excited_ratio",
          "alpha_n2", "bridge_holds", "dim"};
}

std::vector<double> SweepRow::values() const {
  return {static_cast<double>(n), epsilon, mu, t, trace_distance, alpha_m, alpha_xi, energy_gap, rate,
          excited_fraction, envelope, excited_ratio, alpha_n2, bridge_holds ? 1.0 : 0.0, static_cast<double>(dim)};
}

// ----------------------------------------------------------------- sweep

namespace {

struct PointOutcome {
  std::vector<SweepRow> rows;
  std::optional<GammaRow> gamma;
  std::optional<std::string> gamma_error;
};

PointOutcome run_point(const ExperimentConfig& cfg, const scaling::ScalingPoint& p, bool verbose) {
  PointOutcome out;
  const auto t_start = std::chrono::steady_clock::now();
  const auto profile = cfg.make_profile();
  const auto conf = cfg.make_confinement();
  const auto ext = cfg.make_external();
  const auto w = potentials::scale(profile, p);
  const auto opts = cfg.basis_options(p);
  const auto basis = manybody::ModeBasis::build(p, conf, ext, w, opts);
  auto sec = cfg.sector();
  sec.modulus = basis.momentum_modulus();
  const int n = static_cast<int>(p.n_particles());
  const auto space = manybody::FockSpace::build(basis, n, sec, cfg.cap);

  const auto mode = transverse::solve_ground(conf, opts.transverse_grid);
  const double b = potentials::coupling(w, mode.quartic);

  // checkpoint spacing shared by both evolutions
  const double interval = cfg.t_final / cfg.checkpoints;
  const long mb_steps = std::max(1L, static_cast<long>(std::ceil(interval / cfg.dt - 1e-9)));
  const long nls_steps = std::max(1L, std::lround(interval / cfg.nls_dt));

  const auto phi0 = cfg.make_phi0();
  nls::EvolveOptions nopt;
  nopt.dt = interval / nls_steps;
  nopt.t_final = cfg.t_final;
  nopt.record_every = static_cast<int>(nls_steps);
  nopt.keep_states = true;
  const auto ntraj = nls::evolve(phi0, ext, b, nopt);

  const auto c0 = manybody::condensate_coefficients(basis, phi0);
  const auto psi0 = manybody::product_state(space, c0);
  manybody::EvolveOptions mopt;
  mopt.dt = interval / mb_steps;
  mopt.t_final = cfg.t_final;
  mopt.record_every = static_cast<int>(mb_steps);
  mopt.krylov.tol = cfg.krylov_tol;
  mopt.cap = cfg.cap;
  std::optional<manybody::Hamiltonian> h;
  if (!basis.time_dependent()) h.emplace(manybody::Hamiltonian::build(basis, space));
  const auto mtraj = manybody::evolve(basis, space, psi0, mopt, h ? &*h : nullptr);

  const std::size_t count = static_cast<std::size_t>(cfg.checkpoints) + 1;
  if (cfg.t_final == 0.0) {
    // both trajectories hold only the initial record
  } else if (mtraj.states.size() != count || ntraj.states.size() != count) {
    throw DomainError("checkpoint alignment failed between the many-body and NLS trajectories");
  }

  const auto rate = scaling::theoretical_rate(p, cfg.rate()).total();
  const auto m_weight = projectors::WeightFunction::m(n, cfg.xi);
  const auto n2_weight = projectors::WeightFunction::n_squared(n);
  double e_psi0 = 0.0, e_phi0 = 0.0;
  for (std::size_t j = 0; j < mtraj.states.size(); ++j) {
    const auto& psi = mtraj.states[j];
    const auto& phi = ntraj.states[j];
    const double t = mtraj.rows[j].t;
    const auto coeff = manybody::condensate_coefficients(basis, phi);
    const auto g1 = manybody::reduced_density_1(space, psi);
    const auto proj = projectors::CondensateProjector::from_basis(basis, phi);
    const auto dist = projectors::counting_distribution(space, psi, proj);

    SweepRow r;
    r.n = p.n_particles();
    r.epsilon = p.epsilon();
    r.mu = p.mu();
    r.t = t;
    r.dim = space.dim();
    r.trace_distance = manybody::trace_distance(g1, coeff);
    r.alpha_m = projectors::alpha(dist, m_weight);
    const double e_psi = mtraj.rows[j].energy / n - basis.ground_energy_scaled();
    const double e_phi = nls::effective_energy(phi, ext, b, t);
    if (j == 0) {
      e_psi0 = std::abs(e_psi);
      e_phi0 = std::abs(e_phi);
    }
    const auto ax = projectors::alpha_xi(dist, e_psi, e_phi, cfg.xi);
    r.alpha_xi = ax.value;
    r.energy_gap = ax.energy_gap;
    r.rate = rate;
    r.excited_fraction = std::sqrt(std::max(0.0, manybody::excited_population(basis, g1)));
    r.envelope = nls::envelope(nls::EnvelopeInputs::from_potential(ext, e_psi0, e_phi0, t));
    r.excited_ratio = r.excited_fraction / transverse::excited_fraction_bound(p.epsilon(), r.envelope);
    r.alpha_n2 = projectors::alpha(dist, n2_weight);
    r.bridge_holds = projectors::rate_bridge(r.alpha_n2, r.trace_distance).holds;
    out.rows.push_back(r);
  }

  if (cfg.gamma_discrepancy && w.profile().l1_norm() != 0.0) {
    try {
      const auto chi = transverse::rescale(mode, p.epsilon());
      const auto rep = auxiliary::discrepancy_gamma(w, ntraj.final_state, chi);
      out.gamma = GammaRow{p.n_particles(), p.epsilon(), p.mu(), p.mu_over_epsilon(), rep.l2};
    } catch (const std::exception& e) {
      out.gamma_error = e.what();
    }
  }
  if (verbose) {
    const auto& last = out.rows.back();
    std::fprintf(stderr, "  N=%lld eps=%.4g dim=%zu trace_distance(T)=%.6e bridge=%s %.1fs\n",
                 static_cast<long long>(p.n_particles()), p.epsilon(), space.dim(), last.trace_distance,
                 last.bridge_holds ? "ok" : "VIOLATED", now_seconds(t_start));
  }
  return out;
}

}  // namespace

SweepResult run_sweep(const ExperimentConfig& cfg, bool verbose) {
  const auto t0 = std::chrono::steady_clock::now();
  SweepResult res;
  const auto seq = cfg.sequence();
  for (const auto& p : seq.points) {
    try {
      auto o = run_point(cfg, p, verbose);
      res.rows.insert(res.rows.end(), o.rows.begin(), o.rows.end());
      if (o.gamma) res.gamma_rows.push_back(*o.gamma);
      if (o.gamma_error) {
        res.failures.push_back({p.n_particles(), p.epsilon(), "discrepancy: " + *o.gamma_error, false});
      }
    } catch (const SizeError& e) {
      res.failures.push_back({p.n_particles(), p.epsilon(), e.what(), true});
    } catch (const std::exception& e) {
      res.failures.push_back({p.n_particles(), p.epsilon(), e.what(), false});
    }
    if (verbose && !res.failures.empty() && res.failures.back().n == p.n_particles() &&
        res.failures.back().epsilon == p.epsilon()) {
      std::fprintf(stderr, "  N=%lld eps=%.4g failed: %s\n", static_cast<long long>(p.n_particles()), p.epsilon(),
                   res.failures.back().error.c_str());
    }
  }
  res.seconds = now_seconds(t0);
  return res;
}

// trace distances below this are round-off of an unmoved product state
constexpr double kZeroDistance = 1e-10;

RateFit fit_rate(const std::vector<SweepRow>& rows) {
  if (rows.empty()) throw InsufficientDataError("no sweep rows to fit");
  double t = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) t = std::max(t, r.t);
  std::vector<double> x, y;
  int at_t = 0;
  for (const auto& r : rows) {
    if (std::abs(r.t - t) > 1e-12) continue;
    ++at_t;
    if (r.trace_distance > kZeroDistance && r.rate > 0.0) {
      x.push_back(std::sqrt(r.rate));
      y.push_back(r.trace_distance);
    }
  }
  if (at_t >= 4 && x.empty()) {
    throw InsufficientDataError(
        "every trace distance is below round-off at t = " + std::to_string(t) +
        ": the state never leaves the condensate (non-interacting run?), so there is no rate to fit");
  }
  if (x.size() < 4) {
    throw InsufficientDataError("rate fit needs at least 4 rows with nonzero trace distance at a common time, got " +
                                std::to_string(x.size()));
  }
  const auto f = fit::loglog(x, y, 4);
  RateFit out;
  out.slope = f.slope;
  out.constant = std::exp(f.intercept);
  out.r_squared = f.r2;
  out.t = t;
  out.rows = f.points;
  return out;
}

Trend trend(const std::vector<SweepRow>& rows) {
  Trend out;
  out.bridge_every_row = !rows.empty();
  out.t = -std::numeric_limits<double>::infinity();
  for (const auto& r : rows) {
    out.t = std::max(out.t, r.t);
    out.bridge_every_row = out.bridge_every_row && r.bridge_holds;
  }
  for (const auto& r : rows) {
    if (std::abs(r.t - out.t) > 1e-12) continue;
    out.ns.push_back(r.n);
    out.distances.push_back(r.trace_distance);
  }
  out.strictly_decreasing = out.distances.size() >= 2;
  for (std::size_t i = 1; i < out.distances.size(); ++i) {
    out.strictly_decreasing = out.strictly_decreasing && out.distances[i] < out.distances[i - 1];
  }
  return out;
}

fit::LineFit fit_gamma(const std::vector<GammaRow>& rows) {
  std::vector<double> x, y;
  for (const auto& r : rows) {
    if (r.gamma_l2 > 0.0) {
      x.push_back(r.mu_over_eps);
      y.push_back(r.gamma_l2);
    }
  }
  if (x.size() < 3) throw InsufficientDataError("discrepancy fit needs at least 3 points");
  return fit::loglog(x, y, 3);
}

// ---------------------------------------------------------------- verify

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::vector<Check> VerificationReport::failures() const {
  std::vector<Check> out;
  for (const auto& c : checks)
    if (!c.passed) out.push_back(c);
  return out;
}

namespace {

class Recorder {
 public:
  Recorder(VerificationReport& r, bool verbose) : rep_(r), verbose_(verbose) {}

  void at_most(const std::string& module, const std::string& name, double measured, double bound,
               std::string detail = "") {
    add({module, name, measured, bound, measured <= bound, std::move(detail)});
  }
  // |measured - target| <= tol; `bound` reports the tolerance
  void near(const std::string& module, const std::string& name, double measured, double target, double tol) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "target %.9g", target);
    add({module, name, measured, tol, std::abs(measured - target) <= tol, buf});
  }
  void flag(const std::string& module, const std::string& name, bool ok, std::string detail) {
    add({module, name, ok ? 1.0 : 0.0, 1.0, ok, std::move(detail)});
  }
  void error(const std::string& module, const std::string& name, const std::string& what) {
    add({module, name, std::numeric_limits<double>::quiet_NaN(), 0.0, false, what});
  }

 private:
  void add(Check c) {
    if (verbose_) {
      std::fprintf(stderr, "  [%s] %-11s %-34s measured=%-13.6g bound=%-10.3g %s\n", c.passed ? "PASS" : "FAIL",
                   c.module.c_str(), c.name.c_str(), c.measured, c.bound, c.detail.c_str());
    }
    rep_.checks.push_back(std::move(c));
  }
  VerificationReport& rep_;
  bool verbose_;
};

double weight_minimum(const projectors::WeightFunction& f) {
  const auto& v = f.values();
  return *std::min_element(v.begin(), v.end());
}

}  // namespace

VerificationReport verify_all(const ExperimentConfig& cfg, bool verbose) {
  VerificationReport rep;
  Recorder rec(rep, verbose);
  auto enabled = [&](const std::string& m) {
    return cfg.verify_modules.empty() ||
           std::find(cfg.verify_modules.begin(), cfg.verify_modules.end(), m) != cfg.verify_modules.end();
  };
  auto guarded = [&](const std::string& module, auto&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      rec.error(module, "battery", e.what());
    }
  };

  if (enabled("projectors")) {
    guarded("projectors", [&] {
      const auto a = battery::projector_algebra(cfg.seed);
      rec.at_most("projectors", "counting identities", a.counting_residual, 1e-10);
      rec.at_most("projectors", "factorisation identities", a.factor_residual, 1e-10);
      rec.at_most("projectors", "n^2 = (1/N) sum q_j", a.fqq_residual, 1e-10);
      rec.at_most("projectors", "alpha_n2 = ||q_1 psi||^2", a.alpha_residual, 1e-10);
    });
  }
  if (enabled("bridge")) {
    guarded("bridge", [&] {
      const auto s = battery::rate_bridge_survey(cfg.seed + 1);
      rec.at_most("bridge", "sandwich violations", s.violations, 0.0,
                  std::to_string(s.states) + " states");
    });
  }
  if (enabled("weights")) {
    guarded("weights", [&] {
      const std::vector<int> ns = {100, 1000, 10000, 100000};
      const std::vector<double> xis = {0.05, 0.1, 0.2};
      const auto s = battery::weight_survey(ns, xis);
      int bad = 0;
      for (const auto& r : s.reports) bad += r.l_ok ? 0 : 1;
      rec.at_most("weights", "||l|| <= N^xi failures", bad, 0.0);
      rec.at_most("weights", "||l n|| bounded", s.max_ln_norm, 4.0);

      // f >= 0 for the weights entering alpha
      double lowest = std::numeric_limits<double>::infinity();
      std::string where;
      auto visit = [&](const projectors::WeightFunction& f, const std::string& label) {
        const double m = weight_minimum(f);
        if (m < lowest) {
          lowest = m;
          where = label;
        }
      };
      for (int n : {100, 1000}) {
        visit(projectors::WeightFunction::n(n), "n N=" + std::to_string(n));
        visit(projectors::WeightFunction::n_squared(n), "n^2 N=" + std::to_string(n));
        for (double xi : xis) {
          visit(projectors::WeightFunction::m(n, xi), "m N=" + std::to_string(n));
          visit(projectors::WeightFunction::l(n, xi), "l N=" + std::to_string(n));
        }
      }
      if (cfg.inject_fault == "negative_weight") {
        // corrupted table checked as raw values; WeightFunction::custom itself refuses it
        auto v = projectors::WeightFunction::m(100, 0.1).values();
        v[v.size() / 2] = -0.25;
        const double m = *std::min_element(v.begin(), v.end());
        if (m < lowest) {
          lowest = m;
          where = "injected table";
        }
      }
      rec.at_most("weights", "weights nonnegative", -lowest, 0.0, "minimum at " + where);
    });
  }
  if (enabled("transverse")) {
    guarded("transverse", [&] {
      const auto t = battery::transverse_analytics();
      rec.near("transverse", "harmonic 1D E0", t.e0_1d, 1.0, 1e-6);
      rec.near("transverse", "harmonic 1D gap", t.gap_1d, 2.0, 1e-6);
      rec.near("transverse", "harmonic 1D quartic", t.quartic_1d, 0.398942, 1e-6);
      rec.near("transverse", "harmonic 2D E0", t.e0_2d, 2.0, 1e-4);
      rec.near("transverse", "harmonic 2D quartic", t.quartic_2d, 0.159155, 1e-4);
    });
  }
  if (enabled("nls")) {
    guarded("nls", [&] {
      const auto s = battery::nls_battery();
      rec.at_most("nls", "mass drift", s.mass_drift, 1e-10);
      rec.at_most("nls", "energy drift", s.energy_drift, 1e-8);
      rec.at_most("nls", "plane-wave phase error", s.phase_error, 1e-8);
      rec.near("nls", "Strang order", s.strang_order, 2.0, 0.1);
    });
  }
  if (enabled("auxiliary")) {
    try {
      const auto a = battery::aux_battery({cfg.aux_n, cfg.aux_epsilon, cfg.aux_beta, cfg.aux_samples});
      rec.at_most("auxiliary", "h_eps vs closed form", a.h_oracle_error, 1e-6);
      rec.near("auxiliary", "Poisson residual order", a.poisson_order, 2.0, 0.2);
      rec.at_most("auxiliary", "boundary values", a.boundary_max, 1e-10);
      rec.near("auxiliary", "Theta midpoint", a.theta_midpoint, 0.5, 0.0);
      rec.at_most("auxiliary", "eps ||grad Theta|| bounded", a.theta_grad_eps, 3.0);
      rec.at_most("auxiliary", "h-bar wing slope", a.hbar_slope_error, 1e-8);
      rec.near("auxiliary", "h-bar order", a.hbar_order, 2.0, 0.2);
      rec.at_most("auxiliary", "Green symmetry", a.green_asymmetry, 1e-12);
      rec.near("auxiliary", "||grad h||_inf slope", a.grad_sup_slope, 1.0, 0.15);
      rec.near("auxiliary", "||grad h||_2 slope", a.grad_l2_slope, 1.0, 0.15);
      rec.at_most("auxiliary", "w-bar vs erf form", a.wbar_oracle_error, 1e-6);
    } catch (const DomainError& e) {
      rec.error("auxiliary", "regime mu < eps", e.what());
    } catch (const std::exception& e) {
      rec.error("auxiliary", "battery", e.what());
    }
  }
  if (enabled("coupling")) {
    guarded("coupling", [&] {
      const double quartic = cfg.d_perp == 1 ? 1.0 / std::sqrt(2.0 * std::numbers::pi) : 1.0 / (2.0 * std::numbers::pi);
      const double gamma = cfg.gamma.value_or(1.0);
      std::vector<std::int64_t> ns = cfg.gamma ? cfg.ns : std::vector<std::int64_t>{2, 3, 4, 5, 6, 7, 8};
      const auto s = battery::coupling_survey(cfg.make_profile(), quartic, cfg.beta, gamma, ns, {0.5, 1.0, 2.0});
      rec.at_most("coupling", "b spread along the family", s.spread, 1e-12);
      rec.at_most("coupling", "b - l1 quartic", s.limit_defect, 1e-12);
      for (std::size_t i = 0; i < s.etas.size(); ++i) {
        char name[48];
        std::snprintf(name, sizeof name, "condition (d) eta=%g", s.etas[i]);
        rec.flag("coupling", name, s.condition_d[i], "");
      }
    });
  }
  if (enabled("oracle")) {
    guarded("oracle", [&] {
      const auto o = battery::oracle_comparison();
      char buf[96];
      std::snprintf(buf, sizeof buf, "dim %zu, change %.3g, %.0fs", o.dim, o.change, o.seconds);
      rec.at_most("oracle", "N=2 grid vs mode space", o.trace_distance, 1e-6, buf);
    });
  }
  return rep;
}

}  // namespace dimred::harness

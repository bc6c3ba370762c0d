// dimred command line: one subcommand per module plus sweep and verify-all.
// Exit codes: 0 ok, 1 assertion failure, 2 configuration error, 3 resource cap.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "dimred/auxiliary.hpp"
#include "dimred/battery.hpp"
#include "dimred/config.hpp"
#include "dimred/errors.hpp"
#include "dimred/harness.hpp"
#include "dimred/io.hpp"
#include "dimred/manybody.hpp"
#include "dimred/nls.hpp"
#include "dimred/projectors.hpp"
#include "dimred/transverse.hpp"

using namespace dimred;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kAssertion = 1;
constexpr int kConfig = 2;
constexpr int kCap = 3;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
};

// Command-line values replace the file's, so the config hash covers them.
config::Config with_override(const config::Config& raw, const std::string& key, const std::string& value,
                             const std::string& origin) {
  std::string text;
  for (const auto& [k, v] : raw.entries())
    if (k != key) text += k + " = " + v + "\n";
  auto out = config::Config::parse(text, origin);
  out.set(key, value);
  return out;
}

harness::ExperimentConfig load(const Common& c) {
  auto raw = config::Config::load(c.config);
  if (!c.out.empty()) raw = with_override(raw, "out_dir", c.out, c.config);
  if (c.seed) raw = with_override(raw, "seed", std::to_string(*c.seed), c.config);
  return harness::ExperimentConfig::from(raw);
}

std::string path_in(const harness::ExperimentConfig& cfg, const std::string& name) {
  io::ensure_directory(cfg.out_dir);
  return cfg.out_dir + "/" + name;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

double first_point_coupling(const harness::ExperimentConfig& cfg, const scaling::ScalingPoint& p) {
  const auto opts = cfg.basis_options(p);
  const auto mode = transverse::solve_ground(cfg.make_confinement(), opts.transverse_grid);
  return potentials::coupling(potentials::scale(cfg.make_profile(), p), mode.quartic);
}

// ------------------------------------------------------------------ transverse

int cmd_transverse(const harness::ExperimentConfig& cfg) {
  const auto conf = cfg.make_confinement();
  const auto grid = transverse::Grid::make(cfg.d_perp, cfg.transverse_extent, cfg.transverse_points);
  const auto mode = transverse::solve_ground(conf, grid);
  const auto spectrum = transverse::solve_modes(conf, grid, cfg.transverse_modes);
  json j;
  j["E0"] = mode.energy0;
  j["gap"] = mode.gap;
  j["quartic"] = mode.quartic;
  j["energies"] = spectrum.energies;
  j["parity"] = spectrum.parity;
  j["boundary_max"] = mode.boundary_max;
  j["spacing"] = grid.spacing;
  j["d_perp"] = cfg.d_perp;
  print_json(j);
  io::write_json(path_in(cfg, "transverse.json"), cfg.hash, j);
  if (cfg.dump_samples) {
    std::vector<std::vector<double>> rows;
    std::vector<std::string> cols;
    if (cfg.d_perp == 1) {
      cols = {"y", "chi"};
      for (int i = 0; i < grid.n; ++i) rows.push_back({grid.coord(i), mode.chi[i]});
    } else {
      cols = {"y1", "y2", "chi"};
      for (int i = 0; i < grid.n; ++i)
        for (int k = 0; k < grid.n; ++k) rows.push_back({grid.coord(i), grid.coord(k), mode.chi[i * grid.n + k]});
    }
    io::write_csv(path_in(cfg, "chi.csv"), cfg.hash, cols, rows);
  }
  return kOk;
}

// ------------------------------------------------------------------ nls-evolve

int cmd_nls(const harness::ExperimentConfig& cfg) {
  const auto ext = cfg.make_external();
  double b = 0.0;
  if (cfg.nls_b) {
    b = *cfg.nls_b;
  } else {
    b = first_point_coupling(cfg, cfg.sequence().points.front());
  }
  nls::EvolveOptions o;
  const long steps = std::max(1L, std::lround(cfg.t_final / cfg.nls_dt));
  o.dt = cfg.t_final > 0.0 ? cfg.t_final / steps : cfg.nls_dt;
  o.t_final = cfg.t_final;
  o.record_every = static_cast<int>(std::max(1L, steps / cfg.checkpoints));
  const auto tr = nls::evolve(cfg.make_phi0(), ext, b, o);
  std::vector<std::vector<double>> rows;
  for (const auto& r : tr.rows) rows.push_back({r.t, r.norms.l2, r.norms.h1, r.norms.h2, r.norms.sup, r.energy});
  io::write_csv(path_in(cfg, "nls.csv"), cfg.hash, {"t", "l2", "h1", "h2", "sup", "energy"}, rows);
  io::write_state(path_in(cfg, "phi_final.bin"), cfg.hash, tr.final_state.values, tr.final_state.grid.length);
  json j;
  j["b"] = b;
  j["steps"] = tr.steps;
  j["mass_drift"] = std::abs(tr.rows.back().norms.l2 - tr.rows.front().norms.l2);
  j["energy_drift"] = std::abs(tr.rows.back().energy - tr.rows.front().energy);
  j["max_seam"] = tr.max_seam;
  print_json(j);
  return kOk;
}

// ------------------------------------------------------------ manybody-evolve

struct Setup {
  scaling::ScalingPoint point;
  manybody::ModeBasis basis;
  manybody::FockSpace space;
  double b;
};

Setup build_setup(const harness::ExperimentConfig& cfg) {
  const auto p = cfg.sequence().points.front();
  const auto w = potentials::scale(cfg.make_profile(), p);
  const auto opts = cfg.basis_options(p);
  auto basis = manybody::ModeBasis::build(p, cfg.make_confinement(), cfg.make_external(), w, opts);
  auto sec = cfg.sector();
  sec.modulus = basis.momentum_modulus();
  auto space = manybody::FockSpace::build(basis, static_cast<int>(p.n_particles()), sec, cfg.cap);
  const auto mode = transverse::solve_ground(cfg.make_confinement(), opts.transverse_grid);
  return {p, std::move(basis), std::move(space), potentials::coupling(w, mode.quartic)};
}

int cmd_manybody(const harness::ExperimentConfig& cfg) {
  auto s = build_setup(cfg);
  const int n = static_cast<int>(s.point.n_particles());
  const auto ext = cfg.make_external();
  const double interval = cfg.t_final / cfg.checkpoints;
  const long mb_steps = std::max(1L, static_cast<long>(std::ceil(interval / cfg.dt - 1e-9)));
  const long nls_steps = std::max(1L, std::lround(interval / cfg.nls_dt));

  nls::EvolveOptions no;
  no.dt = interval / nls_steps;
  no.t_final = cfg.t_final;
  no.record_every = static_cast<int>(nls_steps);
  no.keep_states = true;
  const auto phi0 = cfg.make_phi0();
  const auto ntr = nls::evolve(phi0, ext, s.b, no);

  const auto psi0 = manybody::product_state(s.space, manybody::condensate_coefficients(s.basis, phi0));
  manybody::EvolveOptions mo;
  mo.dt = interval / mb_steps;
  mo.t_final = cfg.t_final;
  mo.record_every = static_cast<int>(mb_steps);
  mo.krylov.tol = cfg.krylov_tol;
  mo.cap = cfg.cap;
  const auto mtr = manybody::evolve(s.basis, s.space, psi0, mo);

  std::vector<std::vector<double>> rows;
  for (std::size_t j = 0; j < mtr.states.size(); ++j) {
    const auto c = manybody::condensate_coefficients(s.basis, ntr.states[j]);
    const auto g1 = manybody::reduced_density_1(s.space, mtr.states[j]);
    const double fraction = std::real(c.dot(g1 * c));
    const auto& r = mtr.rows[j];
    rows.push_back({r.t, r.norm, r.energy, r.energy / n - s.basis.ground_energy_scaled(), fraction,
                    manybody::trace_distance(g1, c)});
    if (cfg.dump_states) {
      const auto& v = mtr.states[j];
      io::write_state(path_in(cfg, "state_" + std::to_string(j) + ".bin"), cfg.hash,
                      std::vector<std::complex<double>>(v.data(), v.data() + v.size()), cfg.box_length);
    }
  }
  io::write_csv(path_in(cfg, "manybody.csv"), cfg.hash,
                {"t", "norm", "energy", "E_renormalized", "condensate_fraction", "trace_distance_to_condensate"},
                rows);
  json j;
  j["n"] = n;
  j["epsilon"] = s.point.epsilon();
  j["dim"] = s.space.dim();
  j["matvecs"] = mtr.stats.matvecs;
  j["trace_distance_final"] = rows.back().back();
  j["norm_drift_per_time"] = mtr.max_norm_drift_per_time;
  print_json(j);
  return kOk;
}

// ----------------------------------------------------------------------- alpha

int cmd_alpha(const harness::ExperimentConfig& cfg) {
  if (cfg.state_file.empty()) throw ConfigError("alpha needs state_file");
  auto s = build_setup(cfg);
  const auto dump = io::read_state(cfg.state_file);
  if (dump.count != s.space.dim()) {
    throw ConfigError("state_file holds " + std::to_string(dump.count) + " amplitudes but the configured sector has " +
                      std::to_string(s.space.dim()));
  }
  manybody::State psi(static_cast<Eigen::Index>(dump.count));
  for (std::size_t i = 0; i < dump.count; ++i) psi[static_cast<Eigen::Index>(i)] = std::complex<double>(dump.values[i]);
  psi /= psi.norm();

  const int n = static_cast<int>(s.point.n_particles());
  const auto ext = cfg.make_external();
  auto phi = cfg.make_phi0();
  if (cfg.alpha_time > 0.0) {
    nls::EvolveOptions o;
    o.dt = cfg.alpha_time / std::max(1L, std::lround(cfg.alpha_time / cfg.nls_dt));
    o.t_final = cfg.alpha_time;
    phi = nls::evolve(phi, ext, s.b, o).final_state;
  }
  const auto proj = cfg.alpha_projector == "mode"
                        ? projectors::CondensateProjector::from_mode(s.basis.size(), cfg.alpha_mode)
                        : projectors::CondensateProjector::from_basis(s.basis, phi);
  const auto dist = projectors::counting_distribution(s.space, psi, proj);
  const auto h = manybody::Hamiltonian::build(s.basis, s.space, cfg.alpha_time);
  const double e_psi = manybody::renormalized_energy(s.basis, h, psi);
  const double e_phi = nls::effective_energy(phi, ext, s.b, cfg.alpha_time);
  const auto ax = projectors::alpha_xi(dist, e_psi, e_phi, cfg.xi);
  const auto g1 = manybody::reduced_density_1(s.space, psi);

  json j;
  j["alpha_n2"] = projectors::alpha(dist, projectors::WeightFunction::n_squared(n));
  j["alpha_m"] = ax.alpha_m;
  j["alpha_xi"] = ax.value;
  j["energy_gap"] = ax.energy_gap;
  j["trace_distance"] = manybody::trace_distance(g1, proj.phi);
  j["probs"] = dist.probs;
  j["source"] = dist.source;
  print_json(j);
  io::write_json(path_in(cfg, "alpha.json"), cfg.hash, j);
  return kOk;
}

// ------------------------------------------------------------------ aux-verify

int cmd_aux(const harness::ExperimentConfig& cfg) {
  const auto a = battery::aux_battery({cfg.aux_n, cfg.aux_epsilon, cfg.aux_beta, cfg.aux_samples});
  json j;
  j["point"] = {{"n", cfg.aux_n}, {"epsilon", cfg.aux_epsilon}, {"beta", cfg.aux_beta}};
  j["h_oracle_error"] = a.h_oracle_error;
  j["poisson_residual_coarse"] = a.poisson_coarse;
  j["poisson_residual_fine"] = a.poisson_fine;
  j["poisson_order"] = a.poisson_order;
  j["boundary_max"] = a.boundary_max;
  j["theta_midpoint"] = a.theta_midpoint;
  j["theta_grad_times_eps"] = a.theta_grad_eps;
  j["hbar_slope_error"] = a.hbar_slope_error;
  j["hbar_order"] = a.hbar_order;
  j["green_asymmetry"] = a.green_asymmetry;
  j["grad_sup_slope"] = a.grad_sup_slope;
  j["grad_l2_slope"] = a.grad_l2_slope;
  j["wbar_oracle_error"] = a.wbar_oracle_error;
  print_json(j);
  io::write_json(path_in(cfg, "aux.json"), cfg.hash, j);
  if (cfg.dump_samples) {
    const auto p = scaling::ScalingPoint::make(cfg.aux_n, cfg.aux_epsilon, cfg.aux_beta);
    auto c3 = cfg;
    c3.d_perp = 2;
    const auto h = auxiliary::build_h_epsilon(potentials::scale(c3.make_profile(), p), cfg.aux_samples);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < h.radii.size(); ++i) rows.push_back({h.radii[i], h.values[i], h.derivative[i]});
    io::write_csv(path_in(cfg, "h_epsilon.csv"), cfg.hash, {"r", "h", "dh"}, rows);
    const auto th = auxiliary::theta(p.mu(), p.epsilon(), cfg.aux_samples);
    rows.clear();
    for (std::size_t i = 0; i < th.theta.radii.size(); ++i) {
      rows.push_back({th.theta.radii[i], th.theta.values[i], th.theta.derivative[i]});
    }
    io::write_csv(path_in(cfg, "theta.csv"), cfg.hash, {"r", "theta", "dtheta"}, rows);
  }
  return kOk;
}

// ----------------------------------------------------------------------- sweep

int cmd_sweep(const harness::ExperimentConfig& cfg) {
  const auto res = harness::run_sweep(cfg, true);
  std::vector<std::vector<double>> rows;
  for (const auto& r : res.rows) rows.push_back(r.values());
  io::write_csv(path_in(cfg, "sweep.csv"), cfg.hash, harness::SweepRow::columns(), rows);
  std::vector<std::vector<double>> grows;
  for (const auto& g : res.gamma_rows) grows.push_back({double(g.n), g.epsilon, g.mu, g.mu_over_eps, g.gamma_l2});
  io::write_csv(path_in(cfg, "gamma.csv"), cfg.hash, {"n", "epsilon", "mu", "mu_over_eps", "gamma_l2"}, grows);

  json j;
  j["points_ok"] = res.rows.empty() ? 0 : static_cast<int>(res.rows.size()) / (cfg.checkpoints + 1);
  j["failures"] = json::array();
  bool capped = false, broken = false;
  for (const auto& f : res.failures) {
    j["failures"].push_back({{"n", f.n}, {"epsilon", f.epsilon}, {"error", f.error}, {"size_cap", f.size_cap}});
    (f.size_cap ? capped : broken) = true;
  }
  const auto tr = harness::trend(res.rows);
  j["trend"] = {{"t", tr.t}, {"n", tr.ns}, {"trace_distance", tr.distances},
                {"strictly_decreasing", tr.strictly_decreasing}, {"bridge_every_row", tr.bridge_every_row}};
  try {
    const auto f = harness::fit_rate(res.rows);
    j["rate_fit"] = {{"constant", f.constant}, {"slope", f.slope}, {"r_squared", f.r_squared}, {"t", f.t},
                     {"rows", f.rows}};
  } catch (const InsufficientDataError& e) {
    j["rate_fit"] = {{"refused", e.what()}};
  }
  try {
    const auto g = harness::fit_gamma(res.gamma_rows);
    j["gamma_fit"] = {{"slope", g.slope}, {"intercept", g.intercept}, {"r_squared", g.r2}};
  } catch (const InsufficientDataError& e) {
    j["gamma_fit"] = {{"refused", e.what()}};
  }
  j["seconds"] = res.seconds;
  io::write_json(path_in(cfg, "sweep_summary.json"), cfg.hash, j);
  print_json(j);

  bool asserted = tr.bridge_every_row || res.rows.empty();
  if (cfg.assert_monotone) asserted = asserted && tr.strictly_decreasing;
  if (!asserted || broken) return kAssertion;
  if (capped) return kCap;
  return kOk;
}

// ------------------------------------------------------------------ verify-all

int cmd_verify(const harness::ExperimentConfig& cfg) {
  const auto rep = harness::verify_all(cfg, true);
  json j;
  j["passed"] = rep.passed();
  j["checks"] = json::array();
  for (const auto& c : rep.checks) {
    j["checks"].push_back({{"module", c.module},
                           {"name", c.name},
                           {"measured", std::isfinite(c.measured) ? json(c.measured) : json(nullptr)},
                           {"bound", c.bound},
                           {"passed", c.passed},
                           {"detail", c.detail}});
  }
  io::write_json(path_in(cfg, "verify.json"), cfg.hash, j);
  const auto fails = rep.failures();
  std::fprintf(stderr, "%zu checks, %zu failed\n", rep.checks.size(), fails.size());
  for (const auto& f : fails) {
    std::fprintf(stderr, "FAILED %s / %s: measured %g vs bound %g %s\n", f.module.c_str(), f.name.c_str(), f.measured,
                 f.bound, f.detail.c_str());
  }
  return rep.passed() ? kOk : kAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dimred: dimensional reduction of a confined Bose gas, desk-scale experiments"};
  app.require_subcommand(1);
  Common common;
  std::uint64_t seed = 0;

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const harness::ExperimentConfig&);
  };
  const Sub subs[] = {
      {"transverse", "ground state, gap and quartic of the transverse confinement", cmd_transverse},
      {"nls-evolve", "split-step evolution of the effective 1D equation", cmd_nls},
      {"manybody-evolve", "N-body evolution in the mode truncation", cmd_manybody},
      {"alpha", "counting functionals of a dumped N-body state", cmd_alpha},
      {"aux-verify", "auxiliary function battery", cmd_aux},
      {"sweep", "convergence sweep over a scaling sequence", cmd_sweep},
      {"verify-all", "every module battery against its bounds", cmd_verify},
  };
  std::vector<std::pair<CLI::App*, const Sub*>> registered;
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    sc->add_option("--config", common.config, "key-value config file")->required();
    sc->add_option("--out", common.out, "output directory (overrides out_dir)");
    sc->add_option("--seed", seed, "random seed (overrides seed)");
    registered.emplace_back(sc, &s);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfig;
  }

  for (const auto& [sc, s] : registered) {
    if (!sc->parsed()) continue;
    if (sc->count("--seed") > 0) common.seed = seed;
    try {
      const auto cfg = load(common);
      return s->run(cfg);
    } catch (const ConfigError& e) {
      std::fprintf(stderr, "configuration error: %s\n", e.what());
      return kConfig;
    } catch (const SizeError& e) {
      std::fprintf(stderr, "resource cap: %s\n", e.what());
      return kCap;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "error: %s\n", e.what());
      return kAssertion;
    }
  }
  return kConfig;
}

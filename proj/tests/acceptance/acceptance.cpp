// Acceptance runner: one PASS/FAIL line per criterion, indented details below.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "dimred/battery.hpp"
#include "dimred/config.hpp"
#include "dimred/errors.hpp"
#include "dimred/harness.hpp"
#include "dimred/potentials.hpp"

using namespace dimred;

namespace {

struct Outcome {
  bool passed = false;
  std::vector<std::string> details;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome projector_algebra() {
  const auto a = battery::projector_algebra(20240611, 50, 6, 8);
  Outcome o;
  o.passed = a.counting_residual < 1e-10 && a.factor_residual < 1e-10 && a.fqq_residual < 1e-10 &&
             a.alpha_residual < 1e-10;
  o.details.push_back(fmt("%d systems, N <= %d, one-body dim <= %d", a.systems, a.max_particles, a.max_dim));
  o.details.push_back(fmt("counting %.2e  factorisation %.2e  fqq %.2e  alpha_n2 %.2e (bound 1e-10)",
                          a.counting_residual, a.factor_residual, a.fqq_residual, a.alpha_residual));
  return o;
}

Outcome rate_bridge() {
  const auto s = battery::rate_bridge_survey(20240612, 100);
  Outcome o;
  o.passed = s.states == 100 && s.violations == 0;
  o.details.push_back(fmt("%d states, %d violations, %d via factorial moments", s.states, s.violations,
                          s.factorial_path));
  o.details.push_back(fmt("max alpha_n2/Tr %.3f (<= 1), max Tr/sqrt(8 alpha_n2) %.3f (<= 1)", s.max_lower_ratio,
                          s.max_upper_ratio));
  return o;
}

Outcome weight_norms() {
  const auto s = battery::weight_survey({100, 1000, 10000, 100000}, {0.05, 0.1, 0.2});
  Outcome o;
  o.passed = s.all_l_ok && s.max_ln_norm <= 4.0;
  for (const auto& r : s.reports) {
    o.details.push_back(fmt("N=%-6d xi=%.2f  ||l||=%.6f <= N^xi=%.6f %s  ||l n||=%.4f", r.n_particles, r.xi,
                            r.l_norm, r.l_bound, r.l_ok ? "ok" : "VIOLATED", r.ln_norm));
  }
  return o;
}

Outcome transverse_analytics() {
  const auto t = battery::transverse_analytics();
  Outcome o;
  const bool ok1 = std::abs(t.e0_1d - 1.0) <= 1e-6 && std::abs(t.gap_1d - 2.0) <= 1e-6 &&
                   std::abs(t.quartic_1d - 0.398942) <= 1e-6;
  const bool ok2 = std::abs(t.e0_2d - 2.0) <= 1e-4 && std::abs(t.quartic_2d - 0.159155) <= 1e-4;
  o.passed = ok1 && ok2;
  o.details.push_back(fmt("1D (h=%.1e): E0 %.9f  gap %.9f  quartic %.9f", t.spacing_1d, t.e0_1d, t.gap_1d,
                          t.quartic_1d));
  o.details.push_back(fmt("2D (h=%.1e): E0 %.7f  quartic %.7f", t.spacing_2d, t.e0_2d, t.quartic_2d));
  return o;
}

Outcome nls_solver() {
  const auto s = battery::nls_battery();
  Outcome o;
  o.passed = s.mass_drift < 1e-10 && s.energy_drift < 1e-8 && s.phase_error < 1e-8 &&
             std::abs(s.strang_order - 2.0) <= 0.1;
  o.details.push_back(fmt("mass drift %.2e (< 1e-10)  energy drift %.2e (< 1e-8)", s.mass_drift, s.energy_drift));
  o.details.push_back(fmt("plane-wave phase error %.2e (< 1e-8)  Strang order %.4f (2 +- 0.1)", s.phase_error,
                          s.strang_order));
  return o;
}

Outcome auxiliary_battery() {
  const auto a = battery::aux_battery();
  Outcome o;
  o.passed = a.h_oracle_error <= 1e-6 && std::abs(a.poisson_order - 2.0) <= 0.2 && a.boundary_max < 1e-10 &&
             a.theta_midpoint == 0.5 && a.hbar_slope_error <= 1e-8 && std::abs(a.grad_sup_slope - 1.0) <= 0.15 &&
             std::abs(a.grad_l2_slope - 1.0) <= 0.15;
  o.details.push_back(fmt("h_eps vs closed form %.2e (<= 1e-6)", a.h_oracle_error));
  o.details.push_back(fmt("Poisson residual %.3e -> %.3e, order %.3f (2 +- 0.2)", a.poisson_coarse, a.poisson_fine,
                          a.poisson_order));
  o.details.push_back(fmt("boundary values %.2e (< 1e-10)  Theta midpoint %.17g (= 0.5)", a.boundary_max,
                          a.theta_midpoint));
  o.details.push_back(fmt("h-bar wing slope error %.2e (<= 1e-8)", a.hbar_slope_error));
  o.details.push_back(fmt("gradient slopes: sup %.4f  L2 %.4f (1 +- 0.15)", a.grad_sup_slope, a.grad_l2_slope));
  return o;
}

Outcome two_body_oracle() {
  battery::OracleSetup st;
  const auto r = battery::oracle_comparison(st);
  // truncation check: fewer transverse modes must agree with the converged run
  battery::OracleSetup lower = st;
  lower.my = st.my - 2;
  const auto r2 = battery::oracle_comparison(lower);
  Outcome o;
  o.passed = r.trace_distance < 1e-6;
  o.details.push_back(fmt("eps %.2f beta %.2f L %.1f, Mx=%d, My=%d, oracle grid %d x %d, dim %zu", st.epsilon, st.beta,
                          st.box_length, st.nx, st.my, st.nx, st.ny, r.dim));
  o.details.push_back(fmt("Tr|gamma_modes - gamma_oracle| at T=%.1f: %.3e (< 1e-6); gamma moved %.3e", st.t_final,
                          r.trace_distance, r.change));
  o.details.push_back(fmt("with My=%d: %.3e (truncation converged)", lower.my, r2.trace_distance));
  o.details.push_back(fmt("oracle exchange-symmetry error %.2e", r.symmetry_error));
  return o;
}

Outcome persistence_trend() {
  const auto cfg = harness::ExperimentConfig::from(config::Config::parse(
      "beta = 0.5\n"
      "gamma = 1.0\n"
      "ns = 2, 3, 4, 5, 6, 7, 8\n"
      "profile = uniform_ball\n"
      "d_perp = 1\n"
      "confinement = harmonic\n"
      "external = zero\n"
      "phi0 = constant\n"
      "mx = 9\n"
      "my = 3\n"
      "sector_momenta = 0\n"
      "sector_parity = 1\n"
      "cap = 1000000\n"
      "t_final = 0.5\n"
      "dt = 0.5\n"));
  const auto res = harness::run_sweep(cfg, true);
  const auto tr = harness::trend(res.rows);
  Outcome o;
  bool gamma_ok = false;
  std::string gamma_line;
  try {
    const auto g = harness::fit_gamma(res.gamma_rows);
    gamma_ok = std::abs(g.slope - 1.0) <= 0.15;
    gamma_line = fmt("||Gamma|| vs mu/eps slope %.4f (1 +- 0.15), r^2 %.6f: %s", g.slope, g.r2,
                     gamma_ok ? "ok" : "OUT OF BAND");
  } catch (const std::exception& e) {
    gamma_line = std::string("Gamma fit refused: ") + e.what();
  }
  const bool complete = res.failures.empty() && tr.ns.size() == 7;
  o.passed = complete && tr.strictly_decreasing && tr.bridge_every_row && gamma_ok;
  for (std::size_t i = 0; i < tr.ns.size(); ++i) {
    const harness::SweepRow* row = nullptr;
    for (const auto& r : res.rows)
      if (r.n == tr.ns[i] && r.t == tr.t) row = &r;
    o.details.push_back(fmt("N=%lld eps=%.4f dim=%-7zu Tr|g1 - p|=%.6e  alpha_n2=%.4e  bridge %s",
                            static_cast<long long>(tr.ns[i]), row->epsilon, row->dim, tr.distances[i], row->alpha_n2,
                            row->bridge_holds ? "ok" : "VIOLATED"));
  }
  for (const auto& g : res.gamma_rows) {
    o.details.push_back(fmt("N=%lld mu/eps=%.4f ||Gamma||=%.6e", static_cast<long long>(g.n), g.mu_over_eps, g.gamma_l2));
  }
  for (const auto& f : res.failures) o.details.push_back("point failed: " + f.error);
  o.details.push_back(fmt("strictly decreasing: %s; sandwich on every row: %s", tr.strictly_decreasing ? "yes" : "NO",
                          tr.bridge_every_row ? "yes" : "NO"));
  o.details.push_back(gamma_line);
  return o;
}

Outcome coupling_invariance() {
  const auto profile = potentials::InteractionProfile::uniform_ball(2);
  const double quartic = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  const auto s = battery::coupling_survey(profile, quartic, 0.5, 1.0, {2, 4, 8, 16, 32, 64, 128, 256, 1024},
                                          {0.5, 1.0, 2.0});
  Outcome o;
  bool all_d = true;
  for (bool b : s.condition_d) all_d = all_d && b;
  o.passed = s.spread <= 1e-12 && s.limit_defect <= 1e-12 && all_d;
  o.details.push_back(fmt("%zu points, b = %.15f, spread %.2e, |b - l1 quartic| %.2e (<= 1e-12)", s.couplings.size(),
                          s.couplings.front(), s.spread, s.limit_defect));
  for (std::size_t i = 0; i < s.etas.size(); ++i) {
    o.details.push_back(fmt("condition (d) eta=%.1f: %s", s.etas[i], s.condition_d[i] ? "ok" : "FAILED"));
  }
  return o;
}

struct Criterion {
  int id;
  const char* name;
  double budget_seconds;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {1, "projector algebra", 30, projector_algebra},
      {2, "rate bridge", 30, rate_bridge},
      {3, "weight norms", 5, weight_norms},
      {4, "transverse analytics", 60, transverse_analytics},
      {5, "NLS solver", 60, nls_solver},
      {6, "auxiliary battery", 120, auxiliary_battery},
      {7, "two-body cross-validation", 600, two_body_oracle},
      {8, "condensation persistence trend", 1800, persistence_trend},
      {9, "coupling invariance", 5, coupling_invariance},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.details.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_seconds;
    const bool ok = o.passed && in_time;
    std::printf("%s criterion %d: %s (%.1fs, budget %.0fs%s)\n", ok ? "PASS" : "FAIL", c.id, c.name, secs,
                c.budget_seconds, in_time ? "" : ", OVER BUDGET");
    for (const auto& d : o.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
    failed += ok ? 0 : 1;
  }
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}

#include <chrono>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dimred/errors.hpp"
#include "dimred/transverse.hpp"

using namespace dimred;
using namespace dimred::transverse;
using potentials::ConfinementPotential;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("1D harmonic oracle") {
  auto v = ConfinementPotential::harmonic(1);
  auto m = solve_ground(v, Grid::with_spacing(1, 8.0, 1.5e-3));
  CHECK(std::abs(m.energy0 - 1.0) < 1e-6);
  CHECK(std::abs(m.gap - 2.0) < 1e-6);
  CHECK(std::abs(m.quartic - 1.0 / std::sqrt(2.0 * pi)) < 1e-6);
  CHECK(std::abs(grid_norm(m.grid, m.chi) - 1.0) < 1e-10);
  CHECK(std::abs(rayleigh_quotient(v, m.grid, m.chi) - m.energy0) < 1e-10);
  for (double c : m.chi) CHECK(c > -1e-14);
}

TEST_CASE("gauge shift moves E0 only") {
  auto g = Grid::with_spacing(1, 8.0, 0.02);
  auto a = solve_ground(ConfinementPotential::harmonic(1), g);
  auto b = solve_ground(ConfinementPotential::harmonic(1, 1.0, 3.5), g);
  CHECK(b.energy0 - a.energy0 == doctest::Approx(3.5).epsilon(1e-10));
  double diff = 0.0;
  for (std::size_t i = 0; i < a.chi.size(); ++i) diff = std::max(diff, std::abs(a.chi[i] - b.chi[i]));
  CHECK(diff < 1e-9);
}

TEST_CASE("second-order convergence of E0") {
  auto v = ConfinementPotential::harmonic(1);
  const double e1 = std::abs(solve_ground(v, Grid::make(1, 8.0, 199)).energy0 - 1.0);
  const double e2 = std::abs(solve_ground(v, Grid::make(1, 8.0, 399)).energy0 - 1.0);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("boundary decay and degeneracy errors") {
  CHECK_THROWS_AS(solve_ground(ConfinementPotential::harmonic(1), Grid::make(1, 3.0, 301)), ResolutionError);
  // Two identical deep wells far apart: numerically degenerate ground pair.
  ConfinementPotential dbl("double", 1,
                           [](std::span<const double> y) {
                             return -50.0 * (std::exp(-(y[0] - 6) * (y[0] - 6)) + std::exp(-(y[0] + 6) * (y[0] + 6)));
                           },
                           -50.0, true);
  CHECK_THROWS_AS(solve_ground(dbl, Grid::make(1, 12.0, 601)), DegeneracyError);
}

TEST_CASE("2D harmonic oracle on a coarse grid") {
  // Stencil error per axis is h^2/16 for the ground state and 5h^2/16 for
  // the first excited one, so at h = 0.05: dE0 ~ 3.1e-4, dgap ~ 6.3e-4.
  auto v = ConfinementPotential::harmonic(2);
  auto m = solve_ground(v, Grid::with_spacing(2, 6.5, 0.05));
  const double h2 = m.grid.spacing * m.grid.spacing;
  CHECK(std::abs(m.energy0 - 2.0) < 1.1 * h2 / 8.0);
  CHECK(std::abs(m.gap - 2.0) < 1.1 * h2 / 4.0);
  CHECK(std::abs(m.quartic - 1.0 / (2.0 * pi)) < 1e-4);
  auto coarse = solve_ground(v, Grid::with_spacing(2, 6.5, 0.1));
  CHECK((coarse.energy0 - 2.0) / (m.energy0 - 2.0) ==
        doctest::Approx(coarse.grid.spacing * coarse.grid.spacing / h2).epsilon(0.03));
  CHECK(std::abs(grid_norm(m.grid, m.chi) - 1.0) < 1e-10);
  CHECK(std::abs(rayleigh_quotient(v, m.grid, m.chi) - m.energy0) < 1e-10);
}

TEST_CASE("rescale keeps normalization and scales the quartic") {
  auto m = solve_ground(ConfinementPotential::harmonic(1), Grid::with_spacing(1, 8.0, 0.01));
  for (double eps : {1.0, 0.25, 0.03}) {
    auto r = rescale(m, eps);
    CHECK(std::abs(grid_norm(r.grid, r.chi) - 1.0) < 1e-10);
    CHECK(std::abs(r.quartic - m.quartic / eps) < 1e-10 * r.quartic);
  }
  auto r1 = rescale(m, 1.0);
  CHECK(r1.chi == m.chi);
  auto m2 = solve_ground(ConfinementPotential::harmonic(2), Grid::make(2, 6.5, 121));
  auto r2 = rescale(m2, 0.1);
  CHECK(std::abs(r2.quartic / m2.quartic - 100.0) < 1e-10 * 100.0);
  CHECK(std::abs(grid_norm(r2.grid, r2.chi) - 1.0) < 1e-10);
}

TEST_CASE("parity of 1D modes alternates") {
  auto s = solve_modes(ConfinementPotential::harmonic(1), Grid::make(1, 8.0, 401), 6);
  for (int k = 0; k < 6; ++k) CHECK(s.parity[k] == (k % 2 == 0 ? 1 : -1));
  CHECK(excited_fraction_bound(0.1, 2.0) == doctest::Approx(0.2));
}

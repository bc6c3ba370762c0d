#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dimred/errors.hpp"
#include "dimred/grid_oracle.hpp"

using namespace dimred;
using potentials::ConfinementPotential;
using potentials::ExternalPotential;
using potentials::InteractionProfile;

namespace {

struct Case {
  scaling::ScalingPoint point;
  potentials::ScaledInteraction w;
  nls::CondensateState phi;
  grid_oracle::Options go;
  manybody::BasisOptions bo;
};

Case make_case(InteractionProfile prof, int nx, int ny, int my, double t_final) {
  const double len = 1.0;
  auto p = scaling::ScalingPoint::make(2, 0.1, 0.17);
  Case c{p, potentials::scale(prof, p),
         nls::CondensateState::from_function(nls::PeriodicGrid::make(len, nx),
                                             [&](double x) {
                                               return std::complex<double>(1.0 + 0.5 * std::cos(2.0 * std::numbers::pi * x / len),
                                                                           0.3 * std::sin(2.0 * std::numbers::pi * x / len));
                                             }),
         {}, {}};
  c.go.nx = nx;
  c.go.box_length = len;
  c.go.transverse_grid = transverse::Grid::make(1, 7.5, ny);
  c.go.dt = 2e-3;
  c.go.t_final = t_final;
  c.bo.mx = nx;
  c.bo.my = my;
  c.bo.box_length = len;
  c.bo.transverse_grid = c.go.transverse_grid;
  c.bo.quadrature = manybody::WQuadrature::grid;
  c.bo.x_points = nx;
  return c;
}

double mode_vs_oracle(const Case& c, double* change = nullptr) {
  auto conf = ConfinementPotential::harmonic(1);
  auto ext = ExternalPotential::zero();
  auto basis = manybody::ModeBasis::build(c.point, conf, ext, c.w, c.bo);
  auto space = manybody::FockSpace::build(basis, 2, manybody::Sector{{-2, -1, 0, 1, 2}, c.bo.mx, 1});
  auto h = manybody::Hamiltonian::build(basis, space);
  auto psi = manybody::product_state(space, manybody::condensate_coefficients(basis, c.phi));
  auto tr = manybody::evolve(basis, space, psi, {.dt = c.go.t_final, .t_final = c.go.t_final}, &h);
  auto gm = grid_oracle::embed(basis, manybody::reduced_density_1(space, tr.final_state));
  auto r = grid_oracle::run(c.point, conf, ext, c.w, c.phi, c.go);
  CHECK(r.symmetry_error < 1e-10);
  CHECK(r.norm_drift < 1e-10);
  if (change != nullptr) {
    *change = manybody::trace_norm(gm - grid_oracle::embed(basis, manybody::reduced_density_1(space, psi)));
  }
  return manybody::trace_norm(gm - r.gamma);
}

}  // namespace

TEST_CASE("grid oracle keeps a product state pure without interaction") {
  auto c = make_case(InteractionProfile::zero(2), 8, 21, 4, 0.2);
  auto r = grid_oracle::run(c.point, ConfinementPotential::harmonic(1), ExternalPotential::zero(), c.w, c.phi, c.go);
  CHECK(std::abs(r.gamma.trace().real() - 1.0) < 1e-12);
  CHECK(std::abs((r.gamma * r.gamma).trace().real() - 1.0) < 1e-10);
  CHECK(r.symmetry_error < 1e-12);
  // free evolution: mode space is exact
  CHECK(mode_vs_oracle(c) < 1e-10);
}

TEST_CASE("grid oracle agrees with the mode evolution under interaction") {
  auto c = make_case(InteractionProfile::smooth_bump(2), 20, 31, 10, 0.05);
  double change = 0.0;
  const double d = mode_vs_oracle(c, &change);
  CHECK(change > 1e-2);
  CHECK(d < 1e-7);
}

TEST_CASE("grid oracle size guard") {
  auto c = make_case(InteractionProfile::zero(2), 8, 21, 4, 0.2);
  c.go.max_points = 1000;
  CHECK_THROWS_AS(grid_oracle::run(c.point, ConfinementPotential::harmonic(1), ExternalPotential::zero(), c.w, c.phi, c.go),
                  SizeError);
  auto bad = c;
  bad.point = scaling::ScalingPoint::make(3, 0.1, 0.17);
  CHECK_THROWS_AS(grid_oracle::run(bad.point, ConfinementPotential::harmonic(1), ExternalPotential::zero(), c.w, c.phi, c.go),
                  DomainError);
}

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "dimred/errors.hpp"
#include "dimred/potentials.hpp"

using namespace dimred;
using namespace dimred::potentials;
using scaling::ScalingPoint;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("profile l1 norms") {
  CHECK(InteractionProfile::uniform_ball(3).l1_norm() == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-12));
  CHECK(InteractionProfile::uniform_ball(2).l1_norm() == doctest::Approx(pi).epsilon(1e-12));
  // truncated Gaussian: 4 pi \int_0^1 r^2 exp(-r^2/(2 s^2)) dr in closed form
  const double s = 0.25;
  const double full = 4.0 * pi * s * s * s *
                      (std::sqrt(pi / 2.0) * std::erf(1.0 / (s * std::sqrt(2.0))) -
                       std::exp(-1.0 / (2.0 * s * s)) / s);
  CHECK(InteractionProfile::gaussian_bump(3, 1.0, s).l1_norm() == doctest::Approx(full).epsilon(1e-10));
  CHECK(InteractionProfile::zero(3).l1_norm() == 0.0);
  CHECK_THROWS_AS(InteractionProfile::uniform_ball(4), DomainError);
}

TEST_CASE("scale: change of variables") {
  // N/eps^2 = 1e6
  auto p = ScalingPoint::make(10000, 0.1, 0.5);
  auto s = scale(InteractionProfile::uniform_ball(3), p);
  CHECK(s.amplitude() == doctest::Approx(1e3).epsilon(1e-12));
  CHECK(s.range() == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(s.integral() == doctest::Approx(4.0 * pi / 3.0 * 1e-6).epsilon(1e-12));
  CHECK(s.integral_by_quadrature() == doctest::Approx(s.integral()).epsilon(1e-8));

  auto third = scale(InteractionProfile::uniform_ball(3), ScalingPoint::make(500, 0.3, 1.0 / 3.0));
  CHECK(third.amplitude() == doctest::Approx(1.0).epsilon(1e-12));

  auto z = scale(InteractionProfile::zero(3), p);
  CHECK(z(0.0) == 0.0);
  CHECK(coupling(z, 0.2) == 0.0);
}

TEST_CASE("quadrature integral matches exact integral across points") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> ue(0.02, 0.9);
  std::uniform_real_distribution<double> ub(0.1, 0.9);
  std::uniform_int_distribution<std::int64_t> un(2, 100000);
  const std::vector<InteractionProfile> profiles = {
      InteractionProfile::uniform_ball(3), InteractionProfile::gaussian_bump(3),
      InteractionProfile::smooth_bump(3), InteractionProfile::smooth_bump(2, 2.0)};
  for (int i = 0; i < 40; ++i) {
    auto p = ScalingPoint::make(un(rng), ue(rng), ub(rng));
    for (const auto& prof : profiles) {
      auto s = scale(prof, p);
      CHECK(std::abs(s.integral_by_quadrature() / s.integral() - 1.0) < 1e-8);
    }
  }
}

TEST_CASE("dense radial sample reproduces amplitude * sup_bound") {
  auto p = ScalingPoint::make(200, 0.2, 0.4);
  for (const auto& prof : {InteractionProfile::uniform_ball(3, 2.5), InteractionProfile::gaussian_bump(3, 0.7),
                           InteractionProfile::smooth_bump(3, 1.3)}) {
    auto s = scale(prof, p);
    double sup = 0.0;
    for (int i = 0; i <= 100000; ++i) sup = std::max(sup, std::abs(s(s.range() * i / 100000.0)));
    CHECK(std::abs(sup - s.amplitude() * prof.sup_bound()) <= 1e-12 * s.amplitude() * prof.sup_bound());
  }
}

TEST_CASE("coupling oracle and invariance") {
  auto prof = InteractionProfile::uniform_ball(3);
  const double quartic = 1.0 / (2.0 * pi);
  auto a = scale(prof, ScalingPoint::make(100, 0.1, 0.5));
  auto b = scale(prof, ScalingPoint::make(10000, 0.01, 0.5));
  CHECK(coupling(a, quartic) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(coupling(a, quartic) == coupling(b, quartic));
  CHECK_THROWS_AS(coupling(a, 0.0), DomainError);
}

TEST_CASE("validate_family conditions") {
  const double quartic = 1.0 / (2.0 * pi);
  auto prof = InteractionProfile::uniform_ball(3);
  const double b = prof.l1_norm() * quartic;
  for (double eta : {0.5, 1.0, 2.0}) {
    auto rep = validate_family(scale(prof, ScalingPoint::make(10000, 1e-4, 0.5)), quartic, eta, b);
    CHECK(rep.all());
    CHECK(rep.coupling_defect == 0.0);
  }
  auto dip = InteractionProfile("dip", 3, [](double r) { return r < 0.5 ? 1.0 : (r <= 1.0 ? -0.1 : 0.0); },
                                1.0, 1.0, {0.5});
  auto rd = validate_family(scale(dip, ScalingPoint::make(100, 0.1, 0.5)), quartic, 1.0,
                            dip.l1_norm() * quartic);
  CHECK_FALSE(rd.nonnegative);
  CHECK(rd.bounded);

  auto wide = InteractionProfile::uniform_ball(3, 1.0, 10.0);
  auto rw = validate_family(scale(wide, ScalingPoint::make(100, 0.1, 0.5)), quartic, 1.0,
                            wide.l1_norm() * quartic);
  CHECK_FALSE(rw.supported);

  auto rb = validate_family(scale(prof, ScalingPoint::make(100, 0.1, 0.5)), quartic, 1.0, b * 1.01);
  CHECK_FALSE(rb.converging);
}

TEST_CASE("born length") {
  auto s = scale(InteractionProfile::uniform_ball(3), ScalingPoint::make(10000, 0.1, 0.5));
  CHECK(born_length(s) == doctest::Approx(1e-6 / 6.0).epsilon(1e-12));
  auto z = scale(InteractionProfile::zero(3), ScalingPoint::make(10000, 0.1, 0.5));
  CHECK(born_length(z) == 0.0);
  auto t = scale(InteractionProfile::uniform_ball(3), ScalingPoint::make(1000000, 0.01, 0.5));
  CHECK(born_length(s) * 1e6 == doctest::Approx(born_length(t) * 1e10).epsilon(1e-12));
}

TEST_CASE("tabulated profile from values") {
  auto t = InteractionProfile::tabulated(3, {0.0, 0.5, 1.0}, {1.0, 1.0, 0.0});
  CHECK(t(0.25) == doctest::Approx(1.0));
  CHECK(t(0.75) == doctest::Approx(0.5));
  CHECK(t(1.5) == 0.0);
  // 4 pi [ \int_0^.5 r^2 + \int_.5^1 r^2 (2 - 2r) ]
  const double expect = 4.0 * pi * (0.125 / 3.0 + (2.0 / 3.0 * (1 - 0.125) - 0.5 * (1 - 0.0625)));
  CHECK(t.l1_norm() == doctest::Approx(expect).epsilon(1e-10));
  CHECK_THROWS_AS(InteractionProfile::tabulated(3, {0.1, 0.5}, {1.0, 1.0}), DomainError);
}

TEST_CASE("external potential norms bound sampled values") {
  auto v = ExternalPotential::cosine(0.7, 2.0, 0.3, 5.0, 0.4);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  for (int i = 0; i < 2000; ++i) {
    const double y[2] = {u(rng), u(rng)};
    CHECK(std::abs(v(u(rng), u(rng), y)) <= v.sup_norm() + 1e-14);
  }
  CHECK(v.time_dependent());
  CHECK(ExternalPotential::zero().is_zero());
  CHECK(v.on_axis(0.0, 0.0) == doctest::Approx(0.7));
}

TEST_CASE("confinement negative part") {
  auto h = ConfinementPotential::harmonic(2);
  CHECK(h.negative_part_bound(2.0) == 2.0);
  auto g = ConfinementPotential::gaussian_well(1, 10.0, 1.0);
  const double y[1] = {0.0};
  CHECK(g(y) == doctest::Approx(-10.0));
  CHECK(g.negative_part_bound(-5.0) == doctest::Approx(5.0));
  CHECK_THROWS_AS(ConfinementPotential::harmonic(3), DomainError);
}

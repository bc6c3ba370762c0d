#include <cmath>
#include <random>

#include "doctest.h"
#include "dimred/errors.hpp"
#include "dimred/scaling.hpp"

using namespace dimred;
using namespace dimred::scaling;

TEST_CASE("make_point derives mu") {
  auto p = ScalingPoint::make(10000, 0.1, 0.5);
  CHECK(p.mu() == doctest::Approx(1e-3).epsilon(1e-12));
  CHECK(p.density_scale() == doctest::Approx(1e6).epsilon(1e-14));

  auto q = ScalingPoint::make(10000, 1e-4, 1.0 / 3.0);
  CHECK(q.mu() == doctest::Approx(1e-4).epsilon(1e-10));
  CHECK(q.mu_over_epsilon() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("make_point rejects out-of-range fields") {
  CHECK_THROWS_AS(ScalingPoint::make(100, 1.0, 0.5), DomainError);
  CHECK_THROWS_AS(ScalingPoint::make(100, 0.0, 0.5), DomainError);
  CHECK_THROWS_AS(ScalingPoint::make(1, 0.5, 0.5), DomainError);
  CHECK_THROWS_AS(ScalingPoint::make(100, 0.5, 1.0), DomainError);
  CHECK_NOTHROW(ScalingPoint::make(100, 0.999999, 0.5));
  try {
    ScalingPoint::make(100, 1.5, 0.5);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("epsilon") != std::string::npos);
  }
}

TEST_CASE("re-deriving mu is bit-for-bit stable") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ue(0.01, 0.99);
  std::uniform_real_distribution<double> ub(0.05, 0.95);
  std::uniform_int_distribution<std::int64_t> un(2, 1000000);
  for (int i = 0; i < 200; ++i) {
    auto p = ScalingPoint::make(un(rng), ue(rng), ub(rng));
    auto q = ScalingPoint::make(p.n_particles(), p.epsilon(), p.beta());
    CHECK(p.mu() == q.mu());
    CHECK(std::abs(p.mu() / std::pow(p.density_scale(), -p.beta()) - 1.0) < 1e-12);
  }
}

TEST_CASE("classify power-law sequences") {
  auto seq = ScalingSequence::power_law(0.5, 1.0, {100, 1000, 10000});
  auto c = classify(seq);
  CHECK(c.admissible);
  CHECK(c.moderately_confining);
  REQUIRE(c.evidence.size() == 3);
  // eps^2/mu = N^(-2 gamma + beta (1 + 2 gamma))
  const double expo = -2.0 + 0.5 * 3.0;
  for (const auto& e : c.evidence) {
    CHECK(e.epsilon2_over_mu == doctest::Approx(std::pow(double(e.n_particles), expo)).epsilon(1e-10));
  }
  CHECK(c.evidence[1].epsilon2_over_mu == doctest::Approx(0.0316227766).epsilon(1e-8));

  auto flat = ScalingSequence::explicit_points(0.5, {{100, 0.1}, {1000, 0.1}, {10000, 0.1}});
  CHECK_FALSE(classify(flat).admissible);

  auto slow = ScalingSequence::power_law(1.0 / 3.0, 0.125, {100, 1000, 10000});
  CHECK_FALSE(classify(slow).admissible);

  auto two = ScalingSequence::power_law(0.5, 1.0, {100, 1000});
  CHECK_THROWS_AS(classify(two), InsufficientDataError);
  CHECK_THROWS_AS(ScalingSequence::power_law(0.5, 1.0, {100, 100, 1000}), DomainError);
}

TEST_CASE("power_law_window closed forms") {
  auto w = power_law_window(1.0 / 3.0);
  CHECK(w.gamma_min == doctest::Approx(0.25));
  CHECK(w.gamma_max == doctest::Approx(1.0));
  auto u = power_law_window(0.6);
  CHECK(u.gamma_min == doctest::Approx(0.75));
  CHECK(u.upper_unbounded());
  auto tiny = power_law_window(1e-9);
  CHECK(tiny.gamma_max < 1e-8);
}

TEST_CASE("window membership implies both flags on long tails") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ub(0.1, 0.9);
  std::uniform_real_distribution<double> ut(0.05, 0.95);
  for (int i = 0; i < 100; ++i) {
    const double beta = ub(rng);
    auto w = power_law_window(beta);
    const double hi = w.upper_unbounded() ? w.gamma_min + 2.0 : w.gamma_max;
    const double gamma = w.gamma_min + ut(rng) * (hi - w.gamma_min);
    // Exponent margins decide how large N must be for the 0.5 threshold.
    const double e1 = -2.0 * gamma + beta * (1.0 + 2.0 * gamma);
    const double e2 = gamma - beta * (1.0 + 2.0 * gamma);
    const double slow = std::max(e1, e2);
    if (slow > -0.02) continue;
    const double n0 = std::ceil(std::pow(2.0, -1.0 / slow)) + 1.0;
    if (n0 > 1e15) continue;
    const auto n = static_cast<std::int64_t>(n0);
    // eps must stay below 1 so the first point is valid.
    auto seq = ScalingSequence::power_law(beta, gamma, {n, 2 * n, 4 * n});
    auto c = classify(seq);
    CHECK(c.admissible);
    CHECK(c.moderately_confining);
  }
}

TEST_CASE("theoretical_rate terms") {
  auto p = ScalingPoint::make(10000, 1e-4, 0.5);
  auto r = theoretical_rate(p, RateInputs::make(0.5, 0.1, 0.5, 1.0));
  CHECK(r.confinement == doctest::Approx(1e-2).epsilon(1e-10));
  CHECK(r.admissibility == doctest::Approx(1e-1).epsilon(1e-10));
  CHECK(r.depletion == doctest::Approx(std::pow(1e4, -0.125)).epsilon(1e-12));
  CHECK(r.coupling == doctest::Approx(1e-12).epsilon(1e-8));
  CHECK(r.total() == doctest::Approx(0.4262).epsilon(1e-4));

  auto big = theoretical_rate(p, RateInputs::make(0.5, 0.1, 0.5, 50.0));
  CHECK(big.coupling < 1e-300);

  auto a = ScalingPoint::make(1000, 1e-3, 0.5);
  auto ri = RateInputs::make(0.5, 0.1, 0.5, 1.0);
  CHECK(theoretical_rate(p, ri).total() < theoretical_rate(a, ri).total());

  CHECK_THROWS_AS(RateInputs::make(0.4, 0.2, 0.3, 1.0), DomainError);
  CHECK_THROWS_AS(RateInputs::make(0.4, 0.1, 0.5, 1.0), DomainError);
  CHECK_THROWS_AS(RateInputs::make(0.4, 0.1, 0.3, 0.0), DomainError);
}

TEST_CASE("rate decreases along window sequences") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ub(0.2, 0.8);
  std::uniform_real_distribution<double> ut(0.1, 0.9);
  for (int i = 0; i < 50; ++i) {
    const double beta = ub(rng);
    auto w = power_law_window(beta);
    const double hi = std::min(w.upper_unbounded() ? w.gamma_min + 1.0 : w.gamma_max, 2.5);
    const double gamma = w.gamma_min + ut(rng) * (hi - w.gamma_min);
    auto ri = RateInputs::make(beta, beta / 4, beta, 0.5);
    auto seq = ScalingSequence::power_law(beta, gamma, {10, 100, 1000, 10000, 100000});
    double prev = INFINITY;
    for (const auto& p : seq.points) {
      const double r = theoretical_rate(p, ri).total();
      CHECK(r > 0.0);
      CHECK(r < prev);
      prev = r;
    }
  }
}

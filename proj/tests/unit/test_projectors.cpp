#include <cmath>
#include <random>

#include "doctest.h"
#include "dimred/errors.hpp"
#include "dimred/projectors.hpp"
#include "../support/generators.hpp"

using namespace dimred;
using namespace dimred::projectors;

namespace {

manybody::State two_mode_cat(const manybody::FockSpace& f) {
  manybody::State s = manybody::State::Zero(static_cast<Eigen::Index>(f.dim()));
  s(static_cast<Eigen::Index>(f.find_occupations({2, 0}))) = 1.0 / std::sqrt(2.0);
  s(static_cast<Eigen::Index>(f.find_occupations({0, 2}))) = 1.0 / std::sqrt(2.0);
  return s;
}

double op_residual(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("counting distribution of simple states") {
  auto f = manybody::FockSpace::full(2, 2);
  auto cat = two_mode_cat(f);
  auto p0 = CondensateProjector::from_mode(2, 0);
  auto d = counting_distribution(f, cat, p0);
  CHECK(d.source == "sector");
  CHECK(d.probs[0] == doctest::Approx(0.5));
  CHECK(std::abs(d.probs[1]) < 1e-15);
  CHECK(d.probs[2] == doctest::Approx(0.5));
  CHECK(alpha(d, WeightFunction::n_squared(2)) == doctest::Approx(0.5));

  auto rb = rate_bridge(f, cat, p0);
  CHECK(rb.alpha_n2 == doctest::Approx(0.5));
  CHECK(rb.trace_distance == doctest::Approx(1.0));
  CHECK(rb.upper == doctest::Approx(2.0));
  CHECK(rb.holds);

  // fully condensed
  auto g = manybody::FockSpace::full(4, 3);
  manybody::State c = manybody::State::Zero(static_cast<Eigen::Index>(g.dim()));
  c(static_cast<Eigen::Index>(g.find_occupations({0, 4, 0}))) = 1.0;
  auto pc = CondensateProjector::from_mode(3, 1);
  auto dc = counting_distribution(g, c, pc);
  CHECK(dc.probs[0] == 1.0);
  CHECK(alpha(dc, WeightFunction::n_squared(4)) == 0.0);
  auto z = rate_bridge(g, c, pc);
  CHECK(z.alpha_n2 == 0.0);
  CHECK(z.trace_distance < 1e-14);
  CHECK(z.holds);
}

TEST_CASE("the cat state on the dense tensor oracle") {
  auto f = manybody::FockSpace::full(2, 2);
  auto ts = dense::TensorSpace::make(2, 2);
  auto v = dense::embed(ts, f, two_mode_cat(f));
  CHECK(v.norm() == doctest::Approx(1.0));
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(2, 2);
  p(0, 0) = 1.0;
  Eigen::MatrixXcd q1 = dense::site(ts, 0, Eigen::MatrixXcd::Identity(2, 2) - p);
  CHECK((q1 * v).squaredNorm() == doctest::Approx(0.5));
}

TEST_CASE("factorial-moment path agrees with the dense oracle") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 4;
    const int m = 2 + trial % 3;
    auto f = manybody::FockSpace::full(n, m);
    auto psi = gen::fock_state(rng, f);
    auto proj = CondensateProjector::from_vector(gen::unit_vector(rng, m));
    REQUIRE(proj.mode_index < 0);
    auto d = counting_distribution(f, psi, proj);
    CHECK(d.source == "factorial-moment");
    auto ts = dense::TensorSpace::make(n, m);
    auto ref = dense::counting_distribution(ts, dense::embed(ts, f, psi), proj.p());
    CHECK(std::abs(d.total() - 1.0) < 1e-10);
    for (int k = 0; k <= n; ++k) CHECK(std::abs(d.probs[k] - ref.probs[k]) < 1e-10);
    // the sector path on a basis mode also matches
    auto pm = CondensateProjector::from_mode(m, trial % m);
    auto ds = counting_distribution(f, psi, pm);
    auto rs = dense::counting_distribution(ts, dense::embed(ts, f, psi), pm.p());
    for (int k = 0; k <= n; ++k) CHECK(std::abs(ds.probs[k] - rs.probs[k]) < 1e-12);
  }
}

TEST_CASE("projector identities on random dense systems") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    auto s = gen::dense_system(rng, 4, 8, 512);
    const int d = s.d_phi * s.d_chi;
    const auto dim = s.space.dim();
    const Eigen::MatrixXcd id1 = Eigen::MatrixXcd::Identity(d, d);
    const Eigen::MatrixXcd p = s.projector.p();
    const Eigen::MatrixXcd pf = s.projector.p_phi;
    const Eigen::MatrixXcd pc = s.projector.p_chi;
    // one-body factor identities
    CHECK(op_residual(p, pf * pc) < 1e-12);
    CHECK(op_residual(pf * p, p) < 1e-12);
    CHECK(op_residual(pc * p, p) < 1e-12);
    CHECK(op_residual((id1 - pf) * (id1 - p), id1 - pf) < 1e-12);
    CHECK(op_residual(pf * (id1 - p), pf * (id1 - pc)) < 1e-12);
    CHECK(op_residual((id1 - pc) * p, Eigen::MatrixXcd::Zero(d, d)) < 1e-12);
    CHECK(op_residual(id1 - p, (id1 - pc) + (id1 - pf) * pc) < 1e-12);
    CHECK(op_residual(id1 - p, (id1 - pf) + pf * (id1 - pc)) < 1e-12);

    Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(dim, dim);
    Eigen::MatrixXcd qsum = Eigen::MatrixXcd::Zero(dim, dim);
    for (int j = 0; j < s.n; ++j) qsum += dense::site(s.space, j, id1 - p);
    for (int k = 0; k <= s.n; ++k) {
      const auto pk = dense::counting(s.space, p, k);
      sum += pk;
      CHECK(op_residual(qsum * pk, double(k) * pk) < 1e-10);
      CHECK(op_residual(pk * pk, pk) < 1e-10);
    }
    CHECK(op_residual(sum, Eigen::MatrixXcd::Identity(dim, dim)) < 1e-10);
    // n^2 = (1/N) sum_j q_j
    const auto n2 = dense::weighted(s.space, p, WeightFunction::n_squared(s.n));
    CHECK(op_residual(n2, qsum / double(s.n)) < 1e-12);
    // alpha_{n^2} = ||q_1 psi||^2 on symmetric states
    const auto dist = dense::counting_distribution(s.space, s.psi, p);
    const double q1 = (dense::site(s.space, 0, id1 - p) * s.psi).squaredNorm();
    CHECK(std::abs(alpha(dist, WeightFunction::n_squared(s.n)) - q1) < 1e-10);
    CHECK(std::abs(dist.total() - 1.0) < 1e-10);
    for (double x : dist.probs) CHECK(x > -1e-12);
  }
}

TEST_CASE("shifted weights act as f(k + d) on P_k") {
  std::mt19937_64 rng(3);
  auto s = gen::dense_system(rng, 3, 4, 64);
  const auto p = s.projector.p();
  const auto f = WeightFunction::m(s.n, 0.2);
  for (int d : {-2, -1, 0, 1, 2}) {
    const auto fd = dense::weighted(s.space, p, f, d);
    for (int k = 0; k <= s.n; ++k) {
      const auto pk = dense::counting(s.space, p, k);
      const double want = (k + d >= 0 && k + d <= s.n) ? f(k + d) : 0.0;
      CHECK(op_residual(fd * pk, want * pk) < 1e-12);
    }
  }
  // operator norm of f-hat is the largest weight
  const auto fh = dense::weighted(s.space, p, WeightFunction::n(s.n));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(fh, Eigen::EigenvaluesOnly);
  CHECK(es.eigenvalues().cwiseAbs().maxCoeff() == doctest::Approx(WeightFunction::n(s.n).sup()));
}

TEST_CASE("weight functions") {
  const int n = 1000;
  const double xi = 0.2;
  auto wn = WeightFunction::n(n);
  auto wm = WeightFunction::m(n, xi);
  CHECK(wn(250) == std::sqrt(0.25));
  CHECK(wn(-1) == 0.0);
  CHECK(wn(n + 1) == 0.0);
  const double k0 = m_branch_point(n, xi);
  for (int k = 0; k <= n; ++k) {
    CHECK(wm(k) >= wn(k) - 1e-15);
    CHECK(wm(k) <= wn(k) + 0.5 * std::pow(double(n), -xi) + 1e-15);
    if (k >= k0) CHECK(wm(k) == wn(k));
    else CHECK(wm(k) == doctest::Approx(0.5 * (std::pow(double(n), -1.0 + xi) * k + std::pow(double(n), -xi))));
  }
  CHECK(wm(0) == doctest::Approx(0.5 * std::pow(double(n), -xi)));
  auto ma = WeightFunction::m_a(n, xi);
  auto mb = WeightFunction::m_b(n, xi);
  for (int k = 0; k + 2 <= n; ++k) {
    CHECK(ma(k) == doctest::Approx(wm(k) - wm(k + 1)).epsilon(1e-9));
    CHECK(ma(k) <= 0.0);
    CHECK(mb(k) == doctest::Approx(wm(k) - wm(k + 2)).epsilon(1e-9));
  }
  CHECK(ma(n) == 0.0);
  auto l = WeightFunction::l(n, xi);
  for (int k = 2; k <= n; ++k)
    CHECK(l(k) == doctest::Approx(n * std::max(std::abs(ma(k - 1)), std::abs(mb(k - 2)))));
  CHECK_THROWS_AS(WeightFunction::m(n, 0.5), DomainError);
  CHECK_THROWS_AS(WeightFunction::custom({1.0, -0.1}), DomainError);
  CHECK(WeightFunction::custom({0.0, 0.3, 0.2}).sup() == 0.3);
}

TEST_CASE("weight norm checks") {
  auto r = weight_norm_checks(100, 0.2);
  CHECK(r.l_bound == doctest::Approx(2.51189).epsilon(1e-5));
  CHECK(r.l_ok);
  CHECK(r.l_norm <= r.l_bound * (1.0 + 1e-15));
  double prev = 0.0;
  for (int n : {100, 1000, 10000}) {
    auto q = weight_norm_checks(n, 0.1);
    CHECK(q.l_ok);
    CHECK(q.ln_norm < 4.0);
    if (prev > 0.0) CHECK(q.ln_norm < 1.5 * prev);
    prev = q.ln_norm;
  }
}

TEST_CASE("alpha_xi") {
  auto f = manybody::FockSpace::full(5, 2);
  manybody::State c = manybody::State::Zero(static_cast<Eigen::Index>(f.dim()));
  c(static_cast<Eigen::Index>(f.find_occupations({5, 0}))) = 1.0;
  auto d = counting_distribution(f, c, CondensateProjector::from_mode(2, 0));
  auto a = alpha_xi(d, 1.25, 1.25, 0.1);
  CHECK(a.value == doctest::Approx(0.5 * std::pow(5.0, -0.1)));
  auto b = alpha_xi(d, 1.55, 1.25, 0.1);
  CHECK(b.energy_gap == doctest::Approx(0.3));
  CHECK(b.value == doctest::Approx(a.alpha_m + 0.3));
  CHECK(b.value >= b.alpha_m);
}

TEST_CASE("rate bridge on random states") {
  std::mt19937_64 rng(5);
  int violations = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 5;
    const int m = 2 + trial % 4;
    auto f = manybody::FockSpace::full(n, m);
    auto psi = gen::fock_state(rng, f, 0, 1.5);
    auto proj = trial % 2 ? CondensateProjector::from_mode(m, 0) : CondensateProjector::from_vector(gen::unit_vector(rng, m));
    if (!rate_bridge(f, psi, proj).holds) ++violations;
  }
  CHECK(violations == 0);
}

TEST_CASE("projector guards") {
  CHECK_THROWS_AS(CondensateProjector::from_vector(Eigen::VectorXcd::Ones(3)), DomainError);
  CHECK_THROWS_AS(dense::TensorSpace::make(6, 8, 4096), SizeError);
  auto f = manybody::FockSpace::full(2, 3);
  CHECK_THROWS_AS(counting_distribution(f, manybody::State::Zero(6), CondensateProjector::from_mode(2, 0)), DomainError);
}

#include "dimred/projectors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <bit>
#include <limits>
#include <unordered_map>

#include "dimred/errors.hpp"

namespace dimred::projectors {

using cplx = std::complex<double>;

// ------------------------------------------------------------- projector

namespace {

Eigen::VectorXcd normalized(const Eigen::VectorXcd& v, const char* what) {
  const double nrm = v.norm();
  if (!(nrm > 0.0)) throw DomainError(std::string(what) + " is zero");
  if (std::abs(nrm - 1.0) > 1e-10) {
    throw DomainError(std::string(what) + " is not normalized (norm " + std::to_string(nrm) + ")");
  }
  return v;
}

int basis_vector_index(const Eigen::VectorXcd& phi) {
  Eigen::Index imax = 0;
  phi.cwiseAbs().maxCoeff(&imax);
  if (std::abs(std::abs(phi(imax)) - 1.0) > 1e-12) return -1;
  return static_cast<int>(imax);
}

}  // namespace

CondensateProjector CondensateProjector::from_vector(const Eigen::VectorXcd& phi) {
  CondensateProjector p;
  p.phi = normalized(phi, "condensate orbital");
  p.mode_index = basis_vector_index(p.phi);
  return p;
}

CondensateProjector CondensateProjector::from_mode(int n_modes, int index) {
  if (index < 0 || index >= n_modes) throw DomainError("condensate mode index out of range");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n_modes);
  v(index) = 1.0;
  return from_vector(v);
}

CondensateProjector CondensateProjector::from_factors(const Eigen::VectorXcd& big_phi, const Eigen::VectorXcd& chi) {
  const Eigen::VectorXcd f = normalized(big_phi, "longitudinal factor");
  const Eigen::VectorXcd c = normalized(chi, "transverse factor");
  const auto dp = f.size();
  const auto dc = c.size();
  Eigen::VectorXcd v(dp * dc);
  for (Eigen::Index i = 0; i < dp; ++i) v.segment(i * dc, dc) = f(i) * c;
  CondensateProjector p = from_vector(v);
  const Eigen::MatrixXcd ip = Eigen::MatrixXcd::Identity(dp, dp);
  const Eigen::MatrixXcd ic = Eigen::MatrixXcd::Identity(dc, dc);
  const Eigen::MatrixXcd pf = f * f.adjoint();
  const Eigen::MatrixXcd pc = c * c.adjoint();
  p.p_phi = Eigen::MatrixXcd::Zero(dp * dc, dp * dc);
  p.p_chi = Eigen::MatrixXcd::Zero(dp * dc, dp * dc);
  for (Eigen::Index i = 0; i < dp; ++i)
    for (Eigen::Index j = 0; j < dp; ++j) {
      p.p_phi.block(i * dc, j * dc, dc, dc) = pf(i, j) * ic;
      p.p_chi.block(i * dc, j * dc, dc, dc) = ip(i, j) * pc;
    }
  return p;
}

CondensateProjector CondensateProjector::from_basis(const manybody::ModeBasis& basis,
                                                    const nls::CondensateState& big_phi) {
  const Eigen::VectorXcd c = manybody::condensate_coefficients(basis, big_phi);
  const double nrm = c.norm();
  if (std::abs(nrm - 1.0) > 1e-10) {
    throw DomainError("condensate is not representable in the mode basis (captured norm " +
                      std::to_string(nrm) + ")");
  }
  const int mx = basis.mx();
  const int my = basis.my();
  Eigen::VectorXcd f(mx);
  for (int i = 0; i < mx; ++i) f(i) = c(i * my);
  Eigen::VectorXcd chi = Eigen::VectorXcd::Zero(my);
  chi(0) = 1.0;
  CondensateProjector p = from_factors(f, chi);
  p.phi = c;
  p.mode_index = basis_vector_index(c);
  return p;
}

// ---------------------------------------------------------------- weights

double m_branch_point(int n_particles, double xi) {
  return std::pow(static_cast<double>(n_particles), 1.0 - 2.0 * xi);
}

namespace {

void check_weight_args(int n, double xi) {
  if (n < 1) throw DomainError("weights need N >= 1");
  if (!(xi > 0.0 && xi < 0.5)) throw DomainError("xi must lie in (0, 1/2)");
}

double m_value(int n, double xi, int k) {
  const double nd = static_cast<double>(n);
  if (k >= m_branch_point(n, xi)) return std::sqrt(k / nd);
  return 0.5 * (std::pow(nd, -1.0 + xi) * k + std::pow(nd, -xi));
}

// N (m(k1) - m(k2)) for k1 > k2 without cancellation: exact on the linear
// branch, rationalized on the root branch, split at the branch point when
// the pair straddles it (m is continuous there, m(k0) = N^-xi).
double scaled_m_diff(int n, double xi, int k1, int k2) {
  const double nd = static_cast<double>(n);
  const double k0 = m_branch_point(n, xi);
  auto root = [&](double a, double b) { return std::sqrt(nd) * (a - b) / (std::sqrt(a) + std::sqrt(b)); };
  auto lin = [&](double a, double b) { return 0.5 * (a - b) * std::pow(nd, xi); };
  if (k2 >= k0) return root(k1, k2);
  if (k1 < k0) return lin(k1, k2);
  return root(k1, k0) + lin(k0, k2);
}

// m outside [0, N] is not defined; the shifted operators drop those k.
std::vector<double> m_table(int n, double xi) {
  std::vector<double> v(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k <= n; ++k) v[k] = m_value(n, xi, k);
  return v;
}

}  // namespace

WeightFunction WeightFunction::n(int n_particles) {
  if (n_particles < 1) throw DomainError("weights need N >= 1");
  std::vector<double> v(static_cast<std::size_t>(n_particles) + 1);
  for (int k = 0; k <= n_particles; ++k) v[k] = std::sqrt(static_cast<double>(k) / n_particles);
  return {WeightKind::n, 0.0, std::move(v)};
}

WeightFunction WeightFunction::n_squared(int n_particles) {
  if (n_particles < 1) throw DomainError("weights need N >= 1");
  std::vector<double> v(static_cast<std::size_t>(n_particles) + 1);
  for (int k = 0; k <= n_particles; ++k) v[k] = static_cast<double>(k) / n_particles;
  return {WeightKind::custom, 0.0, std::move(v)};
}

WeightFunction WeightFunction::m(int n_particles, double xi) {
  check_weight_args(n_particles, xi);
  return {WeightKind::m, xi, m_table(n_particles, xi)};
}

WeightFunction WeightFunction::m_a(int n_particles, double xi) {
  check_weight_args(n_particles, xi);
  std::vector<double> v(static_cast<std::size_t>(n_particles) + 1, 0.0);
  for (int k = 0; k < n_particles; ++k) v[k] = -scaled_m_diff(n_particles, xi, k + 1, k) / n_particles;
  return {WeightKind::m_a, xi, std::move(v)};
}

WeightFunction WeightFunction::m_b(int n_particles, double xi) {
  check_weight_args(n_particles, xi);
  std::vector<double> v(static_cast<std::size_t>(n_particles) + 1, 0.0);
  for (int k = 0; k + 2 <= n_particles; ++k) v[k] = -scaled_m_diff(n_particles, xi, k + 2, k) / n_particles;
  return {WeightKind::m_b, xi, std::move(v)};
}

WeightFunction WeightFunction::l(int n_particles, double xi) {
  check_weight_args(n_particles, xi);
  std::vector<double> v(static_cast<std::size_t>(n_particles) + 1, 0.0);
  for (int k = 1; k <= n_particles; ++k) {
    double a = scaled_m_diff(n_particles, xi, k, k - 1);
    if (k >= 2) a = std::max(a, scaled_m_diff(n_particles, xi, k, k - 2));
    v[k] = a;
  }
  return {WeightKind::l, xi, std::move(v)};
}

WeightFunction WeightFunction::custom(std::vector<double> values) {
  if (values.size() < 2) throw DomainError("custom weight needs values for k = 0..N with N >= 1");
  for (double x : values)
    if (!(x >= 0.0)) throw DomainError("weights must be nonnegative");
  return {WeightKind::custom, 0.0, std::move(values)};
}

double WeightFunction::operator()(int k) const {
  if (k < 0 || k >= static_cast<int>(values_.size())) return 0.0;
  return values_[k];
}

double WeightFunction::sup() const {
  double s = 0.0;
  for (double x : values_) s = std::max(s, std::abs(x));
  return s;
}

// ------------------------------------------------------- counting / alpha

double CountingDistribution::total() const { return std::accumulate(probs.begin(), probs.end(), 0.0); }

namespace {

struct TupleCodec {
  int m;
  std::uint64_t encode(const std::vector<int>& t) const {
    std::uint64_t k = 0;
    std::uint64_t p = 1;
    for (int a : t) {
      k += static_cast<std::uint64_t>(a) * p;
      p *= static_cast<std::uint64_t>(m);
    }
    return k;
  }
  void decode(std::uint64_t key, int len, std::vector<int>& t) const {
    t.resize(static_cast<std::size_t>(len));
    for (int i = 0; i < len; ++i) {
      t[i] = static_cast<int>(key % m);
      key /= m;
    }
  }
};

double log_factorial(int n) { return std::lgamma(n + 1.0); }

}  // namespace

CountingDistribution counting_distribution(const manybody::FockSpace& space, const manybody::State& psi,
                                           const CondensateProjector& projector, std::size_t dense_cap) {
  const int n = space.n_particles();
  const int m = space.n_modes();
  if (projector.size() != m) throw DomainError("projector and Fock space disagree on the mode count");
  if (static_cast<std::size_t>(psi.size()) != space.dim()) throw DomainError("state size does not match the space");
  CountingDistribution d;
  d.probs.assign(static_cast<std::size_t>(n) + 1, 0.0);

  if (projector.mode_index >= 0) {
    d.source = "sector";
    for (std::size_t i = 0; i < space.dim(); ++i) {
      const double w = std::norm(psi(static_cast<Eigen::Index>(i)));
      if (w == 0.0) continue;
      const int c = space.occupations(i)[projector.mode_index];
      d.probs[n - c] += w;
    }
    return d;
  }

  // F_j = || a_phi^j psi ||^2 in the occupation representation.
  d.source = "factorial-moment";
  TupleCodec codec{m};
  std::unordered_map<std::uint64_t, cplx> cur;
  cur.reserve(space.dim());
  for (std::size_t i = 0; i < space.dim(); ++i)
    if (psi(static_cast<Eigen::Index>(i)) != 0.0) cur[space.key(i)] = psi(static_cast<Eigen::Index>(i));
  std::vector<int> tup;
  std::vector<int> nxt;
  std::vector<double> f(static_cast<std::size_t>(n) + 1, 0.0);
  for (const auto& kv : cur) f[0] += std::norm(kv.second);
  for (int j = 1; j <= n; ++j) {
    const int len = n - j + 1;
    std::unordered_map<std::uint64_t, cplx> out;
    for (const auto& kv : cur) {
      codec.decode(kv.first, len, tup);
      for (int pos = 0; pos < len; ++pos) {
        const int a = tup[pos];
        if (pos > 0 && tup[pos - 1] == a) continue;
        const cplx ca = std::conj(projector.phi(a));
        if (ca == 0.0) continue;
        int occ = 0;
        for (int b : tup) occ += (b == a);
        nxt.clear();
        for (int q = 0; q < len; ++q)
          if (q != pos) nxt.push_back(tup[q]);
        out[codec.encode(nxt)] += ca * std::sqrt(static_cast<double>(occ)) * kv.second;
      }
      if (out.size() > dense_cap) throw SizeError("factorial-moment expansion exceeds the state cap");
    }
    cur.swap(out);
    for (const auto& kv : cur) f[j] += std::norm(kv.second);
  }
  // P(c condensed) = sum_{j >= c} (-1)^{j-c} C(j, c) F_j / j!
  for (int c = 0; c <= n; ++c) {
    double s = 0.0;
    for (int j = c; j <= n; ++j) {
      const double lc = log_factorial(j) - log_factorial(c) - log_factorial(j - c) - log_factorial(j);
      s += ((j - c) % 2 == 0 ? 1.0 : -1.0) * std::exp(lc) * f[j];
    }
    d.probs[n - c] = s;
  }
  return d;
}

double alpha(const CountingDistribution& dist, const WeightFunction& weight, int shift) {
  const int n = static_cast<int>(dist.probs.size()) - 1;
  if (weight.n_particles() != n) throw DomainError("weight and distribution disagree on N");
  double s = 0.0;
  for (int k = 0; k <= n; ++k) s += weight.shifted(k, shift) * dist.probs[k];
  return s;
}

AlphaXi alpha_xi(const CountingDistribution& dist, double e_psi, double e_phi, double xi) {
  const int n = static_cast<int>(dist.probs.size()) - 1;
  AlphaXi r;
  r.alpha_m = alpha(dist, WeightFunction::m(n, xi));
  r.energy_gap = std::abs(e_psi - e_phi);
  r.value = r.alpha_m + r.energy_gap;
  return r;
}

WeightNormReport weight_norm_checks(int n_particles, double xi) {
  const auto l = WeightFunction::l(n_particles, xi);
  WeightNormReport r;
  r.n_particles = n_particles;
  r.xi = xi;
  r.l_bound = std::pow(static_cast<double>(n_particles), xi);
  for (int k = 0; k <= n_particles; ++k) {
    const double lk = l(k);
    const double lnk = lk * std::sqrt(static_cast<double>(k) / n_particles);
    if (lk > r.l_norm) {
      r.l_norm = lk;
      r.argmax_l = k;
    }
    if (lnk > r.ln_norm) {
      r.ln_norm = lnk;
      r.argmax_ln = k;
    }
  }
  r.l_ok = r.l_norm <= r.l_bound;
  return r;
}

RateBridge rate_bridge(double alpha_n2, double trace_distance, double slack) {
  RateBridge b;
  b.alpha_n2 = alpha_n2;
  b.trace_distance = trace_distance;
  b.upper = std::sqrt(8.0 * std::max(0.0, alpha_n2));
  b.holds = alpha_n2 <= trace_distance + slack && trace_distance <= b.upper + slack;
  return b;
}

RateBridge rate_bridge(const manybody::FockSpace& space, const manybody::State& psi,
                       const CondensateProjector& projector, double slack) {
  const auto dist = counting_distribution(space, psi, projector);
  const double a = alpha(dist, WeightFunction::n_squared(space.n_particles()));
  const auto gamma = manybody::reduced_density_1(space, psi);
  return rate_bridge(a, manybody::trace_distance(gamma, projector.phi), slack);
}

// ------------------------------------------------------------------ dense

namespace dense {

TensorSpace TensorSpace::make(int n, int d, std::size_t cap) {
  if (n < 1 || d < 1) throw DomainError("tensor space needs N >= 1 and d >= 1");
  const double dim = std::pow(static_cast<double>(d), n);
  if (dim > static_cast<double>(cap)) {
    throw SizeError("dense tensor space of dimension " + std::to_string(dim) + " exceeds the cap");
  }
  return {n, d};
}

Eigen::Index TensorSpace::dim() const {
  Eigen::Index r = 1;
  for (int i = 0; i < n; ++i) r *= d;
  return r;
}

namespace {

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd r(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return r;
}

// slot 0 is the most significant tensor factor
Eigen::MatrixXcd product(const std::vector<const Eigen::MatrixXcd*>& ops) {
  Eigen::MatrixXcd r = *ops[0];
  for (std::size_t i = 1; i < ops.size(); ++i) r = kron(r, *ops[i]);
  return r;
}

}  // namespace

Eigen::MatrixXcd site(const TensorSpace& s, int j, const Eigen::MatrixXcd& op) {
  if (j < 0 || j >= s.n) throw DomainError("site index out of range");
  if (op.rows() != s.d || op.cols() != s.d) throw DomainError("site operator has the wrong dimension");
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(s.d, s.d);
  std::vector<const Eigen::MatrixXcd*> ops(static_cast<std::size_t>(s.n), &id);
  ops[j] = &op;
  return product(ops);
}

Eigen::MatrixXcd counting(const TensorSpace& s, const Eigen::MatrixXcd& p, int k) {
  const Eigen::Index dim = s.dim();
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(dim, dim);
  if (k < 0 || k > s.n) return r;
  const Eigen::MatrixXcd q = Eigen::MatrixXcd::Identity(s.d, s.d) - p;
  std::vector<const Eigen::MatrixXcd*> ops(static_cast<std::size_t>(s.n));
  for (unsigned mask = 0; mask < (1u << s.n); ++mask) {
    if (std::popcount(mask) != k) continue;
    for (int j = 0; j < s.n; ++j) ops[j] = (mask >> j) & 1u ? &q : &p;
    r += product(ops);
  }
  return r;
}

Eigen::MatrixXcd weighted(const TensorSpace& s, const Eigen::MatrixXcd& p, const WeightFunction& f, int d) {
  const Eigen::Index dim = s.dim();
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(dim, dim);
  for (int k = 0; k <= s.n; ++k) {
    const double w = f.shifted(k, d);
    if (w != 0.0) r += w * counting(s, p, k);
  }
  return r;
}

Eigen::VectorXcd embed(const TensorSpace& s, const manybody::FockSpace& space, const manybody::State& psi) {
  if (space.n_particles() != s.n || space.n_modes() != s.d) throw DomainError("Fock space does not match the tensor space");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(s.dim());
  std::vector<int> tup;
  std::vector<int> perm;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const cplx c = psi(static_cast<Eigen::Index>(i));
    if (c == 0.0) continue;
    space.decode(space.key(i), tup);
    perm = tup;
    std::sort(perm.begin(), perm.end());
    // amplitude per ordering: c sqrt(prod n_a! / N!)
    const auto occ = space.occupations(i);
    double lf = -log_factorial(s.n);
    for (int o : occ) lf += log_factorial(o);
    const cplx amp = c * std::exp(0.5 * lf);
    do {
      Eigen::Index idx = 0;
      for (int a : perm) idx = idx * s.d + a;
      v(idx) = amp;
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return v;
}

Eigen::VectorXcd symmetrize(const TensorSpace& s, const Eigen::VectorXcd& v) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(s.dim());
  std::vector<int> digits(static_cast<std::size_t>(s.n));
  std::vector<int> order(static_cast<std::size_t>(s.n));
  double count = 0.0;
  std::iota(order.begin(), order.end(), 0);
  do {
    for (Eigen::Index i = 0; i < s.dim(); ++i) {
      Eigen::Index r = i;
      for (int j = s.n - 1; j >= 0; --j) {
        digits[j] = static_cast<int>(r % s.d);
        r /= s.d;
      }
      Eigen::Index idx = 0;
      for (int j = 0; j < s.n; ++j) idx = idx * s.d + digits[order[j]];
      out(idx) += v(i);
    }
    count += 1.0;
  } while (std::next_permutation(order.begin(), order.end()));
  return out / count;
}

CountingDistribution counting_distribution(const TensorSpace& s, const Eigen::VectorXcd& psi,
                                           const Eigen::MatrixXcd& p) {
  CountingDistribution d;
  d.source = "dense";
  for (int k = 0; k <= s.n; ++k) d.probs.push_back(psi.dot(counting(s, p, k) * psi).real());
  return d;
}

}  // namespace dense

}  // namespace dimred::projectors

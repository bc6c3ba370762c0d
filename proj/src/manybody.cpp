#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "dimred/errors.hpp"
#include "dimred/manybody.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace dimred::manybody {

// ---------------------------------------------------------------- FockSpace

FockSpace::FockSpace(int n_particles, int n_modes, std::vector<std::uint64_t> keys)
    : n_(n_particles), m_(n_modes), keys_(std::move(keys)) {
  if (n_ < 1 || m_ < 1) throw DomainError("Fock space needs N >= 1 and M >= 1");
  if (static_cast<double>(n_) * std::log2(static_cast<double>(m_)) >= 63.0) {
    throw SizeError("M^N exceeds the 64-bit state key; reduce N or the mode count");
  }
  pow_.resize(static_cast<std::size_t>(n_) + 1);
  pow_[0] = 1;
  for (int i = 1; i <= n_; ++i) pow_[i] = pow_[i - 1] * static_cast<std::uint64_t>(m_);
  std::sort(keys_.begin(), keys_.end());
}

namespace {

struct Enumerator {
  const ModeBasis* basis;
  int n;
  int m;
  const Sector* sector;
  std::size_t cap;
  std::vector<int> tuple;
  std::vector<std::uint64_t> keys;
  std::vector<std::uint64_t> pow;

  bool momentum_ok(int k) const {
    if (sector->momenta.empty()) return true;
    for (int want : sector->momenta) {
      if (sector->modulus == 0 ? k == want
                               : ((k - want) % sector->modulus + sector->modulus) % sector->modulus == 0)
        return true;
    }
    return false;
  }

  void run(int pos, int start, int ksum, int par, std::uint64_t key) {
    if (pos == n) {
      if (basis != nullptr) {
        if (!momentum_ok(ksum)) return;
        if (sector->parity != 0 && par != sector->parity) return;
      }
      if (keys.size() >= cap) {
        throw SizeError("symmetric sector exceeds the cap of " + std::to_string(cap) +
                        " states; reduce N or the mode counts");
      }
      keys.push_back(key);
      return;
    }
    for (int a = start; a < m; ++a) {
      int k = ksum;
      int p = par;
      if (basis != nullptr) {
        k += basis->label(a).m;
        p *= basis->transverse_parity(a);
      }
      run(pos + 1, a, k, p, key + static_cast<std::uint64_t>(a) * pow[pos]);
    }
  }
};

}  // namespace

FockSpace FockSpace::build(const ModeBasis& basis, int n_particles, const Sector& sector,
                           std::size_t cap) {
  if (sector.parity != 0 && sector.parity != 1 && sector.parity != -1) {
    throw DomainError("sector parity must be -1, 0 or +1");
  }
  FockSpace probe(n_particles, basis.size(), {});
  Enumerator e{&basis, n_particles, basis.size(), &sector, cap, {}, {}, probe.pow_};
  e.run(0, 0, 0, 1, 0);
  if (e.keys.empty()) throw DomainError("sector contains no states");
  return FockSpace(n_particles, basis.size(), std::move(e.keys));
}

FockSpace FockSpace::full(int n_particles, int n_modes, std::size_t cap) {
  FockSpace probe(n_particles, n_modes, {});
  Sector any;
  Enumerator e{nullptr, n_particles, n_modes, &any, cap, {}, {}, probe.pow_};
  e.run(0, 0, 0, 1, 0);
  return FockSpace(n_particles, n_modes, std::move(e.keys));
}

std::size_t FockSpace::find(std::uint64_t key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return npos;
  return static_cast<std::size_t>(it - keys_.begin());
}

void FockSpace::decode(std::uint64_t key, std::vector<int>& tuple) const {
  tuple.resize(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    tuple[i] = static_cast<int>(key % m_);
    key /= m_;
  }
}

std::uint64_t FockSpace::encode(const std::vector<int>& tuple) const {
  std::uint64_t k = 0;
  for (int i = 0; i < n_; ++i) k += static_cast<std::uint64_t>(tuple[i]) * pow_[i];
  return k;
}

std::vector<int> FockSpace::occupations(std::size_t i) const {
  std::vector<int> t;
  decode(keys_[i], t);
  std::vector<int> occ(static_cast<std::size_t>(m_), 0);
  for (int a : t) ++occ[a];
  return occ;
}

std::size_t FockSpace::find_occupations(const std::vector<int>& occ) const {
  std::uint64_t k = 0;
  int pos = 0;
  for (int a = 0; a < m_; ++a) {
    for (int c = 0; c < occ[a]; ++c) {
      if (pos >= n_) return npos;
      k += static_cast<std::uint64_t>(a) * pow_[pos++];
    }
  }
  if (pos != n_) return npos;
  return find(k);
}

// -------------------------------------------------------------- Hamiltonian

namespace {

// Sparse occupation with fast key updates. Modes sorted ascending.
struct Occ {
  std::vector<int> n;  // dense occupations
  std::vector<int> occupied;
};

std::uint64_t key_of(const std::vector<int>& occ, const std::vector<std::uint64_t>& pw) {
  std::uint64_t k = 0;
  int pos = 0;
  for (std::size_t a = 0; a < occ.size(); ++a)
    for (int c = 0; c < occ[a]; ++c) k += static_cast<std::uint64_t>(a) * pw[pos++];
  return k;
}

}  // namespace

Hamiltonian Hamiltonian::build(const ModeBasis& basis, const FockSpace& space, double t,
                               bool include_external) {
  const int m = basis.size();
  if (space.n_modes() != m) throw DomainError("Fock space and mode basis disagree on M");
  Eigen::MatrixXcd h1;
  if (include_external) {
    h1 = basis.one_body(t);
  } else {
    h1 = Eigen::MatrixXcd::Zero(m, m);
    for (int a = 0; a < m; ++a) {
      const double k = basis.wavenumber(a);
      h1(a, a) = k * k + basis.transverse_energy(basis.label(a).n);
    }
  }
  const double hscale = std::max(1.0, h1.cwiseAbs().maxCoeff());
  double max_imag = 0.0;
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) max_imag = std::max(max_imag, std::abs(h1(a, b).imag()));
  Hamiltonian H;
  H.real_ = max_imag <= 1e-14 * hscale;
  H.dim_ = space.dim();

  // One-body hops a -> b (b != a) with nonzero amplitude.
  std::vector<std::vector<std::pair<int, cplx>>> hops(m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b)
      if (a != b && std::abs(h1(b, a)) > 1e-14 * hscale) hops[a].push_back({b, h1(b, a)});

  // Pairs grouped by (momentum, parity); W-hat coefficients.
  const int mod = basis.momentum_modulus();
  auto pair_class = [&](int a, int b) {
    int k = basis.label(a).m + basis.label(b).m;
    if (mod != 0) k = ((k % mod) + mod) % mod;
    const int p = basis.transverse_parity(a) * basis.transverse_parity(b);
    return std::pair<int, int>(k, p);
  };
  std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> classes;
  for (int a = 0; a < m; ++a)
    for (int b = a; b < m; ++b) classes[pair_class(a, b)].push_back({a, b});
  auto what = [&](int a, int b, int c, int d) {
    if (a < b && c < d) return basis.w(a, b, c, d) + basis.w(a, b, d, c);
    if (a == b && c < d) return basis.w(a, a, c, d);
    if (a < b && c == d) return basis.w(a, b, c, c);
    return 0.5 * basis.w(a, a, c, c);
  };
  const bool two_body = !basis.interaction_zero();
  // Parity classes only pair modes of equal product parity when the
  // confinement is reflection symmetric; otherwise fall back to all pairs.
  std::vector<std::pair<int, int>> all_pairs;
  bool parity_ok = true;
  for (int a = 0; a < m; ++a)
    if (basis.transverse_parity(a) == 0) parity_ok = false;
  if (!parity_ok) {
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b) all_pairs.push_back({a, b});
  }

  std::vector<std::uint64_t> pw(static_cast<std::size_t>(space.n_particles()) + 1);
  pw[0] = 1;
  for (int i = 1; i <= space.n_particles(); ++i) pw[i] = pw[i - 1] * static_cast<std::uint64_t>(m);

  constexpr std::size_t kBlockRows = 4096;
  std::vector<std::pair<std::uint32_t, cplx>> row;
  std::vector<int> occ(static_cast<std::size_t>(m));
  std::vector<int> tuple;
  const double drop = 1e-15 * hscale;
  for (std::size_t r0 = 0; r0 < space.dim(); r0 += kBlockRows) {
    Block blk;
    blk.row0 = r0;
    const std::size_t r1 = std::min(space.dim(), r0 + kBlockRows);
    blk.ptr.reserve(r1 - r0 + 1);
    blk.ptr.push_back(0);
    for (std::size_t i = r0; i < r1; ++i) {
      row.clear();
      space.decode(space.key(i), tuple);
      std::fill(occ.begin(), occ.end(), 0);
      for (int a : tuple) ++occ[a];
      std::vector<int> occupied;
      for (int a = 0; a < m; ++a)
        if (occ[a] > 0) occupied.push_back(a);

      cplx diag = 0.0;
      for (int a : occupied) diag += static_cast<double>(occ[a]) * h1(a, a);
      row.push_back({static_cast<std::uint32_t>(i), diag});

      // column i of H: <j| h_ba a_b^dag a_a |i>
      for (int a : occupied) {
        for (const auto& [b, amp] : hops[a]) {
          const double f = std::sqrt(static_cast<double>(occ[a]) * (occ[b] + 1));
          --occ[a];
          ++occ[b];
          const std::size_t j = space.find(key_of(occ, pw));
          ++occ[a];
          --occ[b];
          if (j == FockSpace::npos) {
            throw DomainError("one-body term leaves the sector; widen the allowed momenta");
          }
          if (j >= i) row.push_back({static_cast<std::uint32_t>(j), std::conj(amp * f)});
        }
      }
      if (two_body) {
        for (std::size_t ic = 0; ic < occupied.size(); ++ic) {
          for (std::size_t id = ic; id < occupied.size(); ++id) {
            const int c = occupied[ic];
            const int d = occupied[id];
            if (c == d && occ[c] < 2) continue;
            const double f1 = c < d ? std::sqrt(double(occ[c]) * occ[d]) : std::sqrt(double(occ[c]) * (occ[c] - 1));
            --occ[c];
            --occ[d];
            const auto& targets = parity_ok ? classes[pair_class(c, d)] : all_pairs;
            for (const auto& [a, b] : targets) {
              const double wv = what(a, b, c, d);
              if (wv == 0.0) continue;
              ++occ[a];
              ++occ[b];
              const double f2 = a < b ? std::sqrt(double(occ[a]) * occ[b]) : std::sqrt(double(occ[a]) * (occ[a] - 1));
              const std::size_t j = space.find(key_of(occ, pw));
              --occ[a];
              --occ[b];
              if (j == FockSpace::npos) {
                if (std::abs(wv * f1 * f2) > drop) {
                  throw DomainError("interaction term leaves the sector; widen the allowed momenta");
                }
                continue;
              }
              if (j >= i) row.push_back({static_cast<std::uint32_t>(j), cplx(wv * f1 * f2, 0.0)});
            }
            ++occ[c];
            ++occ[d];
          }
        }
      }
      std::sort(row.begin(), row.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
      std::size_t w = 0;
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (w > 0 && row[w - 1].first == row[k].first) {
          row[w - 1].second += row[k].second;
        } else {
          row[w++] = row[k];
        }
      }
      row.resize(w);
      for (const auto& [j, v] : row) {
        if (j != i && std::abs(v) <= drop) continue;
        blk.col.push_back(j);
        if (H.real_) blk.re.push_back(v.real());
        else blk.cx.push_back(v);
      }
      blk.ptr.push_back(static_cast<std::uint32_t>(blk.col.size()));
    }
    H.nnz_ += blk.col.size();
    blk.col.shrink_to_fit();
    blk.re.shrink_to_fit();
    blk.cx.shrink_to_fit();
    H.blocks_.push_back(std::move(blk));
  }
  return H;
}

void Hamiltonian::apply(const State& x, State& y) const {
  y.setZero(static_cast<Eigen::Index>(dim_));
  const cplx* xp = x.data();
  cplx* yp = y.data();
  for (const auto& blk : blocks_) {
    const std::size_t rows = blk.ptr.size() - 1;
    for (std::size_t r = 0; r < rows; ++r) {
      const std::size_t i = blk.row0 + r;
      const cplx xi = xp[i];
      cplx acc = 0.0;
      for (std::uint32_t k = blk.ptr[r]; k < blk.ptr[r + 1]; ++k) {
        const std::uint32_t j = blk.col[k];
        if (real_) {
          const double v = blk.re[k];
          if (j == i) {
            acc += v * xi;
          } else {
            acc += v * xp[j];
            yp[j] += v * xi;
          }
        } else {
          const cplx v = blk.cx[k];
          if (j == i) {
            acc += v.real() * xi;
          } else {
            acc += v * xp[j];
            yp[j] += std::conj(v) * xi;
          }
        }
      }
      yp[i] += acc;
    }
  }
}

double Hamiltonian::expectation(const State& x) const {
  State y;
  apply(x, y);
  return x.dot(y).real();
}

double Hamiltonian::diagonal_imag_max() const {
  double m = 0.0;
  if (real_) return 0.0;
  for (const auto& blk : blocks_) {
    for (std::size_t r = 0; r + 1 < blk.ptr.size(); ++r)
      for (std::uint32_t k = blk.ptr[r]; k < blk.ptr[r + 1]; ++k)
        if (blk.col[k] == blk.row0 + r) m = std::max(m, std::abs(blk.cx[k].imag()));
  }
  return m;
}

Eigen::MatrixXcd Hamiltonian::dense() const {
  if (dim_ > 5000) throw SizeError("dense Hamiltonian copy limited to 5000 states");
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (const auto& blk : blocks_) {
    for (std::size_t r = 0; r + 1 < blk.ptr.size(); ++r) {
      const std::size_t i = blk.row0 + r;
      for (std::uint32_t k = blk.ptr[r]; k < blk.ptr[r + 1]; ++k) {
        const std::uint32_t j = blk.col[k];
        const cplx v = real_ ? cplx(blk.re[k], 0.0) : blk.cx[k];
        d(i, j) = v;
        if (j != i) d(j, i) = std::conj(v);
      }
    }
  }
  return d;
}

// ------------------------------------------------------------------- Krylov

void krylov_step(const Hamiltonian& h, State& psi, double tau, const KrylovOptions& opts,
                 KrylovStats& stats) {
  const double nrm = psi.norm();
  if (nrm == 0.0 || tau == 0.0) return;
  const int mmax = std::max(2, std::min<int>(opts.max_dim, static_cast<int>(h.dim())));
  std::vector<State> v;
  v.reserve(static_cast<std::size_t>(mmax) + 1);
  double remaining = tau;
  const double sign = tau > 0 ? 1.0 : -1.0;
  remaining = std::abs(tau);
  int stalls = 0;
  while (remaining > 0.0) {
    v.clear();
    v.push_back(psi / psi.norm());
    std::vector<double> alpha;
    std::vector<double> beta;
    State w;
    bool breakdown = false;
    for (int j = 0; j < mmax; ++j) {
      h.apply(v[j], w);
      ++stats.matvecs;
      const double a = v[j].dot(w).real();
      alpha.push_back(a);
      // full reorthogonalization, two passes
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) w -= v[i].dot(w) * v[i];
      const double b = w.norm();
      beta.push_back(b);
      if (b <= 1e-13 * std::max(1.0, std::abs(a))) {
        breakdown = true;
        break;
      }
      if (j + 1 < mmax) v.push_back(w / b);
    }
    const int k = static_cast<int>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (int i = 0; i < k; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    // Shifted Pade exponential keeps the small trailing coefficient accurate;
    // an eigen-expansion loses it to cancellation when |T| step is large.
    const double shift = 0.5 * (t.diagonal().maxCoeff() + t.diagonal().minCoeff());
    const Eigen::MatrixXcd ts = (t - shift * Eigen::MatrixXd::Identity(k, k)).cast<cplx>();
    auto coeffs = [&](double step) {
      const Eigen::MatrixXcd e = (cplx(0.0, -sign * step) * ts).exp();
      return Eigen::VectorXcd(std::polar(1.0, -sign * shift * step) * e.col(0));
    };
    double step = remaining;
    Eigen::VectorXcd c = coeffs(step);
    double err = breakdown ? 0.0 : beta[k - 1] * std::abs(c(k - 1));
    while (!breakdown && err > opts.tol * step) {
      step *= 0.5;
      c = coeffs(step);
      err = beta[k - 1] * std::abs(c(k - 1));
      if (step < 1e-14 * std::abs(tau)) break;
    }
    if (!breakdown && err > opts.tol * step) {
      if (++stalls > 3) throw ToleranceError("Krylov propagator failed to converge");
      continue;
    }
    stats.max_error = std::max(stats.max_error, err);
    State out = State::Zero(psi.size());
    for (int i = 0; i < k; ++i) out += c(i) * v[i];
    psi = nrm * out;
    remaining -= step;
    if (remaining < 1e-15 * std::abs(tau)) remaining = 0.0;
    ++stats.substeps;
  }
}

Trajectory evolve(const ModeBasis& basis, const FockSpace& space, const State& initial,
                  const EvolveOptions& opts, const Hamiltonian* static_h) {
  if (space.dim() > opts.cap) {
    throw SizeError("sector dimension " + std::to_string(space.dim()) + " exceeds the cap " +
                    std::to_string(opts.cap) + "; reduce N or the mode counts");
  }
  if (!(opts.dt > 0.0)) throw DomainError("dt must be positive");
  if (static_cast<std::size_t>(initial.size()) != space.dim()) throw DomainError("state dimension mismatch");
  const bool td = basis.time_dependent();
  std::unique_ptr<Hamiltonian> own;
  const Hamiltonian* h = static_h;
  if (!td && h == nullptr) {
    own = std::make_unique<Hamiltonian>(Hamiltonian::build(basis, space, 0.0));
    h = own.get();
  }
  const long nsteps = std::lround(opts.t_final / opts.dt);
  const double dt = nsteps > 0 ? opts.t_final / nsteps : 0.0;

  Trajectory tr;
  State psi = initial;
  auto record = [&](double t, const Hamiltonian& hh) {
    tr.rows.push_back({t, psi.norm(), hh.expectation(psi)});
    if (opts.record_every > 0) tr.states.push_back(psi);
  };
  if (td) {
    auto h0 = Hamiltonian::build(basis, space, 0.0);
    record(0.0, h0);
  } else {
    record(0.0, *h);
  }
  for (long s = 0; s < nsteps; ++s) {
    const double t0 = s * dt;
    if (td) {
      own = std::make_unique<Hamiltonian>(Hamiltonian::build(basis, space, t0 + 0.5 * dt));
      h = own.get();
    }
    krylov_step(*h, psi, dt, opts.krylov, tr.stats);
    const double n = psi.norm();
    tr.max_norm_drift_per_time = std::max(tr.max_norm_drift_per_time, std::abs(n - 1.0) / dt);
    if (!std::isfinite(n)) throw InstabilityError("many-body state became non-finite");
    psi /= n;
    const bool last = s + 1 == nsteps;
    if (last || (opts.record_every > 0 && (s + 1) % opts.record_every == 0)) {
      if (td) {
        auto hr = Hamiltonian::build(basis, space, t0 + dt);
        record(t0 + dt, hr);
      } else {
        record(t0 + dt, *h);
      }
    }
  }
  tr.final_state = psi;
  return tr;
}

// ------------------------------------------------------------- observables

Eigen::MatrixXcd reduced_density_1(const FockSpace& space, const State& psi) {
  const int m = space.n_modes();
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m, m);
  std::vector<int> tuple;
  std::vector<int> occ(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const cplx ci = psi(static_cast<Eigen::Index>(i));
    if (ci == 0.0) continue;
    space.decode(space.key(i), tuple);
    std::fill(occ.begin(), occ.end(), 0);
    for (int a : tuple) ++occ[a];
    for (int a = 0; a < m; ++a) {
      if (occ[a] == 0) continue;
      g(a, a) += std::norm(ci) * static_cast<double>(occ[a]);
      for (int b = 0; b < m; ++b) {
        if (b == a) continue;
        const double f = std::sqrt(static_cast<double>(occ[a]) * (occ[b] + 1));
        --occ[a];
        ++occ[b];
        const std::size_t j = space.find_occupations(occ);
        ++occ[a];
        --occ[b];
        if (j == FockSpace::npos) continue;
        g(a, b) += std::conj(psi(static_cast<Eigen::Index>(j))) * ci * f;
      }
    }
  }
  return g / static_cast<double>(space.n_particles());
}

Eigen::MatrixXcd reduced_density_2(const FockSpace& space, const State& psi) {
  const int m = space.n_modes();
  const int n = space.n_particles();
  if (n < 2) throw DomainError("two-body density needs N >= 2");
  if (m > 64 || static_cast<double>(space.dim()) * m * m * n * n > 2e8) {
    throw SizeError("two-body density limited to small spaces");
  }
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(m * m, m * m);
  std::vector<int> occ;
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const cplx ci = psi(static_cast<Eigen::Index>(i));
    if (ci == 0.0) continue;
    occ = space.occupations(i);
    for (int a = 0; a < m; ++a) {
      if (occ[a] == 0) continue;
      const double fa = std::sqrt(double(occ[a]));
      --occ[a];
      for (int b = 0; b < m; ++b) {
        if (occ[b] == 0) continue;
        const double fb = std::sqrt(double(occ[b]));
        --occ[b];
        for (int c = 0; c < m; ++c) {
          for (int d = 0; d < m; ++d) {
            const double fd = std::sqrt(double(occ[d] + 1));
            ++occ[d];
            const double fc = std::sqrt(double(occ[c] + 1));
            ++occ[c];
            const std::size_t j = space.find_occupations(occ);
            --occ[c];
            --occ[d];
            if (j == FockSpace::npos) continue;
            g(a * m + b, c * m + d) += std::conj(psi(static_cast<Eigen::Index>(j))) * ci * fa * fb * fc * fd;
          }
        }
        ++occ[b];
      }
      ++occ[a];
    }
  }
  return g / (static_cast<double>(n) * (n - 1));
}

double renormalized_energy(const ModeBasis& basis, const Hamiltonian& h, const State& psi) {
  const double n = psi.squaredNorm();
  return h.expectation(psi) / n / basis.point().n_particles() - basis.ground_energy_scaled();
}

State product_state(const FockSpace& space, const Eigen::VectorXcd& phi, double leak_tol) {
  if (phi.size() != space.n_modes()) throw DomainError("one-body vector has the wrong length");
  const Eigen::VectorXcd u = phi / phi.norm();
  const int n = space.n_particles();
  State s(static_cast<Eigen::Index>(space.dim()));
  std::vector<double> lfact(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 1; k <= n; ++k) lfact[k] = lfact[k - 1] + std::log(double(k));
  for (std::size_t i = 0; i < space.dim(); ++i) {
    const auto occ = space.occupations(i);
    cplx amp = 1.0;
    double lf = lfact[n];
    for (int a = 0; a < space.n_modes(); ++a) {
      if (occ[a] == 0) continue;
      amp *= std::pow(u(a), occ[a]);
      lf -= lfact[occ[a]];
    }
    s(static_cast<Eigen::Index>(i)) = amp * std::exp(0.5 * lf);
  }
  const double kept = s.squaredNorm();
  if (1.0 - kept > leak_tol) {
    throw DomainError("product state leaks " + std::to_string(1.0 - kept) +
                      " of its norm outside the sector");
  }
  return s / std::sqrt(kept);
}

Eigen::VectorXcd condensate_coefficients(const ModeBasis& basis, const nls::CondensateState& phi) {
  if (std::abs(phi.grid.length - basis.box_length()) > 1e-12 * basis.box_length()) {
    throw DomainError("condensate box length differs from the mode basis");
  }
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(basis.size());
  const double dx = phi.grid.dx();
  const double pref = dx / std::sqrt(basis.box_length());
  for (int a = 0; a < basis.size(); ++a) {
    if (basis.label(a).n != 0) continue;
    const double k = basis.wavenumber(a);
    cplx s = 0.0;
    for (int j = 0; j < phi.grid.points; ++j) s += std::polar(1.0, -k * phi.grid.x(j)) * phi.values[j];
    c(a) = pref * s;
  }
  return c;
}

double excited_population(const ModeBasis& basis, const Eigen::MatrixXcd& gamma1) {
  double s = 0.0;
  for (int a = 0; a < basis.size(); ++a)
    if (basis.label(a).n > 0) s += gamma1(a, a).real();
  return s;
}

double trace_norm(const Eigen::MatrixXcd& hermitian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const Eigen::MatrixXcd& gamma, const Eigen::VectorXcd& phi) {
  const Eigen::VectorXcd u = phi / phi.norm();
  return trace_norm(gamma - u * u.adjoint());
}

}  // namespace dimred::manybody

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "dimred/errors.hpp"
#include "dimred/manybody.hpp"
#include "dimred/quadrature.hpp"

namespace dimred::manybody {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Cubic Lagrange interpolation of samples f[j] taken at u = (j - j0) * h.
double interp_cubic(const std::vector<double>& f, int j0, double h, double u) {
  const double p = u / h + j0;
  int i = static_cast<int>(std::floor(p)) - 1;
  const int n = static_cast<int>(f.size());
  i = std::clamp(i, 0, n - 4);
  const double t = p - i;
  const double l0 = -(t - 1) * (t - 2) * (t - 3) / 6.0;
  const double l1 = t * (t - 2) * (t - 3) / 2.0;
  const double l2 = -t * (t - 1) * (t - 3) / 2.0;
  const double l3 = t * (t - 1) * (t - 2) / 6.0;
  return l0 * f[i] + l1 * f[i + 1] + l2 * f[i + 2] + l3 * f[i + 3];
}

}  // namespace

int ModeBasis::index(int m, int n) const {
  const int im = m - mmin_;
  if (im < 0 || im >= mx_ || n < 0 || n >= my_) return -1;
  return im * my_ + n;
}

double ModeBasis::wavenumber(int a) const { return two_pi * modes_[a].m / length_; }

int ModeBasis::wrap_q(int q) const {
  if (modulus_ == 0) return q + qoff_;
  return ((q % modulus_) + modulus_) % modulus_;
}

double ModeBasis::w(int a, int b, int c, int d) const {
  if (interaction_zero_) return 0.0;
  const auto& la = modes_[a];
  const auto& lb = modes_[b];
  const auto& lc = modes_[c];
  const auto& ld = modes_[d];
  int dk = la.m + lb.m - lc.m - ld.m;
  if (modulus_ != 0) dk %= modulus_;
  if (dk != 0) return 0.0;
  const int t = ((la.n * my_ + lc.n) * my_ + lb.n) * my_ + ld.n;
  return ftab_[static_cast<std::size_t>(t) * qcount_ + wrap_q(lc.m - la.m)];
}

ModeBasis ModeBasis::build(const scaling::ScalingPoint& point,
                           const potentials::ConfinementPotential& confinement,
                           const potentials::ExternalPotential& external,
                           const potentials::ScaledInteraction& interaction, const BasisOptions& opts) {
  const int d = interaction.transverse_dim();
  if (confinement.dimension() != d || opts.transverse_grid.dim != d) {
    throw DomainError("interaction, confinement and transverse grid disagree on the transverse dimension");
  }
  if (opts.mx < 1 || opts.my < 1) throw DomainError("mode counts must be positive");
  if (!(opts.box_length > 0.0)) throw DomainError("box length must be positive");

  ModeBasis b;
  b.point_ = point;
  b.external_ = external;
  b.mx_ = opts.mx;
  b.my_ = opts.my;
  b.length_ = opts.box_length;
  b.mmin_ = opts.mx % 2 == 1 ? -(opts.mx - 1) / 2 : -opts.mx / 2;
  for (int i = 0; i < opts.mx; ++i) b.mlist_.push_back(b.mmin_ + i);
  for (int m : b.mlist_)
    for (int n = 0; n < opts.my; ++n) b.modes_.push_back({m, n});

  if (opts.quadrature == WQuadrature::grid) {
    if (opts.x_points < opts.mx) throw DomainError("grid quadrature needs x_points >= mx");
    b.x_points_ = opts.x_points;
    b.modulus_ = opts.x_points;
  } else {
    b.x_points_ = opts.x_points > 0 ? opts.x_points : std::max(4 * opts.mx, 64);
    b.modulus_ = 0;
  }

  // Transverse modes of -Delta + eps^-2 V(y/eps) are the unscaled ones dilated.
  const double eps = point.epsilon();
  auto spectrum = transverse::solve_modes(confinement, opts.transverse_grid, opts.my);
  {
    std::vector<double> chi(spectrum.modes.col(0).data(), spectrum.modes.col(0).data() + spectrum.modes.rows());
    const auto& g = opts.transverse_grid;
    double edge = 0.0;
    if (g.dim == 1) {
      edge = std::max(std::abs(chi.front()), std::abs(chi.back()));
    } else {
      for (int i = 0; i < g.n; ++i) {
        edge = std::max({edge, std::abs(chi[i]), std::abs(chi[(g.n - 1) * g.n + i]),
                         std::abs(chi[i * g.n]), std::abs(chi[i * g.n + g.n - 1])});
      }
    }
    if (edge > 1e-8) {
      throw ResolutionError("transverse ground state is " + std::to_string(edge) +
                            " at the grid boundary; increase the transverse extent");
    }
  }
  b.ygrid_ = opts.transverse_grid.scaled(eps);
  b.ymodes_ = spectrum.modes * std::pow(eps, -0.5 * d);
  for (double e : spectrum.energies) b.trans_energy_.push_back(e / (eps * eps));
  b.parity_ = spectrum.parity;
  for (int p : b.parity_) {
    if (p == 0 && confinement.reflection_symmetric()) {
      throw DegeneracyError("transverse mode without definite parity; reduce my past the degenerate shell");
    }
  }

  // Two-body table.
  const int my = opts.my;
  const int npair = my * my;
  b.qcount_ = b.modulus_ != 0 ? b.modulus_ : 2 * opts.mx - 1;
  b.qoff_ = b.modulus_ != 0 ? 0 : opts.mx - 1;
  b.ftab_.assign(static_cast<std::size_t>(npair) * npair * b.qcount_, 0.0);
  b.interaction_zero_ = interaction.profile().l1_norm() == 0.0 && interaction.profile().sup_bound() == 0.0;
  if (b.interaction_zero_) return b;

  const double range = interaction.range();
  const double dy = b.ygrid_.spacing;
  const double dx = b.length_ / b.x_points_;
  b.points_per_range_ = range / dy;
  if (opts.quadrature == WQuadrature::grid) b.points_per_range_ = std::min(b.points_per_range_, range / dx);
  if (b.points_per_range_ < opts.min_points_per_range) {
    throw ResolutionError("interaction range resolved by only " + std::to_string(b.points_per_range_) +
                          " grid points (needs " + std::to_string(opts.min_points_per_range) + ")");
  }
  if (2.0 * range >= b.length_) throw DomainError("interaction range exceeds half the box");

  const int ny = b.ygrid_.n;
  const int gsize = b.ygrid_.size();
  // Pair products g_P(y) = chi_na(y) chi_nc(y).
  std::vector<std::vector<double>> g(npair, std::vector<double>(gsize));
  for (int na = 0; na < my; ++na)
    for (int nc = 0; nc < my; ++nc)
      for (int i = 0; i < gsize; ++i) g[na * my + nc][i] = b.ymodes_(i, na) * b.ymodes_(i, nc);

  const double cell = b.ygrid_.cell();
  auto& ftab = b.ftab_;
  const int qcount = b.qcount_;
  auto qvalue = [&](int qi) {
    const int q = b.modulus_ != 0 ? qi : qi - b.qoff_;
    return two_pi * q / b.length_;
  };

  if (d == 1) {
    const int lmax = std::min(static_cast<int>(std::ceil(range / dy)) + 3, ny - 1);
    const int nshift = 2 * lmax + 1;
    // C_PQ(l) for l = -lmax..lmax
    std::vector<std::vector<double>> corr(static_cast<std::size_t>(npair) * npair,
                                          std::vector<double>(nshift, 0.0));
    for (int p = 0; p < npair; ++p) {
      for (int q = 0; q < npair; ++q) {
        auto& c = corr[static_cast<std::size_t>(p) * npair + q];
        for (int l = -lmax; l <= lmax; ++l) {
          double s = 0.0;
          for (int i = std::max(0, -l); i < std::min(ny, ny - l); ++i) s += g[p][i + l] * g[q][i];
          c[l + lmax] = s * cell;
        }
      }
    }
    std::vector<double> cq(qcount);
    std::vector<double> cu(static_cast<std::size_t>(npair) * npair);
    auto accumulate = [&](double s, double u, double weight) {
      for (int qi = 0; qi < qcount; ++qi) cq[qi] = weight * std::cos(qvalue(qi) * s);
      for (std::size_t pq = 0; pq < cu.size(); ++pq) {
        const double c = opts.quadrature == WQuadrature::grid
                             ? corr[pq][static_cast<int>(std::lround(u / dy)) + lmax]
                             : interp_cubic(corr[pq], lmax, dy, u);
        double* row = &ftab[pq * qcount];
        for (int qi = 0; qi < qcount; ++qi) row[qi] += c * cq[qi];
      }
    };
    if (opts.quadrature == WQuadrature::grid) {
      const int jmax = static_cast<int>(std::floor(range / dx));
      for (int j = -jmax; j <= jmax; ++j) {
        const double s = j * dx;
        for (int l = -lmax; l <= lmax; ++l) {
          const double u = l * dy;
          const double wv = interaction(std::sqrt(s * s + u * u));
          if (wv != 0.0) accumulate(s, u, wv * dx * dy);
        }
      }
    } else {
      std::vector<double> cuts = {0.0};
      for (double bp : interaction.profile().breakpoints()) {
        const double r = bp * point.mu();
        if (r > 0.0 && r < range) cuts.push_back(r);
      }
      cuts.push_back(range);
      const int nth = opts.angular_points;
      for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
        auto rule = quad::gauss_legendre(cuts[k], cuts[k + 1], opts.radial_panels, opts.radial_order);
        for (std::size_t r = 0; r < rule.nodes.size(); ++r) {
          const double rho = rule.nodes[r];
          const double wr = rule.weights[r] * rho * interaction(rho) * two_pi / nth;
          if (wr == 0.0) continue;
          for (int t = 0; t < nth; ++t) {
            const double th = two_pi * t / nth;
            accumulate(rho * std::cos(th), rho * std::sin(th), wr);
          }
        }
      }
    }
  } else {
    if (opts.quadrature != WQuadrature::grid) {
      throw DomainError("two transverse dimensions support grid quadrature only");
    }
    const int lmax = std::min(static_cast<int>(std::ceil(range / dy)), ny - 1);
    const int jmax = static_cast<int>(std::floor(range / dx));
    std::vector<double> cq(qcount);
    std::vector<double> cpq(static_cast<std::size_t>(npair) * npair);
    for (int l1 = -lmax; l1 <= lmax; ++l1) {
      for (int l2 = -lmax; l2 <= lmax; ++l2) {
        const double uu = dy * dy * (l1 * l1 + l2 * l2);
        if (uu > range * range) continue;
        for (int p = 0; p < npair; ++p) {
          for (int q = 0; q < npair; ++q) {
            double s = 0.0;
            for (int i = std::max(0, -l1); i < std::min(ny, ny - l1); ++i)
              for (int j = std::max(0, -l2); j < std::min(ny, ny - l2); ++j)
                s += g[p][(i + l1) * ny + j + l2] * g[q][i * ny + j];
            cpq[static_cast<std::size_t>(p) * npair + q] = s * cell;
          }
        }
        for (int j = -jmax; j <= jmax; ++j) {
          const double s = j * dx;
          const double wv = interaction(std::sqrt(s * s + uu));
          if (wv == 0.0) continue;
          for (int qi = 0; qi < qcount; ++qi) cq[qi] = wv * dx * cell * std::cos(qvalue(qi) * s);
          for (std::size_t pq = 0; pq < cpq.size(); ++pq) {
            double* row = &ftab[pq * qcount];
            for (int qi = 0; qi < qcount; ++qi) row[qi] += cpq[pq] * cq[qi];
          }
        }
      }
    }
  }
  for (auto& v : ftab) v /= b.length_;
  return b;
}

Eigen::MatrixXcd ModeBasis::external_matrix(double t) const {
  const int m = size();
  Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(m, m);
  if (external_.is_zero()) return v;
  const int xp = x_points_;
  const int gsize = ygrid_.size();
  const int d = ygrid_.dim;
  // G_{na nb}(x_j) = \int chi_na chi_nb V(t, x_j, y) dy
  std::vector<double> vals(static_cast<std::size_t>(gsize));
  std::vector<Eigen::MatrixXd> gx(xp, Eigen::MatrixXd::Zero(my_, my_));
  double y[2] = {0.0, 0.0};
  for (int j = 0; j < xp; ++j) {
    const double x = -0.5 * length_ + j * length_ / xp;
    for (int i = 0; i < gsize; ++i) {
      if (d == 1) {
        y[0] = ygrid_.coord(i);
      } else {
        y[0] = ygrid_.coord(i / ygrid_.n);
        y[1] = ygrid_.coord(i % ygrid_.n);
      }
      vals[i] = external_(t, x, std::span<const double>(y, d));
    }
    for (int na = 0; na < my_; ++na)
      for (int nb = na; nb < my_; ++nb) {
        double s = 0.0;
        for (int i = 0; i < gsize; ++i) s += ymodes_(i, na) * ymodes_(i, nb) * vals[i];
        gx[j](na, nb) = gx[j](nb, na) = s * ygrid_.cell();
      }
  }
  for (int a = 0; a < m; ++a) {
    for (int bb = 0; bb < m; ++bb) {
      const int dm = modes_[bb].m - modes_[a].m;
      cplx s = 0.0;
      for (int j = 0; j < xp; ++j) {
        const double x = -0.5 * length_ + j * length_ / xp;
        s += std::polar(gx[j](modes_[a].n, modes_[bb].n), two_pi * dm * x / length_);
      }
      v(a, bb) = s / static_cast<double>(xp);
    }
  }
  return v;
}

Eigen::MatrixXcd ModeBasis::one_body(double t) const {
  Eigen::MatrixXcd h = external_matrix(t);
  for (int a = 0; a < size(); ++a) {
    const double k = wavenumber(a);
    h(a, a) += k * k + trans_energy_[modes_[a].n];
  }
  return h;
}

}  // namespace dimred::manybody

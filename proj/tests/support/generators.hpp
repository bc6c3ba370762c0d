#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>

#include <Eigen/Dense>

#include "dimred/manybody.hpp"
#include "dimred/projectors.hpp"

namespace gen {

using cplx = std::complex<double>;

inline Eigen::VectorXcd unit_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

// A small many-body system with a factorized reference orbital.
struct DenseSystem {
  int n = 0;
  int d_phi = 0;
  int d_chi = 0;
  dimred::projectors::CondensateProjector projector;
  dimred::projectors::dense::TensorSpace space;
  Eigen::VectorXcd psi;  // symmetric, normalized
};

// N <= max_n, one-body dim d_phi * d_chi <= max_d, d^N <= cap.
inline DenseSystem dense_system(std::mt19937_64& rng, int max_n = 6, int max_d = 8, std::size_t cap = 1024) {
  std::uniform_int_distribution<int> un(1, max_n);
  DenseSystem s;
  for (;;) {
    s.n = un(rng);
    s.d_phi = std::uniform_int_distribution<int>(1, 4)(rng);
    s.d_chi = std::uniform_int_distribution<int>(1, std::max(1, max_d / s.d_phi))(rng);
    const int d = s.d_phi * s.d_chi;
    if (d < 2 || d > max_d) continue;
    if (std::pow(double(d), s.n) > double(cap)) continue;
    break;
  }
  s.projector = dimred::projectors::CondensateProjector::from_factors(unit_vector(rng, s.d_phi),
                                                                      unit_vector(rng, s.d_chi));
  s.space = dimred::projectors::dense::TensorSpace::make(s.n, s.d_phi * s.d_chi, cap);
  Eigen::VectorXcd v = dimred::projectors::dense::symmetrize(s.space, unit_vector(rng, s.space.dim()));
  s.psi = v / v.norm();
  return s;
}

// Random occupation-basis state, optionally biased toward one mode so the
// condensed fraction is spread over its whole range.
inline dimred::manybody::State fock_state(std::mt19937_64& rng, const dimred::manybody::FockSpace& space,
                                          int favoured = -1, double bias = 0.0) {
  std::normal_distribution<double> g;
  dimred::manybody::State v(static_cast<Eigen::Index>(space.dim()));
  for (std::size_t i = 0; i < space.dim(); ++i) {
    double scale = 1.0;
    if (favoured >= 0) scale = std::exp(bias * space.occupations(i)[favoured]);
    v(static_cast<Eigen::Index>(i)) = scale * cplx(g(rng), g(rng));
  }
  return v / v.norm();
}

}  // namespace gen

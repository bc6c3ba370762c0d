#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dimred/manybody.hpp"

namespace dimred::projectors {

// Reference orbital phi = Phi (x) chi in the one-body representation.
struct CondensateProjector {
  Eigen::VectorXcd phi;
  int mode_index = -1;     // >= 0 when phi is a basis vector up to a phase
  Eigen::MatrixXcd p_phi;  // |Phi><Phi| (x) 1, empty when the factors are unknown
  Eigen::MatrixXcd p_chi;  // 1 (x) |chi><chi|

  static CondensateProjector from_vector(const Eigen::VectorXcd& phi);
  static CondensateProjector from_mode(int n_modes, int index);
  // one-body index a = i_Phi * dim(chi) + i_chi
  static CondensateProjector from_factors(const Eigen::VectorXcd& big_phi, const Eigen::VectorXcd& chi);
  // Phi (x) chi^eps in a mode basis (transverse ground mode as chi).
  static CondensateProjector from_basis(const manybody::ModeBasis& basis, const nls::CondensateState& big_phi);

  int size() const { return static_cast<int>(phi.size()); }
  Eigen::MatrixXcd p() const { return phi * phi.adjoint(); }
  bool has_factors() const { return p_phi.size() > 0; }
};

enum class WeightKind { n, m, m_a, m_b, l, custom };

// f(k) tabulated for k = 0..N; zero outside.
class WeightFunction {
 public:
  static WeightFunction n(int n_particles);
  static WeightFunction n_squared(int n_particles);
  static WeightFunction m(int n_particles, double xi);
  static WeightFunction m_a(int n_particles, double xi);  // m(k) - m(k+1)
  static WeightFunction m_b(int n_particles, double xi);  // m(k) - m(k+2)
  // N max(|m(k-1) - m(k)|, |m(k-2) - m(k)|), pointwise in k
  static WeightFunction l(int n_particles, double xi);
  static WeightFunction custom(std::vector<double> values);

  WeightKind kind() const { return kind_; }
  int n_particles() const { return static_cast<int>(values_.size()) - 1; }
  double xi() const { return xi_; }
  const std::vector<double>& values() const { return values_; }
  double operator()(int k) const;
  // weight of P_k in f_d: f(k + d), zero when k + d leaves [0, N]
  double shifted(int k, int d) const { return (*this)(k + d); }
  double sup() const;  // operator norm of f-hat

 private:
  WeightFunction(WeightKind kind, double xi, std::vector<double> v) : kind_(kind), xi_(xi), values_(std::move(v)) {}
  WeightKind kind_;
  double xi_ = 0.0;
  std::vector<double> values_;
};

// m(k) branch point N^{1 - 2 xi}.
double m_branch_point(int n_particles, double xi);

struct CountingDistribution {
  std::vector<double> probs;  // <psi, P_k psi>, k = 0..N
  std::string source;
  double total() const;
};

// Sector path when phi is a basis mode; factorial moments of a_phi otherwise.
CountingDistribution counting_distribution(const manybody::FockSpace& space, const manybody::State& psi,
                                           const CondensateProjector& projector,
                                           std::size_t dense_cap = 2000000);

double alpha(const CountingDistribution& dist, const WeightFunction& weight, int shift = 0);

struct AlphaXi {
  double alpha_m = 0.0;
  double energy_gap = 0.0;
  double value = 0.0;
};
AlphaXi alpha_xi(const CountingDistribution& dist, double e_psi, double e_phi, double xi);

struct WeightNormReport {
  int n_particles = 0;
  double xi = 0.0;
  double l_norm = 0.0;    // sup_k l(k)
  double ln_norm = 0.0;   // sup_k l(k) n(k)
  double l_bound = 0.0;   // N^xi
  int argmax_l = 0;
  int argmax_ln = 0;
  bool l_ok = false;
};
WeightNormReport weight_norm_checks(int n_particles, double xi);

struct RateBridge {
  double alpha_n2 = 0.0;
  double trace_distance = 0.0;
  double upper = 0.0;  // sqrt(8 alpha_n2)
  bool holds = false;
};
// Slack on both sides of the sandwich for round-off.
RateBridge rate_bridge(const manybody::FockSpace& space, const manybody::State& psi,
                       const CondensateProjector& projector, double slack = 1e-12);
RateBridge rate_bridge(double alpha_n2, double trace_distance, double slack = 1e-12);

// Operators on the full tensor product (C^d)^{(x)N}; small systems only.
namespace dense {

struct TensorSpace {
  int n = 0;  // particles
  int d = 0;  // one-body dimension
  static TensorSpace make(int n, int d, std::size_t cap = 4096);
  Eigen::Index dim() const;
};

// 1 (x) ... op (at slot j, 0-based) ... (x) 1
Eigen::MatrixXcd site(const TensorSpace& s, int j, const Eigen::MatrixXcd& op);
// (q_1 .. q_k p_{k+1} .. p_N)_sym; zero for k outside [0, N]
Eigen::MatrixXcd counting(const TensorSpace& s, const Eigen::MatrixXcd& p, int k);
// sum_k f(k + d) P_k
Eigen::MatrixXcd weighted(const TensorSpace& s, const Eigen::MatrixXcd& p, const WeightFunction& f, int d = 0);
// Symmetric occupation state written out on the tensor product.
Eigen::VectorXcd embed(const TensorSpace& s, const manybody::FockSpace& space, const manybody::State& psi);
Eigen::VectorXcd symmetrize(const TensorSpace& s, const Eigen::VectorXcd& v);
CountingDistribution counting_distribution(const TensorSpace& s, const Eigen::VectorXcd& psi,
                                           const Eigen::MatrixXcd& p);

}  // namespace dense

}  // namespace dimred::projectors

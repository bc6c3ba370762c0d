#include "dimred/scaling.hpp"

#include <cmath>
#include <string>

#include "dimred/errors.hpp"

namespace dimred::scaling {

namespace {

void require_beta(double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw DomainError("beta must lie in (0,1), got " + std::to_string(beta));
  }
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] < v[i - 1])) return false;
  }
  return true;
}

}  // namespace

ScalingPoint::ScalingPoint(std::int64_t n, double eps, double beta)
    : n_(n), epsilon_(eps), beta_(beta) {
  density_scale_ = static_cast<double>(n) / (eps * eps);
  mu_ = std::pow(density_scale_, -beta);
}

ScalingPoint ScalingPoint::make(std::int64_t n_particles, double epsilon, double beta) {
  if (n_particles < 2) {
    throw DomainError("n_particles must be >= 2, got " + std::to_string(n_particles));
  }
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw DomainError("epsilon must lie in (0,1), got " + std::to_string(epsilon));
  }
  require_beta(beta);
  return ScalingPoint(n_particles, epsilon, beta);
}

ScalingSequence ScalingSequence::power_law(double beta, double gamma,
                                           const std::vector<std::int64_t>& ns) {
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  ScalingSequence seq;
  seq.gamma = gamma;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (i > 0 && ns[i] <= ns[i - 1]) {
      throw DomainError("n_particles must be strictly increasing along a sequence");
    }
    const double eps = std::pow(static_cast<double>(ns[i]), -gamma);
    seq.points.push_back(ScalingPoint::make(ns[i], eps, beta));
  }
  return seq;
}

ScalingSequence ScalingSequence::explicit_points(
    double beta, const std::vector<std::pair<std::int64_t, double>>& pairs) {
  ScalingSequence seq;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i > 0 && pairs[i].first <= pairs[i - 1].first) {
      throw DomainError("n_particles must be strictly increasing along a sequence");
    }
    seq.points.push_back(ScalingPoint::make(pairs[i].first, pairs[i].second, beta));
  }
  return seq;
}

RateInputs RateInputs::make(double beta, double xi, double beta1, double eta) {
  require_beta(beta);
  if (!(xi > 0.0 && xi <= beta / 4.0)) {
    throw DomainError("xi must lie in (0, beta/4], got " + std::to_string(xi));
  }
  if (!(beta1 > 0.0 && beta1 <= beta)) {
    throw DomainError("beta1 must lie in (0, beta], got " + std::to_string(beta1));
  }
  if (!(eta > 0.0)) throw DomainError("eta must be positive, got " + std::to_string(eta));
  return RateInputs{xi, beta1, eta};
}

Classification classify(const ScalingSequence& seq, double threshold) {
  if (seq.points.size() < 3) {
    throw InsufficientDataError("classify needs at least 3 points, got " +
                                std::to_string(seq.points.size()));
  }
  Classification out;
  std::vector<double> adm;
  std::vector<double> conf;
  for (const auto& p : seq.points) {
    out.evidence.push_back({p.n_particles(), p.epsilon(), p.epsilon2_over_mu(), p.mu_over_epsilon()});
    adm.push_back(p.epsilon2_over_mu());
    conf.push_back(p.mu_over_epsilon());
  }
  out.admissible = strictly_decreasing(adm) && adm.back() < threshold;
  out.moderately_confining = strictly_decreasing(conf) && conf.back() < threshold;
  return out;
}

GammaWindow power_law_window(double beta) {
  require_beta(beta);
  // eps^2/mu = N^(-2g + b(1+2g)) and mu/eps = N^(g - b(1+2g)).
  GammaWindow w{beta / (2.0 - 2.0 * beta), std::numeric_limits<double>::infinity()};
  if (beta < 0.5) w.gamma_max = beta / (1.0 - 2.0 * beta);
  return w;
}

RateBreakdown theoretical_rate(const ScalingPoint& point, const RateInputs& rate) {
  RateBreakdown r{};
  r.confinement = point.mu_over_epsilon();
  r.admissibility = std::sqrt(point.epsilon2_over_mu());
  r.depletion = std::pow(static_cast<double>(point.n_particles()), -point.beta() / 4.0);
  r.coupling = std::pow(point.density_scale(), -rate.eta);
  return r;
}

}  // namespace dimred::scaling

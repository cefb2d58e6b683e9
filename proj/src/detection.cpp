#include "ucadoa/detection.hpp"

#include <cmath>
#include <string>

#include "ucadoa/numerics.hpp"

namespace ucadoa {

void ThresholdConfig::validate() const {
  if (alpha <= 0 || alpha >= 1) throw std::invalid_argument("alpha must be in (0, 1)");
  if (noise_power <= 0) throw std::invalid_argument("noise power must be > 0");
  if (m_samples < 1) throw std::invalid_argument("need m_samples >= 1");
}

std::string EventDecision::label() const {
  if (is_omega2()) return "omega2";
  return "omega1(" + std::to_string(dead_antenna + 1) + ")";
}

double measured_power(const SnapshotSet& snap, int n) {
  if (n < 0 || n >= snap.n_antennas) throw std::invalid_argument("bad antenna index");
  double acc = 0;
  for (int m = 0; m < snap.m_samples; ++m) acc += std::norm(snap.at(n, m));
  return acc / snap.m_samples;
}

std::vector<double> measured_powers(const SnapshotSet& snap) {
  std::vector<double> p(snap.n_antennas);
  for (int n = 0; n < snap.n_antennas; ++n) p[n] = measured_power(snap, n);
  return p;
}

double threshold(const ThresholdConfig& cfg) {
  cfg.validate();
  if (cfg.technique == ThresholdTechnique::ExactChi2) {
    const double sigma_tilde2 = cfg.noise_power / (2.0 * cfg.m_samples);
    return sigma_tilde2 * chi2_cdf_inverse(2 * cfg.m_samples, 1.0 - cfg.alpha);
  }
  return cfg.noise_power *
         (1.0 + gaussian_q_inverse(cfg.alpha) / std::sqrt(static_cast<double>(cfg.m_samples)));
}

EventDecision classify(const std::vector<double>& powers, double K) {
  EventDecision d;
  d.report.powers = powers;
  d.report.threshold = K;
  int best = -1;
  for (int n = 0; n < static_cast<int>(powers.size()); ++n) {
    if (powers[n] < K) {
      d.report.below.push_back(n);
      if (best < 0 || powers[n] < powers[best]) best = n;
    }
  }
  d.dead_antenna = best;
  return d;
}

double noncentrality(cplx a_n, const std::vector<double>& signal_powers,
                     double noise_power) {
  if (noise_power <= 0) throw std::invalid_argument("noise power must be > 0");
  double acc = 0;
  for (double sp : signal_powers) acc += sp;
  return 2.0 * std::norm(a_n) * acc / noise_power;
}

double prob_h0_given_omega1(double K, double sigma2, int M) {
  if (sigma2 <= 0) throw std::invalid_argument("noise power must be > 0");
  return chi2_cdf(2 * M, K / (sigma2 / (2.0 * M)));
}

double prob_identify_event1(const SteeringVector& steering,
                            const std::vector<double>& signal_powers,
                            double sigma2, double K, int M) {
  int dead = -1;
  for (int n = 0; n < static_cast<int>(steering.compound.size()); ++n) {
    if (std::abs(steering.compound[n]) < 1e-12) {
      if (dead >= 0)
        throw std::invalid_argument("more than one dead steering element");
      dead = n;
    }
  }
  if (dead < 0) throw std::invalid_argument("no dead steering element");

  const double u = K / (sigma2 / (2.0 * M));
  double p = chi2_cdf(2 * M, u);
  for (int n = 0; n < static_cast<int>(steering.compound.size()); ++n) {
    if (n == dead) continue;
    const double delta = noncentrality(steering.compound[n], signal_powers, sigma2);
    p *= noncentral_chi2_sf(2 * M, delta, u);
  }
  return p;
}

double prob_identify_event2(const SteeringVector& steering,
                            const std::vector<double>& signal_powers,
                            double sigma2, double K, int M) {
  const double u = K / (sigma2 / (2.0 * M));
  double p = 1.0;
  for (const cplx& a : steering.compound) {
    const double delta = noncentrality(a, signal_powers, sigma2);
    p *= noncentral_chi2_sf(2 * M, delta, u);
  }
  return p;
}

}  // namespace ucadoa

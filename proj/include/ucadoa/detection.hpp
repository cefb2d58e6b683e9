#pragma once

#include "ucadoa/types.hpp"

namespace ucadoa {

enum class ThresholdTechnique {
  ExactChi2,  // Neyman-Pearson via the exact chi-square CDF
  Clt,        // Gaussian approximation of the sample power
};

struct ThresholdConfig {
  double alpha = 0.001;
  ThresholdTechnique technique = ThresholdTechnique::ExactChi2;
  double noise_power = 1.0;  // sigma^2
  int m_samples = 50;

  void validate() const;
};

struct PowerReport {
  std::vector<double> powers;  // P_n per antenna
  double threshold = 0;        // K
  std::vector<int> below;      // antenna indices with P_n < K
};

/// Omega1(n): antenna n declared dead; Omega2: all antennas alive.
struct EventDecision {
  int dead_antenna = -1;  // -1 means Omega2
  PowerReport report;

  bool is_omega2() const { return dead_antenna < 0; }
  /// "omega2" or "omega1(<n+1>)" with 1-based antenna numbering.
  std::string label() const;
};

/// Sample power at antenna n: P_n = (1/M) sum_m |x_n(m)|^2.
double measured_power(const SnapshotSet& snap, int n);
std::vector<double> measured_powers(const SnapshotSet& snap);

/// Decision threshold K for the dead-antenna test.
/// exact-chi2: K = (sigma^2 / 2M) chi2_inv(2M, 1 - alpha)
/// clt:        K = sigma^2 (1 + Qinv(alpha) / sqrt(M))
double threshold(const ThresholdConfig& cfg);

/// Omega2 if no power is below K, otherwise Omega1 at the antenna with the
/// lowest power among those below K (lowest index on exact ties).
EventDecision classify(const std::vector<double>& powers, double K);

/// Non-centrality of (2M / sigma^2) P_n: sum_m 2 |a_n|^2 sigma_s_m^2 / sigma^2.
double noncentrality(cplx a_n, const std::vector<double>& signal_powers,
                     double noise_power);

/// P(P_n <= K | antenna n dead) = F_{2M}(K / (sigma^2 / 2M)).
double prob_h0_given_omega1(double K, double sigma2, int M);

/// Probability of correctly identifying Event 1 when exactly one compound
/// steering element is zero: the dead antenna's power falls below K while
/// every live antenna's power stays above it.
double prob_identify_event1(const SteeringVector& steering,
                            const std::vector<double>& signal_powers,
                            double sigma2, double K, int M);

/// Probability of correctly identifying Event 2: every antenna's power
/// stays above K.
double prob_identify_event2(const SteeringVector& steering,
                            const std::vector<double>& signal_powers,
                            double sigma2, double K, int M);

}  // namespace ucadoa

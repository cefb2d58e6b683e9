#pragma once

#include <array>
#include <optional>

#include "ucadoa/detection.hpp"
#include "ucadoa/types.hpp"

namespace ucadoa {

enum class Algorithm { Cf, CmusicM1, CmusicM2, BaselineMusic };

const char* algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& s);

/// Steering phases kappa1 = kappa cos(phi), kappa2 = kappa sin(phi),
/// kappa = 2 pi (r/lambda) sin(theta). Radians.
struct PhasePair {
  double kappa1 = 0;
  double kappa2 = 0;
};

struct MusicGrid {
  double theta_step_deg = 1.0;
  double phi_step_deg = 1.0;

  int theta_count() const { return static_cast<int>(std::lround(90.0 / theta_step_deg)) + 1; }
  int phi_count() const { return static_cast<int>(std::lround(360.0 / phi_step_deg)); }
};

struct DoaEstimate {
  double theta_deg = 0;
  std::optional<double> phi_deg;  // absent when theta_hat = 0
  PhasePair phases;
  Algorithm method = Algorithm::Cf;
  EventDecision event;
};

/// Diagonal of the 3x3 cleansing matrix F_n for dead antenna `dead` (0-based):
/// F_1 = diag(1, 1/sqrt2, 1), F_2 = diag(1, -1, -1/sqrt2),
/// F_3 = diag(1, sqrt2, -sqrt2), F_4 = F_1.
std::array<double, 3> f_matrix(int dead);

/// Steering-phase recovery from the three live antennas when antenna `dead`
/// is nulled by the polarization. Complex cross-products are accumulated
/// over all snapshots before taking a single argument, so noisy per-sample
/// phases never wrap. Throws EstimationError when the accumulators are
/// incoherent (no usable signal).
PhasePair phases_event1(const SnapshotSet& snap, int dead);

/// Steering-phase recovery when all four antennas are alive, via the
/// sum/difference accumulators whose phases are kappa1 -+ kappa2.
PhasePair phases_event2(const SnapshotSet& snap);

/// Closed-form DOA from the recovered phases. When hypot(k1, k2) <= eps_zero
/// the source is along the z-axis: theta = 0 and phi is absent. Pass
/// eps_zero = 0 in noisy pipelines so the atan2 branch always runs.
DoaEstimate cf_estimate(const PhasePair& phases, double r_over_lambda,
                        double eps_zero = 1e-9);

/// C-MUSIC Method 1 (Event 1 only): noise-subspace cleansing of the 3x3
/// live-antenna autocorrelation through F_n, then a grid search.
DoaEstimate cmusic_method1(const SnapshotSet& snap, int dead,
                           const ArrayConfig& arr, const MusicGrid& grid,
                           double sigma2);

/// C-MUSIC Method 2 (both events): re-synthesize the clean steering vector
/// from the recovered phases and search the MUSIC spectrum of its rank-1
/// autocorrelation. Under Event 2 the 4-vector is shrunk by dropping
/// antenna 4.
DoaEstimate cmusic_method2(const SnapshotSet& snap, const EventDecision& event,
                           const ArrayConfig& arr, const MusicGrid& grid);

/// Conventional MUSIC with the polarization-free steering vector; works on
/// any N >= 3 geometry and demonstrates the failure mode that motivates
/// the cleansed variants.
DoaEstimate baseline_music(const SnapshotSet& snap, const ArrayConfig& arr,
                           const MusicGrid& grid);

/// End-to-end pipeline: measure powers, threshold, classify, dispatch.
/// cmusic-m1 under Omega2 is an unsupported combination.
DoaEstimate estimate(const SnapshotSet& snap, const ThresholdConfig& cfg,
                     Algorithm algorithm, const ArrayConfig& arr,
                     const MusicGrid& grid);

}  // namespace ucadoa

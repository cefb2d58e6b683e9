#pragma once

#include <string>

#include "ucadoa/estimators.hpp"
#include "ucadoa/types.hpp"

namespace ucadoa {

struct ExperimentConfig {
  SourceParams scenario;
  ArrayConfig array = ArrayConfig::canonical();
  int m_samples = 50;
  double alpha = 0.001;
  ThresholdTechnique technique = ThresholdTechnique::ExactChi2;
  SignalModel signal_model = SignalModel::GaussianUnit;
  std::vector<double> rsnr_grid_db = {5, 10, 15, 20};
  int trials = 1000;
  std::uint64_t master_seed = 1;
  std::vector<Algorithm> algorithms = {Algorithm::Cf, Algorithm::CmusicM2};
  MusicGrid grid;
  std::string output_path = "out.csv";

  // Event sweep over azimuth, degrees.
  double phi_start = 0;
  double phi_stop = 360;
  double phi_step = 0.5;
  double sweep_snr_db = 20;

  void validate() const;
};

/// Reads a JSON config file (documented in the README). Unknown keys are
/// rejected. The UCADOA_OUTPUT_DIR environment variable, when set,
/// redirects output_path into that directory.
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// Average received SNR over antennas: mean(|a_n|^2) * P_s / sigma^2 with
/// P_s the mean per-sample signal power (1 for both signal models).
double average_rsnr(const SteeringVector& sv, double sigma2);

/// Noise power hitting a target average RSNR for a given steering vector.
double rsnr_to_sigma2(const SteeringVector& sv, double rsnr_db);

struct RmseRow {
  double rsnr_db = 0;
  std::string algorithm;
  std::string event_label;  // ground-truth event
  double sigma2 = 0;
  double rmse_phi_deg = 0;
  double rmse_theta_deg = 0;
  int trials_used = 0;
  int phi_absent = 0;  // theta_hat = 0 rows excluded from RMSE_phi
  double misclassification_rate = 0;
};

std::vector<RmseRow> run_rmse_sweep(const ExperimentConfig& cfg);

struct EventSweepRow {
  double phi_deg = 0;
  std::string algorithm;
  double sigma2 = 0;
  // Classification frequencies: omega2 plus each omega1 sub-event.
  double p_omega2 = 0;
  double p_omega1[4] = {0, 0, 0, 0};
  double rmse_phi_deg = 0;
  double rmse_theta_deg = 0;
  int trials_used = 0;
};

std::vector<EventSweepRow> run_event_sweep(const ExperimentConfig& cfg);

struct ProbabilityRow {
  double rsnr_db = 0;
  std::string technique;
  std::string event_label;  // ground-truth event
  double sigma2 = 0;
  double threshold_over_sigma2 = 0;  // K / sigma^2
  double analytic = 0;
  double empirical = 0;
  double stderr_binomial = 0;
  int trials = 0;
};

/// Analytic (Theorem-based) and Monte Carlo event-identification
/// probabilities versus RSNR, for both threshold techniques. Requires the
/// constant-unit signal model.
std::vector<ProbabilityRow> run_probability_curves(const ExperimentConfig& cfg);

struct ComplexityParams {
  int n_elements = 4;
  int m_samples = 50;
  int n_theta = 91;
  int n_phi = 360;
  int precision_p = 1024;

  void validate() const;
};

/// Real-multiplication count for one algorithm/event cell.
/// cmusic-m1 with Event 2 is unsupported.
double complexity_counts(const ComplexityParams& p, Algorithm algorithm, int event);

// CSV emission. Floats are serialized with 9 significant digits; a sidecar
// <path>.meta.json echoes the resolved config.
void write_rmse_csv(const std::string& path, const std::vector<RmseRow>& rows,
                    const ExperimentConfig& cfg);
void write_event_sweep_csv(const std::string& path,
                           const std::vector<EventSweepRow>& rows,
                           const ExperimentConfig& cfg);
void write_probability_csv(const std::string& path,
                           const std::vector<ProbabilityRow>& rows,
                           const ExperimentConfig& cfg);

/// Raw snapshot container: 16-byte header ("UCADOA01", uint32 N, uint32 M,
/// little-endian) followed by row-major N x M interleaved re/im float64.
void save_snapshots(const std::string& path, const SnapshotSet& snap);
SnapshotSet load_snapshots(const std::string& path);

std::string format_float(double v);  // 9 significant digits

}  // namespace ucadoa

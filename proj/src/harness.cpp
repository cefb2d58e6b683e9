#include "ucadoa/harness.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

#include "ucadoa/core_model.hpp"
#include "ucadoa/numerics.hpp"
#include "ucadoa/rng.hpp"

namespace ucadoa {
namespace {

using nlohmann::json;

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) + index);
}

// Ground-truth event for a scenario, from the exact steering vector.
EventDecision true_event(const SteeringVector& sv) {
  EventDecision ev;
  ev.dead_antenna = -1;
  for (int n = 0; n < static_cast<int>(sv.compound.size()); ++n)
    if (std::abs(sv.compound[n]) < 1e-12) ev.dead_antenna = n;
  return ev;
}

double wrapped_phi_error(double est_deg, double truth_deg) {
  return std::remainder(est_deg - truth_deg, 360.0);
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("unknown config key " + where + "." + it.key());
}

ThresholdTechnique technique_from_name(const std::string& s) {
  if (s == "exact-chi2") return ThresholdTechnique::ExactChi2;
  if (s == "clt") return ThresholdTechnique::Clt;
  throw std::invalid_argument("unknown technique: " + s);
}

const char* technique_name(ThresholdTechnique t) {
  return t == ThresholdTechnique::ExactChi2 ? "exact-chi2" : "clt";
}

SignalModel signal_model_from_name(const std::string& s) {
  if (s == "constant-unit") return SignalModel::ConstantUnit;
  if (s == "gaussian-unit") return SignalModel::GaussianUnit;
  throw std::invalid_argument("unknown signal model: " + s);
}

const char* signal_model_name(SignalModel m) {
  return m == SignalModel::ConstantUnit ? "constant-unit" : "gaussian-unit";
}

void write_meta(const std::string& csv_path, const ExperimentConfig& cfg) {
  std::ofstream f(csv_path + ".meta.json");
  if (!f) throw std::runtime_error("cannot write " + csv_path + ".meta.json");
  f << config_to_json(cfg) << "\n";
}

std::ofstream open_csv(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  return f;
}

}  // namespace

std::string format_float(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void ExperimentConfig::validate() const {
  scenario.validate();
  array.validate_for_estimation();
  if (m_samples < 1) throw std::invalid_argument("m_samples must be >= 1");
  if (alpha <= 0 || alpha >= 1) throw std::invalid_argument("alpha must be in (0, 1)");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (rsnr_grid_db.empty()) throw std::invalid_argument("rsnr_grid_db must be nonempty");
  if (algorithms.empty()) throw std::invalid_argument("algorithms must be nonempty");
  if (grid.theta_step_deg <= 0 || grid.phi_step_deg <= 0)
    throw std::invalid_argument("grid steps must be > 0");
  if (phi_step <= 0) throw std::invalid_argument("phi_step must be > 0");
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read config file " + path);
  json j = json::parse(f);

  reject_unknown_keys(j,
                      {"scenario", "array", "m_samples", "alpha", "technique",
                       "signal_model", "rsnr_grid_db", "trials", "master_seed",
                       "algorithms", "grid", "output_path", "phi_start",
                       "phi_stop", "phi_step", "sweep_snr_db"},
                      "");
  ExperimentConfig cfg;
  if (j.contains("scenario")) {
    const json& s = j["scenario"];
    reject_unknown_keys(s, {"theta", "phi", "gamma", "eta"}, "scenario");
    cfg.scenario.theta_deg = s.value("theta", 0.0);
    cfg.scenario.phi_deg = s.value("phi", 0.0);
    cfg.scenario.gamma_deg = s.value("gamma", 0.0);
    cfg.scenario.eta_deg = s.value("eta", 0.0);
  }
  if (j.contains("array")) {
    const json& a = j["array"];
    reject_unknown_keys(a, {"n_elements", "radius", "alignments"}, "array");
    int n = a.value("n_elements", 4);
    double radius = a.value("radius", 0.2);
    std::vector<double> zetas = canonical_alignment();
    if (a.contains("alignments")) zetas = a["alignments"].get<std::vector<double>>();
    cfg.array = (n == 4 && zetas == canonical_alignment())
                    ? ArrayConfig::canonical(radius)
                    : ArrayConfig::uniform(n, radius, zetas);
  }
  cfg.m_samples = j.value("m_samples", cfg.m_samples);
  cfg.alpha = j.value("alpha", cfg.alpha);
  if (j.contains("technique")) cfg.technique = technique_from_name(j["technique"]);
  if (j.contains("signal_model"))
    cfg.signal_model = signal_model_from_name(j["signal_model"]);
  if (j.contains("rsnr_grid_db"))
    cfg.rsnr_grid_db = j["rsnr_grid_db"].get<std::vector<double>>();
  cfg.trials = j.value("trials", cfg.trials);
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  if (j.contains("algorithms")) {
    cfg.algorithms.clear();
    for (const auto& s : j["algorithms"])
      cfg.algorithms.push_back(algorithm_from_name(s.get<std::string>()));
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    reject_unknown_keys(g, {"theta_step", "phi_step"}, "grid");
    cfg.grid.theta_step_deg = g.value("theta_step", 1.0);
    cfg.grid.phi_step_deg = g.value("phi_step", 1.0);
  }
  cfg.output_path = j.value("output_path", cfg.output_path);
  cfg.phi_start = j.value("phi_start", cfg.phi_start);
  cfg.phi_stop = j.value("phi_stop", cfg.phi_stop);
  cfg.phi_step = j.value("phi_step", cfg.phi_step);
  cfg.sweep_snr_db = j.value("sweep_snr_db", cfg.sweep_snr_db);

  if (const char* dir = std::getenv("UCADOA_OUTPUT_DIR"); dir && *dir)
    cfg.output_path = (std::filesystem::path(dir) /
                       std::filesystem::path(cfg.output_path).filename())
                          .string();
  cfg.validate();
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["scenario"] = {{"theta", cfg.scenario.theta_deg},
                   {"phi", cfg.scenario.phi_deg},
                   {"gamma", cfg.scenario.gamma_deg},
                   {"eta", cfg.scenario.eta_deg}};
  j["array"] = {{"n_elements", cfg.array.n_elements},
                {"radius", cfg.array.radius},
                {"alignments", cfg.array.alignments_deg}};
  j["m_samples"] = cfg.m_samples;
  j["alpha"] = cfg.alpha;
  j["technique"] = technique_name(cfg.technique);
  j["signal_model"] = signal_model_name(cfg.signal_model);
  j["rsnr_grid_db"] = cfg.rsnr_grid_db;
  j["trials"] = cfg.trials;
  j["master_seed"] = cfg.master_seed;
  json algs = json::array();
  for (Algorithm a : cfg.algorithms) algs.push_back(algorithm_name(a));
  j["algorithms"] = algs;
  j["grid"] = {{"theta_step", cfg.grid.theta_step_deg},
               {"phi_step", cfg.grid.phi_step_deg}};
  j["output_path"] = cfg.output_path;
  j["phi_start"] = cfg.phi_start;
  j["phi_stop"] = cfg.phi_stop;
  j["phi_step"] = cfg.phi_step;
  j["sweep_snr_db"] = cfg.sweep_snr_db;
  return j.dump(2);
}

double average_rsnr(const SteeringVector& sv, double sigma2) {
  double mean_gain = 0;
  for (const cplx& a : sv.compound) mean_gain += std::norm(a);
  mean_gain /= sv.compound.size();
  return mean_gain / sigma2;
}

double rsnr_to_sigma2(const SteeringVector& sv, double rsnr_db) {
  double mean_gain = 0;
  for (const cplx& a : sv.compound) mean_gain += std::norm(a);
  mean_gain /= sv.compound.size();
  if (mean_gain <= 0) throw std::invalid_argument("scenario has zero received power");
  return mean_gain / std::pow(10.0, rsnr_db / 10.0);
}

std::vector<RmseRow> run_rmse_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const SteeringVector sv = steering_vector(cfg.array, cfg.scenario);
  const EventDecision truth_ev = true_event(sv);

  std::vector<RmseRow> rows;
  std::uint64_t global_trial = 0;
  for (double rsnr_db : cfg.rsnr_grid_db) {
    const double sigma2 = rsnr_to_sigma2(sv, rsnr_db);
    const ThresholdConfig tcfg{cfg.alpha, cfg.technique, sigma2, cfg.m_samples};

    struct Acc {
      double se_phi = 0, se_theta = 0;
      int used = 0, phi_absent = 0, misclassified = 0;
    };
    std::vector<Acc> acc(cfg.algorithms.size());

    for (int t = 0; t < cfg.trials; ++t, ++global_trial) {
      const SnapshotSet snap =
          synthesize(cfg.array, cfg.scenario, cfg.m_samples, sigma2,
                     cfg.signal_model, trial_seed(cfg.master_seed, global_trial));
      for (size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
        try {
          const DoaEstimate est =
              estimate(snap, tcfg, cfg.algorithms[ai], cfg.array, cfg.grid);
          Acc& a = acc[ai];
          if (est.event.dead_antenna != truth_ev.dead_antenna) ++a.misclassified;
          const double et = est.theta_deg - cfg.scenario.theta_deg;
          a.se_theta += et * et;
          if (est.phi_deg) {
            const double ep = wrapped_phi_error(*est.phi_deg, cfg.scenario.phi_deg);
            a.se_phi += ep * ep;
          } else {
            ++a.phi_absent;
          }
          ++a.used;
        } catch (const std::exception&) {
          // Trial excluded; reflected in trials_used.
        }
      }
    }

    for (size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
      const Acc& a = acc[ai];
      RmseRow r;
      r.rsnr_db = rsnr_db;
      r.algorithm = algorithm_name(cfg.algorithms[ai]);
      r.event_label = truth_ev.label();
      r.sigma2 = sigma2;
      r.trials_used = a.used;
      r.phi_absent = a.phi_absent;
      const int phi_n = a.used - a.phi_absent;
      r.rmse_phi_deg = phi_n > 0 ? std::sqrt(a.se_phi / phi_n) : 0;
      r.rmse_theta_deg = a.used > 0 ? std::sqrt(a.se_theta / a.used) : 0;
      r.misclassification_rate =
          cfg.trials > 0 ? static_cast<double>(a.misclassified) / cfg.trials : 0;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

std::vector<EventSweepRow> run_event_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const int n_points =
      static_cast<int>(std::lround((cfg.phi_stop - cfg.phi_start) / cfg.phi_step));
  if (n_points < 1) throw std::invalid_argument("empty phi sweep");

  std::vector<EventSweepRow> rows;
  std::uint64_t global_trial = 0;
  for (int pi = 0; pi < n_points; ++pi) {
    SourceParams src = cfg.scenario;
    src.phi_deg = cfg.phi_start + pi * cfg.phi_step;
    if (src.phi_deg >= 360) src.phi_deg -= 360;
    const SteeringVector sv = steering_vector(cfg.array, src);
    const double sigma2 = rsnr_to_sigma2(sv, cfg.sweep_snr_db);
    const ThresholdConfig tcfg{cfg.alpha, cfg.technique, sigma2, cfg.m_samples};

    struct Acc {
      double se_phi = 0, se_theta = 0;
      int used = 0, phi_n = 0;
    };
    std::vector<Acc> acc(cfg.algorithms.size());
    int count_omega2 = 0;
    int count_omega1[4] = {0, 0, 0, 0};

    for (int t = 0; t < cfg.trials; ++t, ++global_trial) {
      const SnapshotSet snap =
          synthesize(cfg.array, src, cfg.m_samples, sigma2, cfg.signal_model,
                     trial_seed(cfg.master_seed, global_trial));
      const double K = threshold(tcfg);
      const EventDecision ev = classify(measured_powers(snap), K);
      if (ev.is_omega2())
        ++count_omega2;
      else
        ++count_omega1[ev.dead_antenna];

      for (size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
        try {
          const DoaEstimate est =
              estimate(snap, tcfg, cfg.algorithms[ai], cfg.array, cfg.grid);
          Acc& a = acc[ai];
          const double et = est.theta_deg - src.theta_deg;
          a.se_theta += et * et;
          if (est.phi_deg) {
            const double ep = wrapped_phi_error(*est.phi_deg, src.phi_deg);
            a.se_phi += ep * ep;
            ++a.phi_n;
          }
          ++a.used;
        } catch (const std::exception&) {
        }
      }
    }

    for (size_t ai = 0; ai < cfg.algorithms.size(); ++ai) {
      const Acc& a = acc[ai];
      EventSweepRow r;
      r.phi_deg = src.phi_deg;
      r.algorithm = algorithm_name(cfg.algorithms[ai]);
      r.sigma2 = sigma2;
      r.p_omega2 = static_cast<double>(count_omega2) / cfg.trials;
      for (int n = 0; n < 4; ++n)
        r.p_omega1[n] = static_cast<double>(count_omega1[n]) / cfg.trials;
      r.rmse_phi_deg = a.phi_n > 0 ? std::sqrt(a.se_phi / a.phi_n) : 0;
      r.rmse_theta_deg = a.used > 0 ? std::sqrt(a.se_theta / a.used) : 0;
      r.trials_used = a.used;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

std::vector<ProbabilityRow> run_probability_curves(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.signal_model != SignalModel::ConstantUnit)
    throw std::invalid_argument(
        "probability curves require the constant-unit signal model");

  const SteeringVector sv = steering_vector(cfg.array, cfg.scenario);
  const EventDecision truth_ev = true_event(sv);
  const std::vector<double> signal_powers(cfg.m_samples, 1.0);

  std::vector<ProbabilityRow> rows;
  std::uint64_t global_trial = 0;
  for (double rsnr_db : cfg.rsnr_grid_db) {
    const double sigma2 = rsnr_to_sigma2(sv, rsnr_db);
    for (ThresholdTechnique tech :
         {ThresholdTechnique::ExactChi2, ThresholdTechnique::Clt}) {
      const ThresholdConfig tcfg{cfg.alpha, tech, sigma2, cfg.m_samples};
      const double K = threshold(tcfg);

      ProbabilityRow r;
      r.rsnr_db = rsnr_db;
      r.technique = technique_name(tech);
      r.event_label = truth_ev.label();
      r.sigma2 = sigma2;
      r.threshold_over_sigma2 = K / sigma2;
      r.analytic =
          truth_ev.is_omega2()
              ? prob_identify_event2(sv, signal_powers, sigma2, K, cfg.m_samples)
              : prob_identify_event1(sv, signal_powers, sigma2, K, cfg.m_samples);

      int hits = 0;
      for (int t = 0; t < cfg.trials; ++t, ++global_trial) {
        const SnapshotSet snap =
            synthesize(cfg.array, cfg.scenario, cfg.m_samples, sigma2,
                       SignalModel::ConstantUnit,
                       trial_seed(cfg.master_seed, global_trial));
        const std::vector<double> powers = measured_powers(snap);
        bool ok;
        if (truth_ev.is_omega2()) {
          ok = true;
          for (double p : powers) ok = ok && p >= K;
        } else {
          // The identification event of the analysis: the dead antenna
          // alone falls below K.
          ok = powers[truth_ev.dead_antenna] < K;
          for (int n = 0; n < static_cast<int>(powers.size()); ++n)
            if (n != truth_ev.dead_antenna) ok = ok && powers[n] >= K;
        }
        if (ok) ++hits;
      }
      r.empirical = static_cast<double>(hits) / cfg.trials;
      r.stderr_binomial =
          std::sqrt(std::max(r.empirical * (1 - r.empirical), 1e-12) / cfg.trials);
      r.trials = cfg.trials;
      rows.push_back(std::move(r));
    }
  }
  return rows;
}

void ComplexityParams::validate() const {
  if (n_elements < 1 || m_samples < 1 || n_theta < 1 || n_phi < 1 || precision_p < 2)
    throw std::invalid_argument("complexity parameters must be positive (p >= 2)");
}

double complexity_counts(const ComplexityParams& p, Algorithm algorithm, int event) {
  p.validate();
  if (event != 1 && event != 2) throw std::invalid_argument("event must be 1 or 2");
  const double N = p.n_elements, M = p.m_samples;
  const double search = static_cast<double>(p.n_theta) * p.n_phi;
  const double lg = std::log2(static_cast<double>(p.precision_p));

  switch (algorithm) {
    case Algorithm::Cf:
      return (event == 1 ? 8 * M : 16 * M) + 6 + 4 * lg;
    case Algorithm::CmusicM1:
      if (event == 2)
        throw std::invalid_argument("cmusic-m1 is unsupported for Event 2");
      return (N - 1) * (N - 1) * (4 * M + 4) - 2 * (N - 1) +
             12 * std::pow(N - 1, 3) + search * (4 * N * N - 10 * N + 5);
    case Algorithm::CmusicM2:
      if (event == 1)
        return 8 * M + 2 * lg + 1 + 12 * std::pow(N - 1, 3) +
               search * (4 * N * N - 10 * N + 5);
      return 16 * M + 2 * lg + 1 + 12 * std::pow(N, 3) +
             search * (4 * N * N - 2 * N - 1);
    default:
      throw std::invalid_argument("no complexity cell for this algorithm");
  }
}

void write_rmse_csv(const std::string& path, const std::vector<RmseRow>& rows,
                    const ExperimentConfig& cfg) {
  auto f = open_csv(path);
  f << "rsnr_db,algorithm,event_label,sigma2,rmse_phi_deg,rmse_theta_deg,"
       "trials_used,phi_absent,misclassification_rate\n";
  for (const auto& r : rows)
    f << format_float(r.rsnr_db) << ',' << r.algorithm << ',' << r.event_label
      << ',' << format_float(r.sigma2) << ',' << format_float(r.rmse_phi_deg)
      << ',' << format_float(r.rmse_theta_deg) << ',' << r.trials_used << ','
      << r.phi_absent << ',' << format_float(r.misclassification_rate) << '\n';
  write_meta(path, cfg);
}

void write_event_sweep_csv(const std::string& path,
                           const std::vector<EventSweepRow>& rows,
                           const ExperimentConfig& cfg) {
  auto f = open_csv(path);
  f << "phi_deg,algorithm,sigma2,p_omega2,p_omega1_1,p_omega1_2,p_omega1_3,"
       "p_omega1_4,rmse_phi_deg,rmse_theta_deg,trials_used\n";
  for (const auto& r : rows) {
    f << format_float(r.phi_deg) << ',' << r.algorithm << ','
      << format_float(r.sigma2) << ',' << format_float(r.p_omega2);
    for (int n = 0; n < 4; ++n) f << ',' << format_float(r.p_omega1[n]);
    f << ',' << format_float(r.rmse_phi_deg) << ','
      << format_float(r.rmse_theta_deg) << ',' << r.trials_used << '\n';
  }
  write_meta(path, cfg);
}

void write_probability_csv(const std::string& path,
                           const std::vector<ProbabilityRow>& rows,
                           const ExperimentConfig& cfg) {
  auto f = open_csv(path);
  f << "rsnr_db,technique,event_label,sigma2,threshold_over_sigma2,analytic,"
       "empirical,stderr,trials\n";
  for (const auto& r : rows)
    f << format_float(r.rsnr_db) << ',' << r.technique << ',' << r.event_label
      << ',' << format_float(r.sigma2) << ','
      << format_float(r.threshold_over_sigma2) << ',' << format_float(r.analytic)
      << ',' << format_float(r.empirical) << ','
      << format_float(r.stderr_binomial) << ',' << r.trials << '\n';
  write_meta(path, cfg);
}

namespace {
constexpr char kSnapshotMagic[8] = {'U', 'C', 'A', 'D', 'O', 'A', '0', '1'};
}

void save_snapshots(const std::string& path, const SnapshotSet& snap) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f.write(kSnapshotMagic, 8);
  const std::uint32_t n = snap.n_antennas, m = snap.m_samples;
  f.write(reinterpret_cast<const char*>(&n), 4);
  f.write(reinterpret_cast<const char*>(&m), 4);
  for (const cplx& v : snap.samples) {
    const double re = v.real(), im = v.imag();
    f.write(reinterpret_cast<const char*>(&re), 8);
    f.write(reinterpret_cast<const char*>(&im), 8);
  }
}

SnapshotSet load_snapshots(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read " + path);
  char magic[8];
  f.read(magic, 8);
  if (!f || std::memcmp(magic, kSnapshotMagic, 8) != 0)
    throw std::runtime_error("bad snapshot file magic in " + path);
  std::uint32_t n = 0, m = 0;
  f.read(reinterpret_cast<char*>(&n), 4);
  f.read(reinterpret_cast<char*>(&m), 4);
  if (!f || n == 0 || m == 0) throw std::runtime_error("bad snapshot header in " + path);
  SnapshotSet snap;
  snap.n_antennas = static_cast<int>(n);
  snap.m_samples = static_cast<int>(m);
  snap.samples.resize(static_cast<size_t>(n) * m);
  for (cplx& v : snap.samples) {
    double re, im;
    f.read(reinterpret_cast<char*>(&re), 8);
    f.read(reinterpret_cast<char*>(&im), 8);
    if (!f) throw std::runtime_error("truncated snapshot file " + path);
    v = {re, im};
  }
  return snap;
}

}  // namespace ucadoa

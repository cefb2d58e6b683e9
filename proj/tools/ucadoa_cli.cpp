// Experiment driver for the polarization-robust UCA DOA estimator library.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "ucadoa/core_model.hpp"
#include "ucadoa/harness.hpp"

using namespace ucadoa;

namespace {

ExperimentConfig resolve_config(const std::string& config_path) {
  if (config_path.empty()) return ExperimentConfig{};
  return load_config(config_path);
}

int run(int argc, char** argv) {
  CLI::App app{"2-D DOA estimation for a polarization-sensitive 4-element UCA"};
  app.require_subcommand(1);

  std::string config_path;

  // --- threshold ---
  auto* th = app.add_subcommand("threshold", "Print the dead-antenna decision threshold K");
  int th_m = 50;
  double th_alpha = 0.001, th_sigma2 = 1.0;
  std::string th_tech = "exact-chi2";
  th->add_option("--m", th_m, "Number of snapshots M");
  th->add_option("--alpha", th_alpha, "Significance level");
  th->add_option("--sigma2", th_sigma2, "Noise power");
  th->add_option("--technique", th_tech, "exact-chi2 or clt");

  // --- complexity ---
  auto* cx = app.add_subcommand("complexity", "Print the real-multiplication count for one algorithm/event");
  ComplexityParams cxp;
  std::string cx_alg = "cf";
  int cx_event = 1;
  cx->add_option("--n", cxp.n_elements, "Array size N");
  cx->add_option("--m", cxp.m_samples, "Number of snapshots M");
  cx->add_option("--ntheta", cxp.n_theta, "Elevation search points");
  cx->add_option("--nphi", cxp.n_phi, "Azimuth search points");
  cx->add_option("--p", cxp.precision_p, "Digits-of-precision parameter");
  cx->add_option("--alg", cx_alg, "cf, cmusic-m1 or cmusic-m2");
  cx->add_option("--event", cx_event, "1 or 2");

  // --- synthesize ---
  auto* sy = app.add_subcommand("synthesize", "Generate a snapshot file from a scenario config");
  std::string sy_out;
  double sy_rsnr = 20;
  std::uint64_t sy_seed = 0;
  bool sy_have_seed = false;
  sy->add_option("--config", config_path, "Experiment config (JSON)")->required();
  sy->add_option("--out", sy_out, "Output snapshot file (binary)");
  sy->add_option("--rsnr-db", sy_rsnr, "Average received SNR in dB");
  sy->add_option("--seed", sy_seed, "Override the master seed")
      ->each([&](const std::string&) { sy_have_seed = true; });

  // --- estimate ---
  auto* es = app.add_subcommand("estimate", "Run the full classify-then-estimate pipeline");
  std::string es_in, es_alg = "cf";
  double es_sigma2 = -1;
  es->add_option("--config", config_path, "Experiment config (JSON)")->required();
  es->add_option("--in", es_in, "Snapshot file (binary); synthesized from the config when omitted");
  es->add_option("--alg", es_alg, "cf, cmusic-m1 or cmusic-m2");
  es->add_option("--sigma2", es_sigma2, "Noise power of an imported snapshot file");
  double es_rsnr = 20;
  es->add_option("--rsnr-db", es_rsnr, "Average received SNR in dB when synthesizing");

  // --- prob-curves / rmse-sweep / event-sweep ---
  auto* pc = app.add_subcommand("prob-curves", "Analytic and empirical event-identification probabilities");
  pc->add_option("--config", config_path, "Experiment config (JSON)")->required();
  auto* rs = app.add_subcommand("rmse-sweep", "Monte Carlo RMSE versus average RSNR");
  rs->add_option("--config", config_path, "Experiment config (JSON)")->required();
  auto* ev = app.add_subcommand("event-sweep", "Event classification and RMSE versus azimuth");
  ev->add_option("--config", config_path, "Experiment config (JSON)")->required();

  CLI11_PARSE(app, argc, argv);

  if (th->parsed()) {
    ThresholdConfig cfg;
    cfg.alpha = th_alpha;
    cfg.noise_power = th_sigma2;
    cfg.m_samples = th_m;
    cfg.technique = th_tech == "clt" ? ThresholdTechnique::Clt
                                     : ThresholdTechnique::ExactChi2;
    if (th_tech != "clt" && th_tech != "exact-chi2")
      throw std::invalid_argument("unknown technique: " + th_tech);
    std::cout << "K = " << format_float(threshold(cfg)) << "\n";
    return 0;
  }

  if (cx->parsed()) {
    const double c = complexity_counts(cxp, algorithm_from_name(cx_alg), cx_event);
    std::cout << format_float(c) << "\n";
    return 0;
  }

  const ExperimentConfig cfg = resolve_config(config_path);

  if (sy->parsed()) {
    const SteeringVector sv = steering_vector(cfg.array, cfg.scenario);
    const double sigma2 = rsnr_to_sigma2(sv, sy_rsnr);
    const std::uint64_t seed = sy_have_seed ? sy_seed : cfg.master_seed;
    const SnapshotSet snap = synthesize(cfg.array, cfg.scenario, cfg.m_samples,
                                        sigma2, cfg.signal_model, seed);
    const std::string out = sy_out.empty() ? cfg.output_path : sy_out;
    save_snapshots(out, snap);
    std::cout << "wrote " << out << " (N=" << snap.n_antennas
              << ", M=" << snap.m_samples << ", sigma2=" << format_float(sigma2)
              << ", seed=" << seed << ")\n";
    return 0;
  }

  if (es->parsed()) {
    SnapshotSet snap;
    double sigma2;
    if (!es_in.empty()) {
      if (es_sigma2 <= 0)
        throw std::invalid_argument("--sigma2 is required with --in");
      snap = load_snapshots(es_in);
      snap.noise_power = sigma2 = es_sigma2;
    } else {
      const SteeringVector sv = steering_vector(cfg.array, cfg.scenario);
      sigma2 = rsnr_to_sigma2(sv, es_rsnr);
      snap = synthesize(cfg.array, cfg.scenario, cfg.m_samples, sigma2,
                        cfg.signal_model, cfg.master_seed);
    }
    const ThresholdConfig tcfg{cfg.alpha, cfg.technique, sigma2, snap.m_samples};
    const DoaEstimate est =
        estimate(snap, tcfg, algorithm_from_name(es_alg), cfg.array, cfg.grid);
    std::cout << "event=" << est.event.label()
              << " theta_deg=" << format_float(est.theta_deg) << " phi_deg="
              << (est.phi_deg ? format_float(*est.phi_deg) : std::string("n/a"))
              << " kappa1=" << format_float(est.phases.kappa1)
              << " kappa2=" << format_float(est.phases.kappa2) << "\n";
    return 0;
  }

  if (pc->parsed()) {
    write_probability_csv(cfg.output_path, run_probability_curves(cfg), cfg);
  } else if (rs->parsed()) {
    write_rmse_csv(cfg.output_path, run_rmse_sweep(cfg), cfg);
  } else if (ev->parsed()) {
    write_event_sweep_csv(cfg.output_path, run_event_sweep(cfg), cfg);
  }
  std::cout << "wrote " << cfg.output_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ucadoa/core_model.hpp"
#include "ucadoa/detection.hpp"
#include "ucadoa/numerics.hpp"
#include "ucadoa/rng.hpp"
#include "test_util.hpp"

using namespace ucadoa;

namespace {

SnapshotSet noise_only(int N, int M, double s2, std::uint64_t seed) {
  SnapshotSet snap;
  snap.n_antennas = N;
  snap.m_samples = M;
  snap.noise_power = s2;
  snap.signal_powers.assign(M, 0.0);
  snap.samples.resize(static_cast<size_t>(N) * M);
  SubstreamRng rng(seed, 1);
  for (auto& v : snap.samples) v = rng.circular_gaussian(s2);
  return snap;
}

}  // namespace

TEST_CASE("measured power") {
  SnapshotSet snap;
  snap.n_antennas = 2;
  snap.m_samples = 2;
  snap.samples = {cplx{1, 0}, cplx{0, 2}, cplx{3, 4}, cplx{0, 0}};
  CHECK(measured_power(snap, 0) == doctest::Approx(2.5).epsilon(1e-14));
  CHECK(measured_power(snap, 1) == doctest::Approx(12.5).epsilon(1e-14));
  CHECK(measured_powers(snap) == std::vector<double>{2.5, 12.5});
}

TEST_CASE("noise-only power moments") {
  const int M = 50, trials = 40000;
  const double s2 = 3.0;
  SubstreamRng rng(41, 0);
  double mean = 0, m2 = 0;
  for (int t = 0; t < trials; ++t) {
    double p = 0;
    for (int m = 0; m < M; ++m) p += std::norm(rng.circular_gaussian(s2));
    p /= M;
    mean += p;
    m2 += p * p;
  }
  mean /= trials;
  const double var = m2 / trials - mean * mean;
  CHECK(mean == doctest::Approx(s2).epsilon(0.01));
  CHECK(var == doctest::Approx(s2 * s2 / M).epsilon(0.05));
}

TEST_CASE("threshold values at M=50, alpha=0.001, sigma2=1") {
  ThresholdConfig cfg;
  CHECK(threshold(cfg) == doctest::Approx(1.4944925277903887).epsilon(1e-7));
  cfg.technique = ThresholdTechnique::Clt;
  CHECK(threshold(cfg) == doctest::Approx(1.4370248438266007).epsilon(1e-7));
  // scales with sigma^2
  cfg.technique = ThresholdTechnique::ExactChi2;
  cfg.noise_power = 2.0;
  CHECK(threshold(cfg) == doctest::Approx(2 * 1.4944925277903887).epsilon(1e-7));
}

TEST_CASE("exact threshold exceeds the CLT threshold at small alpha") {
  for (int M : {20, 50, 100}) {
    ThresholdConfig a{0.001, ThresholdTechnique::ExactChi2, 1.0, M};
    ThresholdConfig b{0.001, ThresholdTechnique::Clt, 1.0, M};
    CHECK(threshold(a) > threshold(b));
  }
}

TEST_CASE("threshold config validation") {
  CHECK_THROWS_AS(threshold({0.0, ThresholdTechnique::ExactChi2, 1.0, 50}),
                  std::invalid_argument);
  CHECK_THROWS_AS(threshold({0.001, ThresholdTechnique::ExactChi2, -1.0, 50}),
                  std::invalid_argument);
  CHECK_THROWS_AS(threshold({0.001, ThresholdTechnique::ExactChi2, 1.0, 0}),
                  std::invalid_argument);
}

TEST_CASE("event classification") {
  const auto d1 = classify({2.0, 0.5, 1.8, 1.9}, 1.0);
  CHECK(d1.dead_antenna == 1);
  CHECK(d1.label() == "omega1(2)");
  CHECK_FALSE(d1.is_omega2());

  const auto d2 = classify({2.0, 1.5, 1.8, 1.9}, 1.0);
  CHECK(d2.is_omega2());
  CHECK(d2.label() == "omega2");

  // several below K: lowest power wins, lowest index on exact ties
  CHECK(classify({0.2, 0.5, 1.8, 1.9}, 1.0).dead_antenna == 0);
  CHECK(classify({0.5, 0.2, 1.8, 1.9}, 1.0).dead_antenna == 1);
  CHECK(classify({0.3, 0.3, 1.8, 1.9}, 1.0).dead_antenna == 0);
}

TEST_CASE("classification is permutation equivariant") {
  const std::vector<double> base{0.4, 1.3, 1.2, 0.9};
  for (int shift = 0; shift < 4; ++shift) {
    std::vector<double> p(4);
    for (int n = 0; n < 4; ++n) p[(n + shift) % 4] = base[n];
    CHECK(classify(p, 1.0).dead_antenna == shift % 4);
  }
}

TEST_CASE("noncentrality") {
  CHECK(noncentrality(cplx{1, 0}, std::vector<double>(50, 1.0), 1.0) ==
        doctest::Approx(100.0).epsilon(1e-12));
  CHECK(noncentrality(cplx{0, 2}, std::vector<double>(10, 0.5), 2.0) ==
        doctest::Approx(2 * 4 * 0.5 * 10 / 2.0).epsilon(1e-12));
  CHECK(noncentrality(cplx{0, 0}, std::vector<double>(50, 1.0), 1.0) == 0.0);
}

TEST_CASE("signal-bearing power follows the noncentral chi-square law") {
  // constant-unit signal, |a|^2 = 1, sigma2 = 1, M = 50 -> delta = 100
  const int M = 50, trials = 50000;
  const cplx a{std::sqrt(0.5), std::sqrt(0.5)};
  SubstreamRng rng(42, 0);
  std::vector<double> stats(trials);
  for (int t = 0; t < trials; ++t) {
    double p = 0;
    for (int m = 0; m < M; ++m) p += std::norm(a + rng.circular_gaussian(1.0));
    stats[t] = 2.0 * p;  // (2M / s2) P
  }
  std::sort(stats.begin(), stats.end());
  const double delta = noncentrality(a, std::vector<double>(M, 1.0), 1.0);
  CHECK(delta == doctest::Approx(100.0).epsilon(1e-12));
  double ks = 0;
  for (int t = 0; t < trials; ++t) {
    const double f = 1.0 - noncentral_chi2_sf(2 * M, delta, stats[t]);
    ks = std::max(ks, std::abs(f - double(t + 1) / trials));
    ks = std::max(ks, std::abs(f - double(t) / trials));
  }
  CHECK(ks < 0.01);
}

TEST_CASE("dead-antenna acceptance probability") {
  const double K = 1.4944925277903887;
  CHECK(prob_h0_given_omega1(K, 1.0, 50) == doctest::Approx(0.999).epsilon(1e-6));
  CHECK(prob_h0_given_omega1(0.0, 1.0, 50) == 0.0);
  CHECK(prob_h0_given_omega1(100.0, 1.0, 50) == doctest::Approx(1.0));
  CHECK(prob_h0_given_omega1(1.0, 0.02, 50) == doctest::Approx(1.0).epsilon(1e-9));
  // F_100(100) with K = sigma2 = 1, M = 50
  CHECK(prob_h0_given_omega1(1.0, 1.0, 50) ==
        doctest::Approx(0.5188083154720433).epsilon(1e-9));
}

TEST_CASE("type-I error calibration of the threshold") {
  // all antennas alive but signal-free: P(any P_n < K) per antenna ~ alpha
  const int M = 50, trials = 200000;
  const double alpha = 0.001;
  const double K = threshold({alpha, ThresholdTechnique::ExactChi2, 1.0, M});
  SubstreamRng rng(43, 0);
  int above = 0;
  for (int t = 0; t < trials; ++t) {
    double p = 0;
    for (int m = 0; m < M; ++m) p += std::norm(rng.circular_gaussian(1.0));
    if (p / M >= K) ++above;
  }
  const double rate = double(above) / trials;  // dead antenna declared alive
  CHECK(rate > alpha / 2);
  CHECK(rate < alpha * 2);
}

TEST_CASE("event-1 identification probability") {
  const auto arr = ArrayConfig::canonical();
  const auto src = testutil::omega11_scenario();
  auto sv = steering_vector(arr, src);
  sv.compound[0] = 0;  // snap the numerical near-zero to an exact zero
  const int M = 50;
  const std::vector<double> ps(M, 1.0);

  // bounded by 1 - alpha across a noise sweep
  for (double s2 : {0.05, 0.1, 0.3, 1.0, 3.0}) {
    const double K = threshold({0.001, ThresholdTechnique::ExactChi2, s2, M});
    const double p = prob_identify_event1(sv, ps, s2, K, M);
    CHECK(p >= 0.0);
    CHECK(p <= 0.999 + 1e-12);
  }

  // near-certain identification at 4 dB average RSNR
  double mean_gain = 0;
  for (const auto& a : sv.compound) mean_gain += std::norm(a);
  mean_gain /= 4;
  const double s2 = mean_gain / std::pow(10.0, 4.0 / 10.0);
  const double K = threshold({0.001, ThresholdTechnique::ExactChi2, s2, M});
  CHECK(prob_identify_event1(sv, ps, s2, K, M) > 0.99);

  // requires exactly one zero element
  const auto sv2 = steering_vector(arr, testutil::omega2_scenario());
  CHECK_THROWS_AS(prob_identify_event1(sv2, ps, 1.0, 1.0, M),
                  std::invalid_argument);
}

TEST_CASE("event-1 probability matches Monte Carlo") {
  const auto arr = ArrayConfig::canonical();
  const auto src = testutil::omega11_scenario();
  auto sv = steering_vector(arr, src);
  sv.compound[0] = 0;
  const int M = 50, trials = 30000;
  const std::vector<double> ps(M, 1.0);
  double mean_gain = 0;
  for (const auto& a : sv.compound) mean_gain += std::norm(a);
  mean_gain /= 4;
  const double s2 = mean_gain / std::pow(10.0, 2.0 / 10.0);  // 2 dB
  const double K = threshold({0.001, ThresholdTechnique::ExactChi2, s2, M});
  const double analytic = prob_identify_event1(sv, ps, s2, K, M);

  SubstreamRng rng(44, 0);
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    bool ok = true;
    for (int n = 0; n < 4 && ok; ++n) {
      double p = 0;
      for (int m = 0; m < M; ++m)
        p += std::norm(sv.compound[n] + rng.circular_gaussian(s2));
      p /= M;
      ok = (n == 0) ? (p < K) : (p >= K);
    }
    if (ok) ++hits;
  }
  const double emp = double(hits) / trials;
  const double se = std::sqrt(analytic * (1 - analytic) / trials);
  CHECK(std::abs(emp - analytic) < 3 * se + 1e-4);
}

TEST_CASE("event-2 identification probability") {
  const auto arr = ArrayConfig::canonical();
  const auto sv = steering_vector(arr, testutil::omega2_scenario());
  const int M = 50;
  const std::vector<double> ps(M, 1.0);

  // vanishing noise: every live power concentrates above K
  {
    const double s2 = 1e-4;
    const double K = threshold({0.001, ThresholdTechnique::ExactChi2, s2, M});
    // accuracy is limited by lgamma cancellation at huge noncentrality
    CHECK(prob_identify_event2(sv, ps, s2, K, M) >= 1.0 - 1e-7);
  }

  // near-dead everything: probability collapses
  {
    SteeringVector tiny = sv;
    for (auto& a : tiny.compound) a *= 1e-8;
    const double K = threshold({0.001, ThresholdTechnique::ExactChi2, 1.0, M});
    CHECK(prob_identify_event2(tiny, ps, 1.0, K, M) < 1e-6);
  }

  // Monte Carlo agreement at 0 dB
  double mean_gain = 0;
  for (const auto& a : sv.compound) mean_gain += std::norm(a);
  mean_gain /= 4;
  const double s2 = mean_gain;
  const double K = threshold({0.001, ThresholdTechnique::ExactChi2, s2, M});
  const double analytic = prob_identify_event2(sv, ps, s2, K, M);
  SubstreamRng rng(45, 0);
  const int trials = 30000;
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    bool ok = true;
    for (int n = 0; n < 4 && ok; ++n) {
      double p = 0;
      for (int m = 0; m < M; ++m)
        p += std::norm(sv.compound[n] + rng.circular_gaussian(s2));
      ok = p / M >= K;
    }
    if (ok) ++hits;
  }
  const double emp = double(hits) / trials;
  const double se = std::sqrt(std::max(analytic * (1 - analytic), 1e-8) / trials);
  CHECK(std::abs(emp - analytic) < 3 * se + 1e-3);
}

TEST_CASE("noise-only classification matches the pipeline inputs") {
  const int M = 50;
  const double s2 = 1.0;
  const auto snap = noise_only(4, M, s2, 77);
  const double K = threshold({0.001, ThresholdTechnique::ExactChi2, s2, M});
  const auto d = classify(measured_powers(snap), K);
  CHECK(d.report.powers.size() == 4);
  CHECK(d.report.threshold == doctest::Approx(K));
}

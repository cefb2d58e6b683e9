#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "ucadoa/numerics.hpp"
#include "ucadoa/rng.hpp"

using namespace ucadoa;

TEST_CASE("chi-square CDF closed forms") {
  // dof=2: F(u) = 1 - exp(-u/2)
  for (double u : {0.1, 0.5, 1.0, 2.0, 5.0, 20.0})
    CHECK(chi2_cdf(2, u) == doctest::Approx(1.0 - std::exp(-u / 2)).epsilon(1e-12));
  CHECK(chi2_cdf(2, 2.0) == doctest::Approx(0.6321205588285577).epsilon(1e-12));
  CHECK(chi2_cdf(100, 100.0) == doctest::Approx(0.5188083154720433).epsilon(1e-10));
  CHECK(chi2_cdf(4, 0.0) == 0.0);
  CHECK(chi2_cdf(4, 1e9) == doctest::Approx(1.0));
}

TEST_CASE("chi-square inverse CDF") {
  CHECK(chi2_cdf_inverse(100, 0.999) ==
        doctest::Approx(149.4492527790387).epsilon(1e-9));
  CHECK(chi2_cdf_inverse(2, 0.5) ==
        doctest::Approx(1.386294361119891).epsilon(1e-10));
  // round trip
  for (int dof : {2, 10, 100, 500})
    for (double p : {0.001, 0.1, 0.5, 0.9, 0.999}) {
      const double u = chi2_cdf_inverse(dof, p);
      CHECK(chi2_cdf(dof, u) == doctest::Approx(p).epsilon(1e-8));
    }
  CHECK_THROWS(chi2_cdf_inverse(10, -0.1));
  CHECK_THROWS(chi2_cdf_inverse(10, 1.0));
}

TEST_CASE("noncentral chi-square survival function") {
  // delta=0 collapses to the central distribution
  for (int dof : {2, 20, 100})
    for (double u : {1.0, double(dof), 3.0 * dof})
      CHECK(noncentral_chi2_sf(dof, 0.0, u) ==
            doctest::Approx(1.0 - chi2_cdf(dof, u)).epsilon(1e-10));

  CHECK(noncentral_chi2_sf(100, 200.0, 250.0) ==
        doctest::Approx(0.9486265768909704).epsilon(1e-10));

  // monotone in delta at fixed u
  double prev = 0;
  for (double d : {0.0, 10.0, 50.0, 100.0, 300.0}) {
    const double s = noncentral_chi2_sf(100, d, 150.0);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("noncentral chi-square matches a Monte Carlo oracle") {
  // sum over 100 dims of (z_i + mu_i)^2 with mu_1 = sqrt(200)
  const int dof = 100, trials = 200000;
  const double delta = 200.0, u = 250.0;
  SubstreamRng rng(2024, 0);
  int exceed = 0;
  for (int t = 0; t < trials; ++t) {
    double s = std::pow(rng.gaussian() + std::sqrt(delta), 2);
    for (int i = 1; i < dof; ++i) s += std::pow(rng.gaussian(), 2);
    if (s > u) ++exceed;
  }
  const double emp = double(exceed) / trials;
  const double p = noncentral_chi2_sf(dof, delta, u);
  const double se = std::sqrt(p * (1 - p) / trials);
  CHECK(std::abs(emp - p) < 4 * se + 1e-6);
}

TEST_CASE("gaussian tail") {
  CHECK(gaussian_q(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(gaussian_q(1.0) == doctest::Approx(0.15865525393145707).epsilon(1e-12));
  CHECK(gaussian_q(-1.0) == doctest::Approx(1.0 - 0.15865525393145707).epsilon(1e-12));
  CHECK(gaussian_q_inverse(0.001) == doctest::Approx(3.090232306167813).epsilon(1e-9));
  for (double p : {0.0001, 0.01, 0.3, 0.5, 0.8, 0.999})
    CHECK(gaussian_q(gaussian_q_inverse(p)) == doctest::Approx(p).epsilon(1e-9));
}

namespace {

CMat random_hermitian(int n, SubstreamRng& rng) {
  CMat a(n, n);
  for (int i = 0; i < n; ++i) {
    a(i, i) = rng.gaussian();
    for (int j = i + 1; j < n; ++j) {
      a(i, j) = cplx{rng.gaussian(), rng.gaussian()};
      a(j, i) = std::conj(a(i, j));
    }
  }
  return a;
}

}  // namespace

TEST_CASE("hermitian eigendecomposition, identity and rank one") {
  const auto id = hermitian_eig(CMat::identity(4));
  for (double ev : id.eigenvalues) CHECK(ev == doctest::Approx(1.0).epsilon(1e-12));

  // vv^H for unit v has eigenvalues {1, 0, 0}
  const std::vector<cplx> v{cplx{0.5, 0.5}, cplx{0.5, -0.5}, cplx{0, 0}};
  CMat r1(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r1(i, j) = v[i] * std::conj(v[j]);
  const auto e = hermitian_eig(r1);
  CHECK(e.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(e.eigenvalues[1]) < 1e-10);
  CHECK(std::abs(e.eigenvalues[2]) < 1e-10);
}

TEST_CASE("hermitian eigendecomposition reconstructs the matrix") {
  SubstreamRng rng(5, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 6;
    const CMat a = random_hermitian(n, rng);
    const auto e = hermitian_eig(a);
    // sorted descending
    for (int i = 1; i < n; ++i) CHECK(e.eigenvalues[i - 1] >= e.eigenvalues[i]);
    // orthonormal vectors
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        cplx dot{};
        for (int k = 0; k < n; ++k)
          dot += std::conj(e.eigenvectors[i][k]) * e.eigenvectors[j][k];
        CHECK(std::abs(dot - (i == j ? 1.0 : 0.0)) < 1e-9);
      }
    // A v = lambda v
    for (int i = 0; i < n; ++i) {
      const auto av = a.apply(e.eigenvectors[i]);
      for (int k = 0; k < n; ++k)
        CHECK(std::abs(av[k] - e.eigenvalues[i] * e.eigenvectors[i][k]) < 1e-8);
    }
  }
}

TEST_CASE("right null space") {
  // zero matrix: any orthonormal set works, residual must be zero
  const auto z = right_null_space(CMat(3, 3), 2);
  REQUIRE(z.size() == 2);

  // rank-2 3x3 matrix with known kernel direction (1,1,1)/sqrt3
  CMat a(3, 3);
  a(0, 0) = 1; a(0, 1) = -1; a(0, 2) = 0;
  a(1, 0) = 0; a(1, 1) = 1; a(1, 2) = -1;
  a(2, 0) = 2; a(2, 1) = -1; a(2, 2) = -1;
  const auto ns = right_null_space(a, 1);
  REQUIRE(ns.size() == 1);
  const auto r = a.apply(ns[0]);
  for (const auto& v : r) CHECK(std::abs(v) < 1e-10);
  CHECK(std::abs(ns[0][0] - ns[0][1]) < 1e-10);
  CHECK(std::abs(ns[0][1] - ns[0][2]) < 1e-10);
}

TEST_CASE("sample power of pure noise follows the scaled chi-square law") {
  // KS distance between chi2_cdf(2M) and the empirical law of (2M/s2) P_n
  const int M = 25, trials = 100000;
  const double s2 = 2.0;
  SubstreamRng rng(31, 0);
  std::vector<double> stats(trials);
  for (int t = 0; t < trials; ++t) {
    double p = 0;
    for (int m = 0; m < M; ++m) p += std::norm(rng.circular_gaussian(s2));
    stats[t] = 2.0 * p / s2;  // (2M / s2) * P with P = p / M
  }
  std::sort(stats.begin(), stats.end());
  double ks = 0;
  for (int t = 0; t < trials; ++t) {
    const double f = chi2_cdf(2 * M, stats[t]);
    ks = std::max(ks, std::abs(f - double(t + 1) / trials));
    ks = std::max(ks, std::abs(f - double(t) / trials));
  }
  CHECK(ks < 0.01);
}

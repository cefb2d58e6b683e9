#include "ucadoa/estimators.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <tuple>

#include "ucadoa/numerics.hpp"

namespace ucadoa {
namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

// An accumulated cross-product is usable only if it is phase-coherent:
// pure noise makes |sum| small relative to the sum of term magnitudes
// (ratio ~ 1/sqrt(M)), a real signal keeps the ratio near 1.
constexpr double kCoherenceFloor = 0.25;

struct ProductAcc {
  cplx sum{};
  double mag = 0;

  void add(cplx term) {
    sum += term;
    mag += std::abs(term);
  }
  double arg() const {
    if (mag <= 0 || std::abs(sum) < kCoherenceFloor * mag)
      throw EstimationError("degenerate phase accumulator");
    return std::arg(sum);
  }
};

struct GridNode {
  double theta_deg, phi_deg;
  double kappa1, kappa2;
  cplx e1, e2;  // exp(j kappa1), exp(j kappa2)
};

// Candidate phase tables are reused across Monte Carlo trials.
const std::vector<GridNode>& phase_table(const MusicGrid& grid, double r) {
  static std::mutex mu;
  static std::map<std::tuple<double, double, double>, std::vector<GridNode>> cache;
  std::scoped_lock lock(mu);
  auto key = std::make_tuple(grid.theta_step_deg, grid.phi_step_deg, r);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;

  std::vector<GridNode> nodes;
  nodes.reserve(static_cast<size_t>(grid.theta_count()) * grid.phi_count());
  for (int ti = 0; ti < grid.theta_count(); ++ti) {
    const double theta = ti * grid.theta_step_deg;
    const double kappa = 2.0 * kPi * r * std::sin(deg2rad(theta));
    for (int pi = 0; pi < grid.phi_count(); ++pi) {
      const double phi = pi * grid.phi_step_deg;
      GridNode n;
      n.theta_deg = theta;
      n.phi_deg = phi;
      n.kappa1 = kappa * std::cos(deg2rad(phi));
      n.kappa2 = kappa * std::sin(deg2rad(phi));
      n.e1 = std::polar(1.0, n.kappa1);
      n.e2 = std::polar(1.0, n.kappa2);
      nodes.push_back(n);
    }
  }
  return cache.emplace(key, std::move(nodes)).first->second;
}

// Entry k of the clean canonical 4-vector [e1, e2, conj(e1), conj(e2)].
inline cplx clean_entry(const GridNode& n, int k) {
  switch (k) {
    case 0: return n.e1;
    case 1: return n.e2;
    case 2: return std::conj(n.e1);
    default: return std::conj(n.e2);
  }
}

// Scan the grid row-major (theta outer, phi inner) minimizing the MUSIC
// denominator ||E^H s||^2 for the 3-element clean steering with the given
// canonical entries; first node wins on exact ties.
DoaEstimate clean_grid_search(const std::vector<std::vector<cplx>>& noise_subspace,
                              const std::array<int, 3>& entries,
                              const MusicGrid& grid, double r) {
  const auto& nodes = phase_table(grid, r);
  double best = std::numeric_limits<double>::infinity();
  const GridNode* best_node = nullptr;
  for (const GridNode& n : nodes) {
    const cplx s0 = clean_entry(n, entries[0]);
    const cplx s1 = clean_entry(n, entries[1]);
    const cplx s2 = clean_entry(n, entries[2]);
    double denom = 0;
    for (const auto& v : noise_subspace)
      denom += std::norm(std::conj(v[0]) * s0 + std::conj(v[1]) * s1 +
                         std::conj(v[2]) * s2);
    if (denom < best) {
      best = denom;
      best_node = &n;
    }
  }
  DoaEstimate est;
  est.theta_deg = best_node->theta_deg;
  est.phi_deg = best_node->phi_deg;
  est.phases = {best_node->kappa1, best_node->kappa2};
  return est;
}

std::array<int, 3> live_entries(int dead) {
  std::array<int, 3> e{};
  int k = 0;
  for (int n = 0; n < 4; ++n)
    if (n != dead) e[k++] = n;
  return e;
}

void require_canonical(const ArrayConfig& arr) {
  arr.validate_for_estimation();
  if (!arr.is_canonical())
    throw std::invalid_argument("estimator requires the canonical 4-element array");
}

}  // namespace

const char* algorithm_name(Algorithm a) {
  switch (a) {
    case Algorithm::Cf: return "cf";
    case Algorithm::CmusicM1: return "cmusic-m1";
    case Algorithm::CmusicM2: return "cmusic-m2";
    default: return "baseline-music";
  }
}

Algorithm algorithm_from_name(const std::string& s) {
  if (s == "cf") return Algorithm::Cf;
  if (s == "cmusic-m1") return Algorithm::CmusicM1;
  if (s == "cmusic-m2") return Algorithm::CmusicM2;
  if (s == "baseline-music") return Algorithm::BaselineMusic;
  throw std::invalid_argument("unknown algorithm: " + s);
}

std::array<double, 3> f_matrix(int dead) {
  switch (dead) {
    case 0: return {1.0, 1.0 / kSqrt2, 1.0};
    case 1: return {1.0, -1.0, -1.0 / kSqrt2};
    case 2: return {1.0, kSqrt2, -kSqrt2};
    case 3: return {1.0, 1.0 / kSqrt2, 1.0};
    default: throw std::invalid_argument("dead antenna index must be 0..3");
  }
}

PhasePair phases_event1(const SnapshotSet& snap, int dead) {
  if (snap.n_antennas != 4) throw std::invalid_argument("need 4 antennas");
  if (dead < 0 || dead > 3) throw std::invalid_argument("dead antenna index must be 0..3");

  ProductAcc a, b;
  for (int m = 0; m < snap.m_samples; ++m) {
    const cplx x0 = snap.at(0, m), x1 = snap.at(1, m);
    const cplx x2 = snap.at(2, m), x3 = snap.at(3, m);
    switch (dead) {
      case 0:
        a.add(x1 * std::conj(x3));  // arg = 2 kappa2
        b.add(x1 * std::conj(x2));  // arg = kappa1 + kappa2
        break;
      case 1:
        a.add(-x0 * std::conj(x2));  // arg = 2 kappa1
        b.add(-x0 * std::conj(x3));  // arg = kappa1 + kappa2
        break;
      case 2:
        a.add(-x1 * std::conj(x3));  // arg = 2 kappa2
        b.add(x0 * std::conj(x1));   // arg = kappa1 - kappa2
        break;
      default:
        a.add(x0 * std::conj(x2));  // arg = 2 kappa1
        b.add(x1 * std::conj(x0));  // arg = kappa2 - kappa1
        break;
    }
  }

  PhasePair p;
  switch (dead) {
    case 0:
      p.kappa2 = 0.5 * a.arg();
      p.kappa1 = b.arg() - p.kappa2;
      break;
    case 1:
      p.kappa1 = 0.5 * a.arg();
      p.kappa2 = b.arg() - p.kappa1;
      break;
    case 2:
      p.kappa2 = 0.5 * a.arg();
      p.kappa1 = b.arg() + p.kappa2;
      break;
    default:
      p.kappa1 = 0.5 * a.arg();
      p.kappa2 = b.arg() + p.kappa1;
      break;
  }
  return p;
}

PhasePair phases_event2(const SnapshotSet& snap) {
  if (snap.n_antennas != 4) throw std::invalid_argument("need 4 antennas");
  ProductAcc diff, sum;
  for (int m = 0; m < snap.m_samples; ++m) {
    const cplx x0 = snap.at(0, m), x1 = snap.at(1, m);
    const cplx x2 = snap.at(2, m), x3 = snap.at(3, m);
    diff.add(x0 * std::conj(x1) + std::conj(x2) * x3);  // arg = kappa1 - kappa2
    sum.add(-x0 * std::conj(x3) + std::conj(x2) * x1);  // arg = kappa1 + kappa2
  }
  const double d = diff.arg();
  const double s = sum.arg();
  return {0.5 * (s + d), 0.5 * (s - d)};
}

DoaEstimate cf_estimate(const PhasePair& phases, double r_over_lambda,
                        double eps_zero) {
  if (r_over_lambda <= 0) throw std::invalid_argument("r/lambda must be > 0");
  DoaEstimate est;
  est.method = Algorithm::Cf;
  est.phases = phases;
  const double kappa = std::hypot(phases.kappa1, phases.kappa2);
  if (kappa <= eps_zero) {
    est.theta_deg = 0;
    return est;  // source along the z-axis; azimuth has no significance
  }
  double phi = rad2deg(std::atan2(phases.kappa2, phases.kappa1));
  if (phi < 0) phi += 360.0;
  if (phi >= 360.0) phi -= 360.0;
  est.phi_deg = phi;
  const double ratio = std::min(kappa / (2.0 * kPi * r_over_lambda), 1.0);
  est.theta_deg = rad2deg(std::asin(ratio));
  return est;
}

DoaEstimate cmusic_method1(const SnapshotSet& snap, int dead,
                           const ArrayConfig& arr, const MusicGrid& grid,
                           double sigma2) {
  require_canonical(arr);
  if (snap.n_antennas != 4) throw std::invalid_argument("need 4 antennas");
  const auto entries = live_entries(dead);

  // 3x3 sample autocorrelation of the live antennas, noise term removed.
  CMat r_hat(3, 3);
  for (int m = 0; m < snap.m_samples; ++m) {
    cplx x[3];
    for (int i = 0; i < 3; ++i) x[i] = snap.at(entries[i], m);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) r_hat(i, j) += x[i] * std::conj(x[j]);
  }
  const double inv_m = 1.0 / snap.m_samples;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      r_hat(i, j) *= inv_m;
      if (i == j) r_hat(i, j) -= sigma2;
    }

  const auto f = f_matrix(dead);
  CMat g(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) g(i, j) = r_hat(i, j) * f[j];

  const auto null_space = right_null_space(g, 2);
  DoaEstimate est = clean_grid_search(null_space, entries, grid, arr.radius);
  est.method = Algorithm::CmusicM1;
  return est;
}

DoaEstimate cmusic_method2(const SnapshotSet& snap, const EventDecision& event,
                           const ArrayConfig& arr, const MusicGrid& grid) {
  require_canonical(arr);
  const PhasePair phases = event.is_omega2() ? phases_event2(snap)
                                             : phases_event1(snap, event.dead_antenna);
  // Clean 3-element steering: Event 1 drops the dead antenna, Event 2
  // drops antenna 4.
  const std::array<int, 3> entries =
      event.is_omega2() ? std::array<int, 3>{0, 1, 2} : live_entries(event.dead_antenna);

  const cplx e1 = std::polar(1.0, phases.kappa1);
  const cplx e2 = std::polar(1.0, phases.kappa2);
  const cplx four[4] = {e1, e2, std::conj(e1), std::conj(e2)};
  CMat r_sc(3, 3);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      r_sc(i, j) = four[entries[i]] * std::conj(four[entries[j]]);

  const EigenDecomposition eig = hermitian_eig(r_sc);
  std::vector<std::vector<cplx>> noise_subspace{eig.eigenvectors[1],
                                                eig.eigenvectors[2]};
  DoaEstimate est = clean_grid_search(noise_subspace, entries, grid, arr.radius);
  est.method = Algorithm::CmusicM2;
  est.phases = phases;
  est.event = event;
  return est;
}

DoaEstimate baseline_music(const SnapshotSet& snap, const ArrayConfig& arr,
                           const MusicGrid& grid) {
  const int n_el = snap.n_antennas;
  if (n_el < 3) throw std::invalid_argument("baseline MUSIC needs N >= 3");
  if (n_el > 8) throw std::invalid_argument("eigensolver is limited to N <= 8");

  CMat r_hat(n_el, n_el);
  for (int m = 0; m < snap.m_samples; ++m)
    for (int i = 0; i < n_el; ++i)
      for (int j = 0; j < n_el; ++j)
        r_hat(i, j) += snap.at(i, m) * std::conj(snap.at(j, m));
  const double inv_m = 1.0 / snap.m_samples;
  for (int i = 0; i < n_el; ++i)
    for (int j = 0; j < n_el; ++j) r_hat(i, j) *= inv_m;

  if (r_hat.frobenius_norm() < 1e-30)
    throw EstimationError("all-zero snapshot data; no spectrum peak exists");

  const EigenDecomposition eig = hermitian_eig(r_hat);
  std::vector<std::vector<cplx>> noise(n_el - 1);
  for (int l = 1; l < n_el; ++l) noise[l - 1] = eig.eigenvectors[l];

  std::vector<double> beta(n_el);
  for (int n = 0; n < n_el; ++n) beta[n] = deg2rad(arr.positions_deg[n]);

  double best = std::numeric_limits<double>::infinity();
  DoaEstimate est;
  std::vector<cplx> a_s(n_el);
  for (int ti = 0; ti < grid.theta_count(); ++ti) {
    const double theta = ti * grid.theta_step_deg;
    const double kappa = 2.0 * kPi * arr.radius * std::sin(deg2rad(theta));
    for (int pi = 0; pi < grid.phi_count(); ++pi) {
      const double phi = deg2rad(pi * grid.phi_step_deg);
      for (int n = 0; n < n_el; ++n)
        a_s[n] = std::polar(1.0, kappa * std::cos(phi - beta[n]));
      double denom = 0;
      for (const auto& v : noise) {
        cplx acc{};
        for (int n = 0; n < n_el; ++n) acc += std::conj(v[n]) * a_s[n];
        denom += std::norm(acc);
      }
      if (denom < best) {
        best = denom;
        est.theta_deg = theta;
        est.phi_deg = pi * grid.phi_step_deg;
      }
    }
  }
  est.method = Algorithm::BaselineMusic;
  return est;
}

DoaEstimate estimate(const SnapshotSet& snap, const ThresholdConfig& cfg,
                     Algorithm algorithm, const ArrayConfig& arr,
                     const MusicGrid& grid) {
  require_canonical(arr);
  const double K = threshold(cfg);
  const EventDecision event = classify(measured_powers(snap), K);

  DoaEstimate est;
  switch (algorithm) {
    case Algorithm::Cf: {
      const PhasePair phases = event.is_omega2()
                                   ? phases_event2(snap)
                                   : phases_event1(snap, event.dead_antenna);
      const double eps_zero = snap.noise_power > 0 ? 0.0 : 1e-9;
      est = cf_estimate(phases, arr.radius, eps_zero);
      break;
    }
    case Algorithm::CmusicM1:
      if (event.is_omega2())
        throw std::invalid_argument("cmusic-m1 is unsupported under Event 2");
      est = cmusic_method1(snap, event.dead_antenna, arr, grid, cfg.noise_power);
      break;
    case Algorithm::CmusicM2:
      est = cmusic_method2(snap, event, arr, grid);
      break;
    default:
      throw std::invalid_argument("estimate() dispatches cf / cmusic-m1 / cmusic-m2 only");
  }
  est.event = event;
  return est;
}

}  // namespace ucadoa

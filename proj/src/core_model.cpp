#include "ucadoa/core_model.hpp"

#include <cmath>
#include <set>

#include "ucadoa/rng.hpp"

namespace ucadoa {

ArrayConfig ArrayConfig::canonical(double radius) {
  ArrayConfig a;
  a.n_elements = 4;
  a.radius = radius;
  a.alignments_deg = canonical_alignment();
  a.positions_deg = {0, 90, 180, 270};
  return a;
}

ArrayConfig ArrayConfig::uniform(int n_elements, double radius,
                                 std::vector<double> alignments_deg) {
  if (n_elements < 3) throw std::invalid_argument("need at least 3 elements");
  if (static_cast<int>(alignments_deg.size()) != n_elements)
    throw std::invalid_argument("alignment count must match element count");
  ArrayConfig a;
  a.n_elements = n_elements;
  a.radius = radius;
  a.alignments_deg = std::move(alignments_deg);
  a.positions_deg.resize(n_elements);
  for (int n = 0; n < n_elements; ++n)
    a.positions_deg[n] = 360.0 * n / n_elements;
  return a;
}

bool ArrayConfig::is_canonical() const {
  if (n_elements != 4) return false;
  const auto want = canonical_alignment();
  for (int n = 0; n < 4; ++n) {
    if (std::abs(alignments_deg[n] - want[n]) > 1e-9) return false;
    if (std::abs(positions_deg[n] - 90.0 * n) > 1e-9) return false;
  }
  return true;
}

void ArrayConfig::validate_for_estimation() const {
  if (n_elements < 4)
    throw std::invalid_argument("estimation pipeline needs N >= 4");
  if (radius <= 0 || radius > 0.25)
    throw std::invalid_argument("estimation pipeline needs 0 < r/lambda <= 0.25");
  if (static_cast<int>(alignments_deg.size()) != n_elements ||
      static_cast<int>(positions_deg.size()) != n_elements)
    throw std::invalid_argument("alignment/position lists must match element count");
  for (double z : alignments_deg)
    if (z < 0 || z >= 180)
      throw std::invalid_argument("alignments must lie in [0, 180)");
  if (!validate_alignment(alignments_deg))
    throw std::invalid_argument("alignments must be pairwise distinct mod 180");
}

std::vector<double> canonical_alignment() { return {0, 45, 90, 135}; }

bool validate_alignment(const std::vector<double>& zetas_deg) {
  const double eps = 1e-9;
  for (size_t i = 0; i < zetas_deg.size(); ++i) {
    for (size_t j = i + 1; j < zetas_deg.size(); ++j) {
      double d = std::fmod(std::abs(zetas_deg[i] - zetas_deg[j]), 180.0);
      if (d < eps || d > 180.0 - eps) return false;
    }
  }
  return true;
}

void SourceParams::validate() const {
  if (theta_deg < 0 || theta_deg > 90)
    throw std::invalid_argument("theta must be in [0, 90]");
  if (phi_deg < 0 || phi_deg >= 360)
    throw std::invalid_argument("phi must be in [0, 360)");
  if (gamma_deg < 0 || gamma_deg > 90)
    throw std::invalid_argument("gamma must be in [0, 90]");
  if (eta_deg < 0 || eta_deg >= 360)
    throw std::invalid_argument("eta must be in [0, 360)");
}

FieldComponents field_components(const SourceParams& src) {
  const double theta = deg2rad(src.theta_deg);
  const double phi = deg2rad(src.phi_deg);
  const double gamma = deg2rad(src.gamma_deg);
  const double eta = deg2rad(src.eta_deg);
  const cplx ph = std::polar(1.0, eta);
  const double sg = std::sin(gamma), cg = std::cos(gamma);
  const double ct = std::cos(theta);
  FieldComponents f;
  f.ex = ph * (sg * ct * std::cos(phi)) - std::sin(phi) * cg;
  f.ey = ph * (sg * ct * std::sin(phi)) + std::cos(phi) * cg;
  return f;
}

cplx element_voltage(const FieldComponents& f, double zeta_deg) {
  const double z = deg2rad(zeta_deg);
  return f.ex * std::cos(z) + f.ey * std::sin(z);
}

SteeringVector steering_vector(const ArrayConfig& arr, const SourceParams& src) {
  const FieldComponents f = field_components(src);
  const double theta = deg2rad(src.theta_deg);
  const double phi = deg2rad(src.phi_deg);
  const double kappa = 2.0 * kPi * arr.radius * std::sin(theta);
  SteeringVector sv;
  sv.compound.resize(arr.n_elements);
  sv.field_part.resize(arr.n_elements);
  sv.phase_part.resize(arr.n_elements);
  for (int n = 0; n < arr.n_elements; ++n) {
    const double beta = deg2rad(arr.positions_deg[n]);
    const double ph = kappa * std::cos(phi - beta);
    sv.phase_part[n] = ph;
    sv.field_part[n] = element_voltage(f, arr.alignments_deg[n]);
    sv.compound[n] = sv.field_part[n] * std::polar(1.0, ph);
  }
  return sv;
}

SnapshotSet synthesize(const ArrayConfig& arr, const SourceParams& src,
                       int m_samples, double noise_power,
                       SignalModel signal_model, std::uint64_t seed) {
  if (m_samples < 1) throw std::invalid_argument("need m_samples >= 1");
  if (noise_power < 0) throw std::invalid_argument("noise power must be >= 0");
  src.validate();

  const SteeringVector sv = steering_vector(arr, src);
  SnapshotSet snap;
  snap.n_antennas = arr.n_elements;
  snap.m_samples = m_samples;
  snap.samples.resize(static_cast<size_t>(arr.n_elements) * m_samples);
  snap.signal_powers.resize(m_samples);
  snap.noise_power = noise_power;
  snap.seed = seed;

  SubstreamRng rng(seed, 0);
  std::vector<cplx> s(m_samples);
  for (int m = 0; m < m_samples; ++m) {
    s[m] = (signal_model == SignalModel::ConstantUnit)
               ? cplx{1.0, 0.0}
               : rng.circular_gaussian(1.0);
    snap.signal_powers[m] = std::norm(s[m]);
  }
  for (int n = 0; n < arr.n_elements; ++n) {
    for (int m = 0; m < m_samples; ++m) {
      cplx w = noise_power > 0 ? rng.circular_gaussian(noise_power) : cplx{};
      snap.at(n, m) = sv.compound[n] * s[m] + w;
    }
  }
  return snap;
}

}  // namespace ucadoa

#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace ucadoa {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

/// Thrown when an estimator cannot produce a trustworthy answer
/// (degenerate input, near-zero phase accumulators, no convergence).
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Uniform circular array: N short dipoles on a circle of radius `radius`
/// (expressed as r/lambda), element n at azimuth positions_deg[n] with its
/// dipole axis rotated alignments_deg[n] from the x-axis. Antennas are
/// indexed from 0 throughout the code.
struct ArrayConfig {
  int n_elements = 4;
  double radius = 0.2;  // r/lambda
  std::vector<double> alignments_deg;
  std::vector<double> positions_deg;

  /// The 4-element array used by all estimators: alignments 0/45/90/135,
  /// elements at 0/90/180/270 degrees.
  static ArrayConfig canonical(double radius = 0.2);

  /// Arbitrary N >= 3 array with equally spaced positions, for the
  /// conventional-MUSIC baseline.
  static ArrayConfig uniform(int n_elements, double radius,
                             std::vector<double> alignments_deg);

  bool is_canonical() const;

  /// Checks the constraints required by the estimation pipeline
  /// (N >= 4, admissible alignments, r/lambda <= 0.25). Throws on violation.
  void validate_for_estimation() const;
};

/// Returns [0, 45, 90, 135] degrees.
std::vector<double> canonical_alignment();

/// True iff all alignment angles are pairwise distinct mod 180 degrees,
/// so no two dipole axes coincide.
bool validate_alignment(const std::vector<double>& zetas_deg);

/// Ground-truth DOA and polarization of the single source, degrees.
struct SourceParams {
  double theta_deg = 0;  // elevation, [0, 90]
  double phi_deg = 0;    // azimuth, [0, 360)
  double gamma_deg = 0;  // auxiliary polarization angle, [0, 90)
  double eta_deg = 0;    // polarization phase difference, [0, 360)

  void validate() const;
};

/// Electric-field response along x and y for a given source.
struct FieldComponents {
  cplx ex;
  cplx ey;

  /// Both components vanish iff theta=90 and gamma=90; the source is in the
  /// xy-plane and no dipole in the plane can see it.
  bool degenerate(double eps = 1e-12) const {
    return std::abs(ex) < eps && std::abs(ey) < eps;
  }
};

/// Compound array manifold: a_n = e_n * a_s_n.
struct SteeringVector {
  std::vector<cplx> compound;     // a_n
  std::vector<cplx> field_part;   // e_n
  std::vector<double> phase_part; // arg(a_s_n), radians
};

enum class SignalModel {
  ConstantUnit,  // s(m) = 1
  GaussianUnit,  // s(m) i.i.d. circular complex Gaussian, unit power
};

/// N x M complex snapshot matrix plus the parameters used to generate it.
struct SnapshotSet {
  int n_antennas = 0;
  int m_samples = 0;
  std::vector<cplx> samples;  // row-major N x M
  double noise_power = 0;     // sigma^2, linear
  std::vector<double> signal_powers;  // |s(m)|^2 per sample
  std::optional<std::uint64_t> seed;  // absent for externally loaded data

  cplx at(int n, int m) const { return samples[static_cast<size_t>(n) * m_samples + m]; }
  cplx& at(int n, int m) { return samples[static_cast<size_t>(n) * m_samples + m]; }
};

}  // namespace ucadoa

#pragma once

#include "ucadoa/types.hpp"

namespace ucadoa {

/// Electric-field components seen by x- and y-aligned short dipoles:
///   e_x = e^{j eta} sin(gamma) cos(theta) cos(phi) - sin(phi) cos(gamma)
///   e_y = e^{j eta} sin(gamma) cos(theta) sin(phi) + cos(phi) cos(gamma)
/// The all-zero result (theta=90 and gamma=90) is a valid return; callers
/// must check degenerate().
FieldComponents field_components(const SourceParams& src);

/// Voltage at a dipole rotated zeta degrees from the x-axis:
/// e_x cos(zeta) + e_y sin(zeta).
cplx element_voltage(const FieldComponents& f, double zeta_deg);

/// Compound steering vector a_n = e_n * exp(j 2 pi (r/lambda) sin(theta)
/// cos(phi - beta_n)) for every element of the array.
SteeringVector steering_vector(const ArrayConfig& arr, const SourceParams& src);

/// Seeded synthesis of x(m) = a s(m) + w(m). Deterministic given the seed
/// and all parameters.
SnapshotSet synthesize(const ArrayConfig& arr, const SourceParams& src,
                       int m_samples, double noise_power,
                       SignalModel signal_model, std::uint64_t seed);

}  // namespace ucadoa

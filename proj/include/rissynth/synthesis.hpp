#pragma once

#include "rissynth/geometry.hpp"
#include "rissynth/phase_profile.hpp"

#include <span>

namespace rissynth {

// Continuous compensation steering one beam, reduced to [0, 2*pi):
//   delta(x, y) = -k * (Dx cos(phi) sin(theta) + Dy sin(phi) sin(theta)).
// The sign makes every element phasor align at (theta, phi).
Matrix<double> single_beam_compensation(const ArrayGeometry &geometry, const BeamSpec &beam);

// Element-wise quantization of single_beam_compensation.
PhaseProfile single_beam_profile(const ArrayGeometry &geometry, const BeamSpec &beam);

// Multi-beam profile: per element, the arithmetic mean of the quantized
// per-beam phases, re-quantized to the nearest level (ties to the smaller).
// The mean is formed exactly from the integer level indices, so the result
// does not depend on beam order. Throws DomainError for an empty beam list.
PhaseProfile superpose_profiles(const ArrayGeometry &geometry, std::span<const BeamSpec> beams);

} // namespace rissynth

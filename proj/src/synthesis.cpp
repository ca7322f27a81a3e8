#include "rissynth/synthesis.hpp"

#include "rissynth/error.hpp"
#include "rissynth/farfield.hpp"

#include <cstdint>

namespace rissynth {

Matrix<double> single_beam_compensation(const ArrayGeometry &geometry, const BeamSpec &beam)
{
    validate_beam(beam);
    const double k = geometry.wavenumber();
    Matrix<double> opd = optical_path_difference(geometry, beam.theta_deg, beam.phi_deg);
    for (double &v : opd)
        v = wrap_phase(-k * v);
    return opd;
}

PhaseProfile single_beam_profile(const ArrayGeometry &geometry, const BeamSpec &beam)
{
    const Matrix<double> delta = single_beam_compensation(geometry, beam);
    LevelMatrix levels(delta.rows(), delta.cols());
    for (std::size_t r = 0; r < delta.rows(); ++r)
        for (std::size_t c = 0; c < delta.cols(); ++c)
            levels(r, c) = phase_to_level(delta(r, c), geometry.resolution_bits());
    return PhaseProfile(std::move(levels), geometry.resolution_bits());
}

PhaseProfile superpose_profiles(const ArrayGeometry &geometry, std::span<const BeamSpec> beams)
{
    if (beams.empty())
        throw DomainError("superposition needs at least one beam");

    // level_to_phase(l) = (2l - 1) * pi / L, so the mean phase over D beams sits
    // at S / (2D) level steps with S = sum(2l - 1). Nearest level is ceil of
    // that, and an exact boundary (S divisible by 2D) resolves to the smaller
    // level, which ceil also yields. S / (2D) lies strictly inside (0, L).
    const auto d = static_cast<std::int64_t>(beams.size());
    LevelMatrix sums(geometry.rows(), geometry.cols(), 0);
    for (const BeamSpec &beam : beams) {
        const PhaseProfile single = single_beam_profile(geometry, beam);
        for (std::size_t r = 0; r < sums.rows(); ++r)
            for (std::size_t c = 0; c < sums.cols(); ++c)
                sums(r, c) += 2 * single(r, c) - 1;
    }

    LevelMatrix levels(geometry.rows(), geometry.cols());
    for (std::size_t r = 0; r < sums.rows(); ++r)
        for (std::size_t c = 0; c < sums.cols(); ++c) {
            const std::int64_t s = sums(r, c);
            levels(r, c) = static_cast<int>((s + 2 * d - 1) / (2 * d));
        }
    return PhaseProfile(std::move(levels), geometry.resolution_bits());
}

} // namespace rissynth

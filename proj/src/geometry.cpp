#include "rissynth/geometry.hpp"

#include "rissynth/error.hpp"

#include <cmath>
#include <string>

namespace rissynth {

namespace {

void check_resolution(int resolution_bits)
{
    if (resolution_bits < 1 || resolution_bits > 16)
        throw DomainError("resolution_bits must be in [1, 16], got " + std::to_string(resolution_bits));
}

std::vector<double> uniform_samples(const char *axis, double start, double stop, double step)
{
    if (!std::isfinite(start) || !std::isfinite(stop) || !std::isfinite(step))
        throw DomainError(std::string(axis) + " range must be finite");
    if (step <= 0.0)
        throw DomainError(std::string(axis) + " step must be positive");
    if (stop < start)
        throw DomainError(std::string(axis) + " stop must not be below start");

    const auto steps = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9));
    std::vector<double> samples(steps + 1);
    for (std::size_t i = 0; i < samples.size(); ++i)
        samples[i] = start + static_cast<double>(i) * step;
    return samples;
}

} // namespace

ArrayGeometry::ArrayGeometry(std::size_t rows, std::size_t cols, double spacing_m, double frequency_hz,
                             double element_amplitude, int resolution_bits)
    : rows_(rows), cols_(cols), spacing_(spacing_m), frequency_(frequency_hz),
      amplitude_(element_amplitude), bits_(resolution_bits)
{
    if (rows_ < 1 || cols_ < 1)
        throw DomainError("array must have at least one row and one column");
    if (!std::isfinite(spacing_) || spacing_ <= 0.0)
        throw DomainError("element spacing must be positive");
    if (!std::isfinite(frequency_) || frequency_ <= 0.0)
        throw DomainError("frequency must be positive");
    if (!std::isfinite(amplitude_) || amplitude_ <= 0.0 || amplitude_ > 1.0)
        throw DomainError("element amplitude must be in (0, 1]");
    check_resolution(bits_);
}

void validate_beam(const BeamSpec &beam)
{
    if (!std::isfinite(beam.theta_deg) || !std::isfinite(beam.phi_deg))
        throw DomainError("beam angles must be finite");
    if (beam.theta_deg < -90.0 || beam.theta_deg > 90.0)
        throw DomainError("beam theta must be in [-90, 90] degrees, got " + std::to_string(beam.theta_deg));
    if (beam.phi_deg < 0.0 || beam.phi_deg >= 360.0)
        throw DomainError("beam phi must be in [0, 360) degrees, got " + std::to_string(beam.phi_deg));
}

AngularGrid AngularGrid::uniform(double theta_start, double theta_stop, double theta_step,
                                 double phi_start, double phi_stop, double phi_step)
{
    AngularGrid grid;
    grid.theta_ = uniform_samples("theta", theta_start, theta_stop, theta_step);
    grid.phi_ = uniform_samples("phi", phi_start, phi_stop, phi_step);
    grid.theta_step_ = theta_step;
    grid.phi_step_ = phi_step;
    return grid;
}

AngularGrid AngularGrid::standard()
{
    return uniform(-90.0, 90.0, 1.0, 0.0, 179.0, 1.0);
}

double wrap_phase(double phase) noexcept
{
    double r = std::fmod(phase, kTwoPi);
    if (r < 0.0)
        r += kTwoPi;
    if (r >= kTwoPi)
        r = 0.0;
    return r + 0.0; // no negative zero
}

double circular_distance(double a, double b) noexcept
{
    const double d = wrap_phase(a - b);
    return d > std::numbers::pi ? kTwoPi - d : d;
}

double level_to_phase(int level, int resolution_bits)
{
    check_resolution(resolution_bits);
    const int levels = 1 << resolution_bits;
    if (level < 1 || level > levels)
        throw DomainError("level " + std::to_string(level) + " outside [1, " + std::to_string(levels) +
                          "] for K = " + std::to_string(resolution_bits));
    return static_cast<double>(2 * level - 1) * std::numbers::pi / static_cast<double>(levels);
}

int phase_to_level(double phase, int resolution_bits)
{
    check_resolution(resolution_bits);
    if (!std::isfinite(phase))
        throw DomainError("cannot quantize a non-finite phase");

    // Level l is centred at position l - 1/2 in units of one level step, so
    // the decision boundaries sit on the integers.
    const int levels = 1 << resolution_bits;
    const double t = wrap_phase(phase) * static_cast<double>(levels) / kTwoPi;
    const double nearest_boundary = std::round(t);
    if (std::abs(t - nearest_boundary) < 1e-9) {
        const int m = static_cast<int>(nearest_boundary);
        return (m == 0 || m == levels) ? 1 : m;
    }
    return static_cast<int>(std::ceil(t));
}

} // namespace rissynth

#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

namespace rissynth {

inline constexpr double kSpeedOfLight = 299'792'458.0; // m/s
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

inline constexpr double deg_to_rad(double deg) noexcept { return deg * (std::numbers::pi / 180.0); }
inline constexpr double rad_to_deg(double rad) noexcept { return rad * (180.0 / std::numbers::pi); }

// Planar rectangular array under normal incidence. Element (x, y), zero-based,
// sits at (x * spacing, y * spacing): the array corner is the origin and the
// row index runs along the x axis.
class ArrayGeometry {
public:
    // Throws DomainError unless rows, cols >= 1, spacing > 0, frequency > 0,
    // amplitude in (0, 1] and 1 <= resolution_bits <= 16.
    ArrayGeometry(std::size_t rows, std::size_t cols, double spacing_m, double frequency_hz,
                  double element_amplitude = 0.7, int resolution_bits = 2);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t element_count() const noexcept { return rows_ * cols_; }
    double spacing() const noexcept { return spacing_; }
    double frequency() const noexcept { return frequency_; }
    double element_amplitude() const noexcept { return amplitude_; }
    int resolution_bits() const noexcept { return bits_; }
    int level_count() const noexcept { return 1 << bits_; }

    double wavelength() const noexcept { return kSpeedOfLight / frequency_; }
    double wavenumber() const noexcept { return kTwoPi / wavelength(); }

    double x_position(std::size_t row) const noexcept { return static_cast<double>(row) * spacing_; }
    double y_position(std::size_t col) const noexcept { return static_cast<double>(col) * spacing_; }

    friend bool operator==(const ArrayGeometry &, const ArrayGeometry &) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    double spacing_;
    double frequency_;
    double amplitude_;
    int bits_;
};

// Reflected beam direction. theta is measured from broadside, phi is the
// azimuth from the x axis (the convention of the OPD formula).
struct BeamSpec {
    double theta_deg = 0.0;
    double phi_deg = 0.0;

    friend bool operator==(const BeamSpec &, const BeamSpec &) = default;
};

// Throws DomainError for non-finite angles, theta outside [-90, 90] or phi outside [0, 360).
void validate_beam(const BeamSpec &beam);

// Uniform (theta, phi) evaluation grid in degrees. Point (i, j) has flat index
// i * phi_count() + j, i.e. row-major over theta then phi.
class AngularGrid {
public:
    // Inclusive ranges; the sample count along each axis is the number of
    // whole steps that fit plus one.
    static AngularGrid uniform(double theta_start, double theta_stop, double theta_step,
                               double phi_start, double phi_stop, double phi_step);

    // theta in [-90, 90], phi in [0, 179], both at 1 degree: 181 x 180 points.
    static AngularGrid standard();

    const std::vector<double> &theta_samples() const noexcept { return theta_; }
    const std::vector<double> &phi_samples() const noexcept { return phi_; }
    double theta_step() const noexcept { return theta_step_; }
    double phi_step() const noexcept { return phi_step_; }

    std::size_t theta_count() const noexcept { return theta_.size(); }
    std::size_t phi_count() const noexcept { return phi_.size(); }
    std::size_t size() const noexcept { return theta_.size() * phi_.size(); }
    std::size_t index(std::size_t i, std::size_t j) const noexcept { return i * phi_.size() + j; }

    friend bool operator==(const AngularGrid &, const AngularGrid &) = default;

private:
    AngularGrid() = default;

    std::vector<double> theta_;
    std::vector<double> phi_;
    double theta_step_ = 0.0;
    double phi_step_ = 0.0;
};

// Phase of a quantization level: (2 * level - 1) * pi / 2^K.
// Throws DomainError unless 1 <= level <= 2^K.
double level_to_phase(int level, int resolution_bits);

// Nearest level on the circle; exact ties (and anything within 1e-9 of a
// level boundary, in units of one level step) go to the smaller level.
// Throws DomainError for a non-finite phase.
int phase_to_level(double phase, int resolution_bits);

// Reduces a phase into [0, 2*pi).
double wrap_phase(double phase) noexcept;

// Shortest angular distance between two phases, in [0, pi].
double circular_distance(double a, double b) noexcept;

} // namespace rissynth

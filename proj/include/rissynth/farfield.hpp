#pragma once

#include "rissynth/geometry.hpp"
#include "rissynth/phase_profile.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace rissynth {

// Values below max - 80 dB are clamped to -80 dB.
inline constexpr double kDbFloor = -80.0;

/// Far-field magnitude over an angular grid.
///
/// magnitude(i, j) is |E| in linear units (element amplitude and an isotropic
/// unit element pattern included); magnitude_db is normalized so that its
/// maximum is exactly 0 dB and floored at kDbFloor.
struct FarFieldPattern {
    AngularGrid grid;
    Matrix<double> magnitude;
    Matrix<double> magnitude_db;
};

/// Wanted-region masks (one disk of radius R around each beam, Euclidean in
/// (theta, phi) degrees, no phi wraparound) and the unwanted region, which is
/// the complement of their union.
class MaskSet {
public:
    using Mask = Matrix<std::uint8_t>;

    // Builds the unwanted mask as the complement of the union of `wanted`.
    // Throws DomainError if a mask does not match the grid shape, if any
    // wanted mask is empty, or if the wanted masks cover the whole grid.
    MaskSet(AngularGrid grid, std::vector<Mask> wanted, double radius_deg);

    const AngularGrid &grid() const noexcept { return grid_; }
    std::size_t beam_count() const noexcept { return wanted_.size(); }
    const Mask &wanted(std::size_t beam) const { return wanted_.at(beam); }
    const Mask &unwanted() const noexcept { return unwanted_; }
    double radius() const noexcept { return radius_; }

    // Flat grid indices (row-major theta, phi) inside each region.
    std::span<const std::uint32_t> wanted_indices(std::size_t beam) const { return wanted_idx_.at(beam); }
    std::span<const std::uint32_t> unwanted_indices() const noexcept { return unwanted_idx_; }

private:
    AngularGrid grid_;
    std::vector<Mask> wanted_;
    Mask unwanted_;
    double radius_;
    std::vector<std::vector<std::uint32_t>> wanted_idx_;
    std::vector<std::uint32_t> unwanted_idx_;
};

// OPD(x, y) = Dx cos(phi) sin(theta) + Dy sin(phi) sin(theta), in metres.
Matrix<double> optical_path_difference(const ArrayGeometry &geometry, double theta_deg, double phi_deg);

// E(i, j) = sum over elements of beta * exp(j [k OPD + level_to_phase(level)]).
// Throws DomainError if the profile shape or resolution differs from the geometry.
FarFieldPattern compute_pattern(const ArrayGeometry &geometry, const PhaseProfile &profile,
                                const AngularGrid &grid);

// Same as compute_pattern for arbitrary radian phases. Phases are taken
// relative to element (0, 0), which only changes the global phase of E.
FarFieldPattern compute_pattern_from_phases(const ArrayGeometry &geometry, const Matrix<double> &phases,
                                            const AngularGrid &grid);

// Throws DomainError for an empty beam list, non-positive radius, or a beam
// whose disk contains no grid point.
MaskSet build_masks(const AngularGrid &grid, std::span<const BeamSpec> beams, double radius_deg);

// Max dB over the unwanted region minus the weakest wanted-region peak.
// Throws DomainError if the pattern and masks use different grids.
double sll_objective(const FarFieldPattern &pattern, const MaskSet &masks);

/// Evaluation kernel shared by compute_pattern and the optimizer.
///
/// The element steering factors exp(j k Dx u) and exp(j k Dy v), with
/// u = cos(phi) sin(theta) and v = sin(phi) sin(theta), are tabulated per grid
/// point. Each element contributes round(2^F * steering * phasor) to an int64
/// accumulator, so a field built incrementally from level changes is
/// bit-identical to one built from scratch, independent of order or threads.
class PatternEngine {
public:
    // Fixed-point accumulators over the grid.
    struct Field {
        std::vector<std::int64_t> re;
        std::vector<std::int64_t> im;
    };

    struct LevelChange {
        std::uint32_t row;
        std::uint32_t col;
        int from;
        int to;
    };

    PatternEngine(const ArrayGeometry &geometry, AngularGrid grid);

    const ArrayGeometry &geometry() const noexcept { return geometry_; }
    const AngularGrid &grid() const noexcept { return grid_; }
    std::size_t grid_size() const noexcept { return grid_.size(); }
    int fraction_bits() const noexcept { return fraction_bits_; }

    Field make_field() const;

    // Overwrites `field` with the contribution of every element.
    void accumulate(const LevelMatrix &levels, Field &field) const;
    void accumulate_phases(const Matrix<double> &phases, Field &field) const;

    // Moves each listed element from level `from` to level `to`.
    void apply_changes(std::span<const LevelChange> changes, Field &field) const;

    // |sum|^2 at one grid point, without element amplitude (common scale).
    double power_at(const Field &field, std::size_t g) const noexcept
    {
        const double re = static_cast<double>(field.re[g]) * inv_scale_;
        const double im = static_cast<double>(field.im[g]) * inv_scale_;
        return re * re + im * im;
    }

    // Converts a field into a normalized pattern.
    FarFieldPattern to_pattern(const Field &field) const;

    // Suppression computed from region power maxima; bit-identical to
    // sll_objective(to_pattern(field), masks).
    double suppression(const Field &field, const MaskSet &masks) const;

private:
    struct Phasor {
        double re;
        double im;
    };

    Phasor level_phasor(int level) const;
    void check_levels(const LevelMatrix &levels) const;

    ArrayGeometry geometry_;
    AngularGrid grid_;
    int fraction_bits_;
    double inv_scale_;
    std::vector<Phasor> level_phasors_;  // exp(j 2 pi (l - 1) / L) scaled by 2^F
    std::vector<double> u_re_, u_im_;    // rows x grid
    std::vector<double> v_re_, v_im_;    // cols x grid
};

// Normalized floored dB of a power value relative to the peak power.
double power_to_db(double power, double peak_power) noexcept;

} // namespace rissynth

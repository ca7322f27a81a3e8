#include "rissynth/farfield.hpp"

#include "rissynth/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace rissynth {

namespace {

// Grid points processed per cache block; accumulators and the steering rows
// of one block stay in L1.
constexpr std::size_t kBlock = 512;

// Round-half-even to int64 for |x| < 2^51 without a libm call, so the
// kernels below vectorize.
inline std::int64_t to_fixed(double x) noexcept
{
    constexpr double magic = 6755399441055744.0; // 1.5 * 2^52
    return std::bit_cast<std::int64_t>(x + magic) - std::bit_cast<std::int64_t>(magic);
}

struct SteeringBlock {
    const double *ur;
    const double *ui;
    const double *vr;
    const double *vi;
};

inline void add_element(const SteeringBlock &s, double pr, double pi, std::int64_t *__restrict acc_re,
                        std::int64_t *__restrict acc_im, std::size_t n) noexcept
{
    for (std::size_t g = 0; g < n; ++g) {
        const double sr = s.ur[g] * s.vr[g] - s.ui[g] * s.vi[g];
        const double si = s.ur[g] * s.vi[g] + s.ui[g] * s.vr[g];
        acc_re[g] += to_fixed(sr * pr - si * pi);
        acc_im[g] += to_fixed(sr * pi + si * pr);
    }
}

inline void move_element(const SteeringBlock &s, double old_r, double old_i, double new_r, double new_i,
                         std::int64_t *__restrict acc_re, std::int64_t *__restrict acc_im, std::size_t n) noexcept
{
    for (std::size_t g = 0; g < n; ++g) {
        const double sr = s.ur[g] * s.vr[g] - s.ui[g] * s.vi[g];
        const double si = s.ur[g] * s.vi[g] + s.ui[g] * s.vr[g];
        acc_re[g] += to_fixed(sr * new_r - si * new_i) - to_fixed(sr * old_r - si * old_i);
        acc_im[g] += to_fixed(sr * new_i + si * new_r) - to_fixed(sr * old_i + si * old_r);
    }
}

bool same_grid_shape(const AngularGrid &grid, const MaskSet::Mask &mask)
{
    return mask.rows() == grid.theta_count() && mask.cols() == grid.phi_count();
}

} // namespace

double power_to_db(double power, double peak_power) noexcept
{
    if (peak_power <= 0.0)
        return 0.0;
    const double db = 20.0 * std::log10(std::sqrt(power) / std::sqrt(peak_power));
    return std::max(db, kDbFloor);
}

// ---------------------------------------------------------------------------------------------
// MaskSet

MaskSet::MaskSet(AngularGrid grid, std::vector<Mask> wanted, double radius_deg)
    : grid_(std::move(grid)), wanted_(std::move(wanted)), radius_(radius_deg)
{
    if (wanted_.empty())
        throw DomainError("mask set needs at least one wanted region");

    unwanted_ = Mask(grid_.theta_count(), grid_.phi_count(), 1);
    wanted_idx_.resize(wanted_.size());
    for (std::size_t d = 0; d < wanted_.size(); ++d) {
        const Mask &w = wanted_[d];
        if (!same_grid_shape(grid_, w))
            throw DomainError("wanted mask " + std::to_string(d) + " does not match the grid shape");
        for (std::size_t g = 0; g < w.size(); ++g) {
            if (w.flat()[g] != 0) {
                wanted_idx_[d].push_back(static_cast<std::uint32_t>(g));
                unwanted_.flat()[g] = 0;
            }
        }
        if (wanted_idx_[d].empty())
            throw DomainError("wanted mask " + std::to_string(d) + " is empty");
    }
    for (std::size_t g = 0; g < unwanted_.size(); ++g)
        if (unwanted_.flat()[g] != 0)
            unwanted_idx_.push_back(static_cast<std::uint32_t>(g));
    if (unwanted_idx_.empty())
        throw DomainError("wanted regions cover the whole grid; unwanted region is empty");
}

MaskSet build_masks(const AngularGrid &grid, std::span<const BeamSpec> beams, double radius_deg)
{
    if (beams.empty())
        throw DomainError("masks need at least one beam");
    if (!std::isfinite(radius_deg) || radius_deg <= 0.0)
        throw DomainError("mask radius must be positive");

    const double r2 = radius_deg * radius_deg;
    std::vector<MaskSet::Mask> wanted;
    wanted.reserve(beams.size());
    for (std::size_t d = 0; d < beams.size(); ++d) {
        const BeamSpec &beam = beams[d];
        validate_beam(beam);
        MaskSet::Mask mask(grid.theta_count(), grid.phi_count(), 0);
        bool any = false;
        for (std::size_t i = 0; i < grid.theta_count(); ++i) {
            const double dt = grid.theta_samples()[i] - beam.theta_deg;
            for (std::size_t j = 0; j < grid.phi_count(); ++j) {
                const double dp = grid.phi_samples()[j] - beam.phi_deg;
                if (dt * dt + dp * dp <= r2) {
                    mask(i, j) = 1;
                    any = true;
                }
            }
        }
        if (!any)
            throw DomainError("beam " + std::to_string(d + 1) + " (" + std::to_string(beam.theta_deg) + ", " +
                              std::to_string(beam.phi_deg) + ") has no grid point within the mask radius");
        wanted.push_back(std::move(mask));
    }
    return MaskSet(grid, std::move(wanted), radius_deg);
}

// ---------------------------------------------------------------------------------------------
// Geometry helpers

Matrix<double> optical_path_difference(const ArrayGeometry &geometry, double theta_deg, double phi_deg)
{
    if (!std::isfinite(theta_deg) || !std::isfinite(phi_deg))
        throw DomainError("OPD angles must be finite");
    const double st = std::sin(deg_to_rad(theta_deg));
    const double u = std::cos(deg_to_rad(phi_deg)) * st;
    const double v = std::sin(deg_to_rad(phi_deg)) * st;
    Matrix<double> opd(geometry.rows(), geometry.cols());
    for (std::size_t x = 0; x < geometry.rows(); ++x)
        for (std::size_t y = 0; y < geometry.cols(); ++y)
            opd(x, y) = geometry.x_position(x) * u + geometry.y_position(y) * v;
    return opd;
}

// ---------------------------------------------------------------------------------------------
// PatternEngine

PatternEngine::PatternEngine(const ArrayGeometry &geometry, AngularGrid grid)
    : geometry_(geometry), grid_(std::move(grid))
{
    const auto elements = static_cast<std::uint64_t>(geometry_.element_count());
    fraction_bits_ = std::min(50, 62 - static_cast<int>(std::bit_width(elements)));
    if (fraction_bits_ < 20)
        throw DomainError("array too large for the fixed-point accumulator");
    inv_scale_ = std::ldexp(1.0, -fraction_bits_);

    // The common offset pi / L of level_to_phase is dropped: it rotates E as a
    // whole. Quarter turns are written exactly so that K <= 2 levels are
    // pure swaps and sign flips of the steering factor.
    const int levels = geometry_.level_count();
    const double scale = std::ldexp(1.0, fraction_bits_);
    level_phasors_.resize(static_cast<std::size_t>(levels));
    for (int i = 0; i < levels; ++i) {
        Phasor p;
        if ((4 * i) % levels == 0) {
            constexpr Phasor quarter[4] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
            p = quarter[(4 * i) / levels];
        } else {
            const double angle = kTwoPi * static_cast<double>(i) / static_cast<double>(levels);
            p = {std::cos(angle), std::sin(angle)};
        }
        level_phasors_[static_cast<std::size_t>(i)] = {p.re * scale, p.im * scale};
    }

    const std::size_t n = grid_.size();
    const double k = geometry_.wavenumber();
    std::vector<double> u(n), v(n);
    for (std::size_t i = 0; i < grid_.theta_count(); ++i) {
        const double st = std::sin(deg_to_rad(grid_.theta_samples()[i]));
        for (std::size_t j = 0; j < grid_.phi_count(); ++j) {
            const double phi = deg_to_rad(grid_.phi_samples()[j]);
            u[grid_.index(i, j)] = std::cos(phi) * st;
            v[grid_.index(i, j)] = std::sin(phi) * st;
        }
    }

    u_re_.resize(geometry_.rows() * n);
    u_im_.resize(geometry_.rows() * n);
    for (std::size_t x = 0; x < geometry_.rows(); ++x) {
        const double kx = k * geometry_.x_position(x);
        for (std::size_t g = 0; g < n; ++g) {
            const double phase = kx * u[g];
            u_re_[x * n + g] = std::cos(phase);
            u_im_[x * n + g] = std::sin(phase);
        }
    }
    v_re_.resize(geometry_.cols() * n);
    v_im_.resize(geometry_.cols() * n);
    for (std::size_t y = 0; y < geometry_.cols(); ++y) {
        const double ky = k * geometry_.y_position(y);
        for (std::size_t g = 0; g < n; ++g) {
            const double phase = ky * v[g];
            v_re_[y * n + g] = std::cos(phase);
            v_im_[y * n + g] = std::sin(phase);
        }
    }
}

PatternEngine::Field PatternEngine::make_field() const
{
    return Field{std::vector<std::int64_t>(grid_.size(), 0), std::vector<std::int64_t>(grid_.size(), 0)};
}

PatternEngine::Phasor PatternEngine::level_phasor(int level) const
{
    return level_phasors_[static_cast<std::size_t>(level - 1)];
}

void PatternEngine::check_levels(const LevelMatrix &levels) const
{
    if (levels.rows() != geometry_.rows() || levels.cols() != geometry_.cols())
        throw DomainError("profile is " + std::to_string(levels.rows()) + "x" + std::to_string(levels.cols()) +
                          " but the array is " + std::to_string(geometry_.rows()) + "x" +
                          std::to_string(geometry_.cols()));
}

void PatternEngine::accumulate(const LevelMatrix &levels, Field &field) const
{
    check_levels(levels);
    const int top = geometry_.level_count();
    for (int level : levels)
        if (level < 1 || level > top)
            throw DomainError("level " + std::to_string(level) + " outside [1, " + std::to_string(top) + "]");

    const std::size_t n = grid_.size();
    field.re.assign(n, 0);
    field.im.assign(n, 0);
    for (std::size_t g0 = 0; g0 < n; g0 += kBlock) {
        const std::size_t len = std::min(kBlock, n - g0);
        for (std::size_t x = 0; x < geometry_.rows(); ++x)
            for (std::size_t y = 0; y < geometry_.cols(); ++y) {
                const Phasor p = level_phasor(levels(x, y));
                const SteeringBlock s{&u_re_[x * n + g0], &u_im_[x * n + g0], &v_re_[y * n + g0],
                                      &v_im_[y * n + g0]};
                add_element(s, p.re, p.im, &field.re[g0], &field.im[g0], len);
            }
    }
}

void PatternEngine::accumulate_phases(const Matrix<double> &phases, Field &field) const
{
    if (phases.rows() != geometry_.rows() || phases.cols() != geometry_.cols())
        throw DomainError("phase matrix does not match the array shape");
    for (double p : phases)
        if (!std::isfinite(p))
            throw DomainError("element phases must be finite");

    const double scale = std::ldexp(1.0, fraction_bits_);
    const double reference = phases(0, 0);
    std::vector<Phasor> phasors(phases.size());
    for (std::size_t e = 0; e < phases.size(); ++e) {
        const double rel = phases.flat()[e] - reference;
        phasors[e] = {std::cos(rel) * scale, std::sin(rel) * scale};
    }

    const std::size_t n = grid_.size();
    field.re.assign(n, 0);
    field.im.assign(n, 0);
    for (std::size_t g0 = 0; g0 < n; g0 += kBlock) {
        const std::size_t len = std::min(kBlock, n - g0);
        for (std::size_t x = 0; x < geometry_.rows(); ++x)
            for (std::size_t y = 0; y < geometry_.cols(); ++y) {
                const Phasor p = phasors[x * geometry_.cols() + y];
                const SteeringBlock s{&u_re_[x * n + g0], &u_im_[x * n + g0], &v_re_[y * n + g0],
                                      &v_im_[y * n + g0]};
                add_element(s, p.re, p.im, &field.re[g0], &field.im[g0], len);
            }
    }
}

void PatternEngine::apply_changes(std::span<const LevelChange> changes, Field &field) const
{
    const std::size_t n = grid_.size();
    for (const LevelChange &c : changes)
        if (c.row >= geometry_.rows() || c.col >= geometry_.cols() || c.from < 1 || c.to < 1 ||
            c.from > geometry_.level_count() || c.to > geometry_.level_count())
            throw DomainError("invalid level change");

    for (std::size_t g0 = 0; g0 < n; g0 += kBlock) {
        const std::size_t len = std::min(kBlock, n - g0);
        for (const LevelChange &c : changes) {
            if (c.from == c.to)
                continue;
            const Phasor a = level_phasor(c.from);
            const Phasor b = level_phasor(c.to);
            const SteeringBlock s{&u_re_[c.row * n + g0], &u_im_[c.row * n + g0], &v_re_[c.col * n + g0],
                                  &v_im_[c.col * n + g0]};
            move_element(s, a.re, a.im, b.re, b.im, &field.re[g0], &field.im[g0], len);
        }
    }
}

FarFieldPattern PatternEngine::to_pattern(const Field &field) const
{
    const std::size_t n = grid_.size();
    std::vector<double> power(n);
    double peak = 0.0;
    for (std::size_t g = 0; g < n; ++g) {
        power[g] = power_at(field, g);
        peak = std::max(peak, power[g]);
    }

    FarFieldPattern pattern{grid_, Matrix<double>(grid_.theta_count(), grid_.phi_count()),
                            Matrix<double>(grid_.theta_count(), grid_.phi_count())};
    const double amplitude = geometry_.element_amplitude();
    for (std::size_t g = 0; g < n; ++g) {
        pattern.magnitude.flat()[g] = amplitude * std::sqrt(power[g]);
        pattern.magnitude_db.flat()[g] = power_to_db(power[g], peak);
    }
    return pattern;
}

double PatternEngine::suppression(const Field &field, const MaskSet &masks) const
{
    if (!(masks.grid() == grid_))
        throw DomainError("masks were built on a different grid");

    double unwanted_peak = 0.0;
    for (std::uint32_t g : masks.unwanted_indices())
        unwanted_peak = std::max(unwanted_peak, power_at(field, g));
    double peak = unwanted_peak;

    std::vector<double> wanted_peak(masks.beam_count(), 0.0);
    for (std::size_t d = 0; d < masks.beam_count(); ++d) {
        for (std::uint32_t g : masks.wanted_indices(d))
            wanted_peak[d] = std::max(wanted_peak[d], power_at(field, g));
        peak = std::max(peak, wanted_peak[d]);
    }

    double weakest = power_to_db(wanted_peak[0], peak);
    for (std::size_t d = 1; d < wanted_peak.size(); ++d)
        weakest = std::min(weakest, power_to_db(wanted_peak[d], peak));
    return power_to_db(unwanted_peak, peak) - weakest;
}

// ---------------------------------------------------------------------------------------------
// Free functions

FarFieldPattern compute_pattern(const ArrayGeometry &geometry, const PhaseProfile &profile, const AngularGrid &grid)
{
    if (profile.resolution_bits() != geometry.resolution_bits())
        throw DomainError("profile resolution (" + std::to_string(profile.resolution_bits()) +
                          " bits) differs from the array (" + std::to_string(geometry.resolution_bits()) + " bits)");
    const PatternEngine engine(geometry, grid);
    PatternEngine::Field field = engine.make_field();
    engine.accumulate(profile.levels(), field);
    return engine.to_pattern(field);
}

FarFieldPattern compute_pattern_from_phases(const ArrayGeometry &geometry, const Matrix<double> &phases,
                                            const AngularGrid &grid)
{
    const PatternEngine engine(geometry, grid);
    PatternEngine::Field field = engine.make_field();
    engine.accumulate_phases(phases, field);
    return engine.to_pattern(field);
}

double sll_objective(const FarFieldPattern &pattern, const MaskSet &masks)
{
    if (!(pattern.grid == masks.grid()))
        throw DomainError("pattern and masks use different grids");

    const auto &db = pattern.magnitude_db.flat();
    double unwanted = kDbFloor;
    for (std::uint32_t g : masks.unwanted_indices())
        unwanted = std::max(unwanted, db[g]);

    double weakest = 0.0;
    for (std::size_t d = 0; d < masks.beam_count(); ++d) {
        double peak = kDbFloor;
        for (std::uint32_t g : masks.wanted_indices(d))
            peak = std::max(peak, db[g]);
        weakest = d == 0 ? peak : std::min(weakest, peak);
    }
    return unwanted - weakest;
}

} // namespace rissynth

#pragma once

// Independent reference computations for the test suites. Nothing here calls
// into the fixed-point engine.

#include "rissynth/farfield.hpp"
#include "rissynth/geometry.hpp"
#include "rissynth/phase_profile.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <utility>

namespace rissynth::test {

// Plain double-loop array factor at one direction, element phases in radians.
inline std::complex<double> naive_field(const ArrayGeometry &g, const Matrix<double> &phases, double theta_deg,
                                        double phi_deg)
{
    const double th = theta_deg * std::numbers::pi / 180.0;
    const double ph = phi_deg * std::numbers::pi / 180.0;
    const double k = 2.0 * std::numbers::pi * g.frequency() / 299792458.0;
    std::complex<double> sum{};
    for (std::size_t x = 0; x < g.rows(); ++x)
        for (std::size_t y = 0; y < g.cols(); ++y) {
            const double dx = static_cast<double>(x) * g.spacing();
            const double dy = static_cast<double>(y) * g.spacing();
            const double opd = dx * std::cos(ph) * std::sin(th) + dy * std::sin(ph) * std::sin(th);
            sum += g.element_amplitude() * std::polar(1.0, k * opd + phases(x, y));
        }
    return sum;
}

inline Matrix<double> level_phases(const LevelMatrix &levels, int bits)
{
    Matrix<double> out(levels.rows(), levels.cols());
    for (std::size_t r = 0; r < levels.rows(); ++r)
        for (std::size_t c = 0; c < levels.cols(); ++c)
            out(r, c) = (2.0 * levels(r, c) - 1.0) * std::numbers::pi / std::ldexp(1.0, bits);
    return out;
}

// Whole naive pattern in linear magnitude over a grid.
inline Matrix<double> naive_magnitude(const ArrayGeometry &g, const Matrix<double> &phases, const AngularGrid &grid)
{
    Matrix<double> mag(grid.theta_count(), grid.phi_count());
    for (std::size_t i = 0; i < grid.theta_count(); ++i)
        for (std::size_t j = 0; j < grid.phi_count(); ++j)
            mag(i, j) = std::abs(naive_field(g, phases, grid.theta_samples()[i], grid.phi_samples()[j]));
    return mag;
}

// Suppression from a linear magnitude map with explicit disk masks.
inline double naive_suppression(const Matrix<double> &mag, const AngularGrid &grid,
                                const std::vector<BeamSpec> &beams, double radius)
{
    double peak = 0.0;
    for (double m : mag)
        peak = std::max(peak, m);
    auto db = [&](double m) { return std::max(20.0 * std::log10(m / peak), -80.0); };
    double unwanted = -1e300;
    double weakest = 1e300;
    std::vector<double> wanted(beams.size(), -1e300);
    for (std::size_t i = 0; i < grid.theta_count(); ++i)
        for (std::size_t j = 0; j < grid.phi_count(); ++j) {
            bool in_any = false;
            for (std::size_t d = 0; d < beams.size(); ++d) {
                const double dt = grid.theta_samples()[i] - beams[d].theta_deg;
                const double dp = grid.phi_samples()[j] - beams[d].phi_deg;
                if (dt * dt + dp * dp <= radius * radius) {
                    in_any = true;
                    wanted[d] = std::max(wanted[d], db(mag(i, j)));
                }
            }
            if (!in_any)
                unwanted = std::max(unwanted, db(mag(i, j)));
        }
    for (double w : wanted)
        weakest = std::min(weakest, w);
    return unwanted - weakest;
}

// Location of the maximum magnitude.
inline std::pair<double, double> argmax(const FarFieldPattern &p)
{
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < p.grid.theta_count(); ++i)
        for (std::size_t j = 0; j < p.grid.phi_count(); ++j)
            if (p.magnitude(i, j) > p.magnitude(bi, bj)) {
                bi = i;
                bj = j;
            }
    return {p.grid.theta_samples()[bi], p.grid.phi_samples()[bj]};
}

// True when the pattern maximum is attained somewhere inside the (theta, phi)
// disk. At theta = 0 every phi is the same direction, so the maximum is a tie
// along that row and a first-index argmax says nothing about the target phi.
inline bool peak_within(const FarFieldPattern &p, double theta, double phi, double radius)
{
    double global = 0.0, inside = 0.0;
    for (std::size_t i = 0; i < p.grid.theta_count(); ++i)
        for (std::size_t j = 0; j < p.grid.phi_count(); ++j) {
            const double m = p.magnitude(i, j);
            global = std::max(global, m);
            const double dt = p.grid.theta_samples()[i] - theta;
            const double dp = p.grid.phi_samples()[j] - phi;
            if (dt * dt + dp * dp <= radius * radius)
                inside = std::max(inside, m);
        }
    return inside == global;
}

inline ArrayGeometry reference_array(int bits = 2)
{
    return ArrayGeometry(30, 30, 0.021, 3.5e9, 0.7, bits);
}

} // namespace rissynth::test

#pragma once

#include "rissynth/farfield.hpp"
#include "rissynth/phase_profile.hpp"
#include "rissynth/pso.hpp"

#include <filesystem>

namespace rissynth {

// Profile CSV: one line per array row, comma-separated integer levels, no header.
void write_profile_csv(const std::filesystem::path &path, const PhaseProfile &profile);
PhaseProfile read_profile_csv(const std::filesystem::path &path, int resolution_bits);

// Pattern CSV: header theta_deg,phi_deg,magnitude_db, row-major over theta
// then phi, six decimal places.
void write_pattern_csv(const std::filesystem::path &path, const FarFieldPattern &pattern);

// Reads the dB column back onto `grid`, checking every coordinate against it.
// Linear magnitudes are not stored in the file and come back empty.
FarFieldPattern read_pattern_csv(const std::filesystem::path &path, const AngularGrid &grid);

// Convergence CSV: iteration,global_best_suppression_db,fitness_sum_db.
void write_convergence_csv(const std::filesystem::path &path, const OptimizationResult &result);

// Binary PPM heatmap, theta down the rows and phi across, -40..0 dB colour scale.
void write_heatmap_ppm(const std::filesystem::path &path, const FarFieldPattern &pattern);

// Shortest text that parses back to the same double.
std::string format_exact(double value);

} // namespace rissynth

#pragma once

#include "rissynth/config.hpp"
#include "rissynth/farfield.hpp"
#include "rissynth/phase_profile.hpp"
#include "rissynth/pso.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace rissynth {

struct EfficiencyReport {
    std::size_t elements = 0;
    std::size_t individuals = 0;
    double optimization_time_minutes = 0.0;
    double efficiency = 0.0;
};

// elements * individuals / minutes. Throws DomainError unless minutes > 0.
EfficiencyReport efficiency(std::size_t elements, std::size_t individuals, double minutes);

struct RunOptions {
    bool emit_heatmap = false;
    std::function<void(const std::string &)> progress; // optional status lines
};

struct ExperimentResult {
    PhaseProfile pre_profile;  // superposition baseline
    double pre_suppression = 0.0;
    OptimizationResult optimization;
    double post_suppression = 0.0;
    double improvement = 0.0; // pre - post, positive when the optimizer helped
    EfficiencyReport efficiency;
    std::filesystem::path output_dir;
};

/// Superposition baseline, optimization and all artifacts in config.output_dir:
///
///   pre_profile.csv   pre_pattern.csv   post_profile.csv   post_pattern.csv
///   convergence.csv   summary.txt       [pre_heatmap.ppm   post_heatmap.ppm]
///
/// Throws ConfigError for an invalid configuration and std::runtime_error when
/// the directory cannot be created or written.
ExperimentResult run_experiment(const ExperimentConfig &config, const RunOptions &options = {});

// Pattern and suppression of a saved profile under a configuration's geometry,
// grid and beams.
struct ProfileEvaluation {
    FarFieldPattern pattern;
    double suppression = 0.0;
};
ProfileEvaluation evaluate_profile(const ExperimentConfig &config, const PhaseProfile &profile);

// Linear-interpolation quantile (q in [0, 1]) of an unsorted sample.
// Throws DomainError for an empty sample or q outside [0, 1].
double quantile(std::vector<double> values, double q);

struct Spread {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
};
Spread spread(std::span<const double> values);

struct SweepRun {
    std::uint64_t seed = 0;
    double pre_suppression = 0.0;
    double post_suppression = 0.0;
    double improvement = 0.0;
    std::vector<double> suppression_history;
};

struct SweepReport {
    std::vector<SweepRun> runs;
    Spread pre;
    Spread post;
    Spread improvement;
};

/// Runs the experiment once per seed into <output_dir>/seed_<seed>/ and
/// writes sweep.csv (one row per seed) and sweep_summary.txt.
SweepReport run_sweep(const ExperimentConfig &config, std::span<const std::uint64_t> seeds,
                      const RunOptions &options = {});

} // namespace rissynth

#pragma once

#include "rissynth/geometry.hpp"
#include "rissynth/pso.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace rissynth {

// Experiment description. Every default reproduces the reference scenario:
// 30 x 30 elements, 21 mm pitch, 3.5 GHz, amplitude 0.7, 2-bit phase,
// beams (45, 30) and (45, 110), 10 degree masks, 100 particles, 100
// iterations, full knowledge.
struct ExperimentConfig {
    struct Geometry {
        std::size_t rows = 30;
        std::size_t cols = 30;
        double spacing_mm = 21.0;
        double frequency_ghz = 3.5;
        double amplitude = 0.7;
        int resolution_bits = 2;

        friend bool operator==(const Geometry &, const Geometry &) = default;
    };
    struct Grid {
        double theta_start = -90.0;
        double theta_stop = 90.0;
        double theta_step = 1.0;
        double phi_start = 0.0;
        double phi_stop = 179.0;
        double phi_step = 1.0;

        friend bool operator==(const Grid &, const Grid &) = default;
    };
    struct Pso {
        std::size_t particles = 100;
        int iterations = 100;
        Knowledge knowledge = Knowledge::full;
        std::uint64_t seed = 1;
        BoundMode bound_mode = BoundMode::clamp;
        std::size_t threads = 1;
        std::vector<StageParams> stages = StageSchedule::standard().stages();
        std::vector<int> stage_ends; // empty: equal blocks

        friend bool operator==(const Pso &, const Pso &) = default;
    };

    Geometry geometry;
    std::vector<BeamSpec> beams{{45.0, 30.0}, {45.0, 110.0}};
    Grid grid;
    double mask_radius_deg = 10.0;
    Pso pso;
    std::string output_dir = "out";

    ArrayGeometry array() const;
    AngularGrid angular_grid() const;
    PsoConfig pso_config() const;

    friend bool operator==(const ExperimentConfig &, const ExperimentConfig &) = default;
};

// Parses the dotted key-value format:
//
//   # comment
//   geometry.rows = 30
//   beams = (45, 30), (45, 110)
//   pso.knowledge = full
//
// Unset keys keep their defaults. Throws ConfigError (with the line number
// for syntax problems, unknown or repeated keys) or when a value violates a
// constraint; the message names the field.
ExperimentConfig parse_config(std::string_view text);

// Reads and parses a file; a missing file is a ConfigError.
ExperimentConfig load_config(const std::filesystem::path &path);

// Checks cross-field constraints (also run by parse_config).
void validate_config(const ExperimentConfig &config);

// Every key with its resolved value, one per line; parse_config reads it back
// to an equal configuration.
std::string format_config(const ExperimentConfig &config, std::string_view key_prefix = "");

} // namespace rissynth

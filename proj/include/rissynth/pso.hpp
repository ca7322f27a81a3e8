#pragma once

#include "rissynth/farfield.hpp"
#include "rissynth/geometry.hpp"
#include "rissynth/phase_profile.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rissynth {

enum class Knowledge { zero, partial, full };
enum class BoundMode { clamp, wrap };

std::string to_string(Knowledge knowledge);
std::string to_string(BoundMode mode);

// Coefficients of one schedule stage: discard rates, acceleration
// coefficients and inertia.
struct StageParams {
    double d1 = 0.0;
    double d2 = 0.0;
    double c1 = 1.0;
    double c2 = 1.0;
    double w = 0.0;

    friend bool operator==(const StageParams &, const StageParams &) = default;
};

// Piecewise-constant coefficient plan. Without explicit stage ends the run is
// split into equal contiguous blocks: stage s ends at floor((s + 1) T / S).
class StageSchedule {
public:
    explicit StageSchedule(std::vector<StageParams> stages, std::vector<int> stage_ends = {});

    // Four stages, exploration to exploitation:
    //   d1 0.8 0.4 0.2 0 | d2 0.8 0.6 0.2 0 | c1 1 1.2 1 0.9 | c2 1 0.8 1 1.1 | w 0.6 0.4 0.2 0
    static StageSchedule standard();

    const std::vector<StageParams> &stages() const noexcept { return stages_; }
    const std::vector<int> &stage_ends() const noexcept { return ends_; }

    // Last iteration of every stage for a run of `total_iterations`.
    // Throws DomainError if explicit ends do not partition [1, total].
    std::vector<int> resolved_ends(int total_iterations) const;

    friend bool operator==(const StageSchedule &, const StageSchedule &) = default;

private:
    std::vector<StageParams> stages_;
    std::vector<int> ends_;
};

// Row of the stage containing `iteration` (1-based). Throws DomainError when
// iteration is outside [1, total_iterations].
StageParams stage_params(const StageSchedule &schedule, int iteration, int total_iterations);

struct PsoConfig {
    std::size_t particles = 100;
    int iterations = 100;
    Knowledge knowledge = Knowledge::full;
    StageSchedule schedule = StageSchedule::standard();
    std::uint64_t rng_seed = 1;
    BoundMode bound_mode = BoundMode::clamp;
    std::size_t threads = 1; // particle evaluations in flight; results do not depend on it

    // Throws ConfigError on P < 1, T < 1, threads < 1, bad probabilities or
    // negative coefficients.
    void validate() const;
};

// Independent mt19937_64 stream per particle, derived from one master seed.
class SwarmRng {
public:
    SwarmRng(std::uint64_t seed, std::size_t particles);

    std::mt19937_64 &stream(std::size_t particle) { return streams_.at(particle); }
    std::size_t size() const noexcept { return streams_.size(); }

private:
    std::vector<std::mt19937_64> streams_;
};

// Uniform draw strictly inside (0, 1).
double uniform_open(std::mt19937_64 &rng) noexcept;

using KeepMask = Matrix<std::uint8_t>;

// Entry is 0 ("discarded") with probability discard_rate, 1 otherwise.
KeepMask draw_discard_mask(std::mt19937_64 &rng, std::size_t rows, std::size_t cols, double discard_rate);

// Fitness of a position; lower is better. Implementations must allow
// concurrent calls for distinct particle indices.
class SwarmObjective {
public:
    virtual ~SwarmObjective() = default;
    virtual double evaluate(std::size_t particle, const LevelMatrix &position) = 0;
};

// Adapts a plain function of the position.
class FunctionObjective final : public SwarmObjective {
public:
    explicit FunctionObjective(std::function<double(const LevelMatrix &)> fn) : fn_(std::move(fn)) {}
    double evaluate(std::size_t, const LevelMatrix &position) override { return fn_(position); }

private:
    std::function<double(const LevelMatrix &)> fn_;
};

/// Sidelobe suppression of a particle's profile against a mask set.
///
/// Keeps each particle's last position and fixed-point field and applies only
/// the changed elements on the next call. Particles without history start
/// from the anchor profile when one is given. Values are bit-identical to
/// sll_objective(compute_pattern(...), masks).
class SuppressionObjective final : public SwarmObjective {
public:
    SuppressionObjective(const ArrayGeometry &geometry, MaskSet masks, std::size_t particles,
                         const std::optional<PhaseProfile> &anchor = std::nullopt);

    double evaluate(std::size_t particle, const LevelMatrix &position) override;

    std::uint64_t evaluations() const noexcept { return evaluations_.load(); }
    const PatternEngine &engine() const noexcept { return engine_; }
    const MaskSet &masks() const noexcept { return masks_; }

private:
    struct Slot {
        bool ready = false;
        LevelMatrix levels;
        PatternEngine::Field field;
        std::vector<PatternEngine::LevelChange> changes;
    };

    PatternEngine engine_;
    MaskSet masks_;
    std::optional<Slot> anchor_;
    std::vector<Slot> slots_;
    std::atomic<std::uint64_t> evaluations_{0};
};

// Thrown when the objective fails for one particle during a step.
class ObjectiveError : public std::runtime_error {
public:
    ObjectiveError(std::size_t particle, const std::string &what)
        : std::runtime_error("objective evaluation failed for particle " + std::to_string(particle + 1) + ": " +
                             what),
          particle_(particle)
    {
    }
    std::size_t particle() const noexcept { return particle_; }

private:
    std::size_t particle_;
};

struct SwarmState {
    int resolution_bits = 1;
    std::vector<LevelMatrix> positions;
    std::vector<Matrix<double>> velocities;
    std::vector<LevelMatrix> personal_best_positions;
    std::vector<double> personal_best_values;
    LevelMatrix global_best_position;
    double global_best_value = 0.0;
    std::vector<double> current_values; // objective of positions[p] at this iteration
    int iteration = 0;
};

// Random velocities 2 * rm - 1 for every particle; positions per knowledge mode
// (random round(2^K rm + 0.5) capped at 2^K, or the knowledge profile), then
// one evaluation to seed personal and global bests.
// Throws ConfigError if the knowledge profile is absent for partial/full
// knowledge, present for zero knowledge, or shaped differently from the array.
SwarmState init_swarm(const PsoConfig &config, const ArrayGeometry &geometry,
                      const std::optional<PhaseProfile> &knowledge, SwarmObjective &objective, SwarmRng &rng);

// One particle's velocity and position update with explicit random inputs:
//   v <- clamp(w v + c1 r1 keep1 (pbest - x) + c2 r2 keep2 (gbest - x), -1, 1)
//   x <- round(x + v), then clamped or wrapped into [1, levels].
void advance_particle(LevelMatrix &position, Matrix<double> &velocity, const LevelMatrix &personal_best,
                      const LevelMatrix &global_best, const StageParams &params, double r1, double r2,
                      const KeepMask &keep1, const KeepMask &keep2, int levels, BoundMode bound_mode);

// Advances every particle, evaluates them (possibly in parallel), then updates
// personal and global bests in particle order. Only strict improvements
// replace a best.
void step(SwarmState &state, const StageParams &params, SwarmObjective &objective, SwarmRng &rng,
          BoundMode bound_mode, std::size_t threads = 1);

struct OptimizationResult {
    PhaseProfile best_profile;
    double best_value = 0.0;
    double initial_best_value = 0.0;
    std::vector<double> suppression_history; // global best after each iteration
    std::vector<double> fitness_history;     // sum of particle objectives per iteration
    double wall_time_seconds = 0.0;
    std::uint64_t evaluations = 0;
};

// init_swarm followed by config.iterations steps against any objective.
OptimizationResult optimize(const PsoConfig &config, const ArrayGeometry &geometry,
                            const std::optional<PhaseProfile> &knowledge, SwarmObjective &objective);

// Full pipeline: superposition knowledge (unless zero knowledge) and the
// sidelobe suppression objective over the mask grid.
OptimizationResult run(const PsoConfig &config, const ArrayGeometry &geometry, std::span<const BeamSpec> beams,
                       const MaskSet &masks);

} // namespace rissynth

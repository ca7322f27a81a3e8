#include "rissynth/pso.hpp"

#include "rissynth/error.hpp"
#include "rissynth/synthesis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <thread>

namespace rissynth {

namespace {

// Runs fn(i) for i in [0, count) over contiguous chunks, one per thread.
// The first exception in index order is rethrown after all chunks finish.
template <typename Fn>
void parallel_for(std::size_t count, std::size_t threads, Fn &&fn)
{
    threads = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(count, 1));
    if (threads == 1) {
        for (std::size_t i = 0; i < count; ++i)
            fn(i);
        return;
    }

    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> workers;
        workers.reserve(threads);
        for (std::size_t t = 0; t < threads; ++t) {
            const std::size_t begin = count * t / threads;
            const std::size_t end = count * (t + 1) / threads;
            workers.emplace_back([&, t, begin, end] {
                try {
                    for (std::size_t i = begin; i < end; ++i)
                        fn(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);
}

void check_probability(const char *name, std::size_t stage, double value)
{
    if (!(value >= 0.0 && value <= 1.0))
        throw ConfigError("stage " + std::to_string(stage + 1) + " " + name + " must be in [0, 1]");
}

double evaluate_particle(SwarmObjective &objective, std::size_t p, const LevelMatrix &position)
{
    try {
        return objective.evaluate(p, position);
    } catch (const std::exception &e) {
        throw ObjectiveError(p, e.what());
    }
}

} // namespace

std::string to_string(Knowledge knowledge)
{
    switch (knowledge) {
    case Knowledge::zero:
        return "zero";
    case Knowledge::partial:
        return "partial";
    case Knowledge::full:
        return "full";
    }
    return "unknown";
}

std::string to_string(BoundMode mode)
{
    return mode == BoundMode::clamp ? "clamp" : "wrap";
}

// ---------------------------------------------------------------------------------------------
// Schedule

StageSchedule::StageSchedule(std::vector<StageParams> stages, std::vector<int> stage_ends)
    : stages_(std::move(stages)), ends_(std::move(stage_ends))
{
    if (stages_.empty())
        throw DomainError("stage schedule needs at least one stage");
    if (!ends_.empty() && ends_.size() != stages_.size())
        throw DomainError("stage schedule has " + std::to_string(stages_.size()) + " stages but " +
                          std::to_string(ends_.size()) + " stage ends");
}

StageSchedule StageSchedule::standard()
{
    return StageSchedule({
        {0.8, 0.8, 1.0, 1.0, 0.6},
        {0.4, 0.6, 1.2, 0.8, 0.4},
        {0.2, 0.2, 1.0, 1.0, 0.2},
        {0.0, 0.0, 0.9, 1.1, 0.0},
    });
}

std::vector<int> StageSchedule::resolved_ends(int total_iterations) const
{
    if (total_iterations < 1)
        throw DomainError("a schedule needs at least one iteration");
    if (ends_.empty()) {
        const auto s = static_cast<long long>(stages_.size());
        std::vector<int> ends(stages_.size());
        for (long long i = 0; i < s; ++i)
            ends[static_cast<std::size_t>(i)] = static_cast<int>((i + 1) * total_iterations / s);
        return ends;
    }
    int previous = 0;
    for (int e : ends_) {
        if (e < previous)
            throw DomainError("stage ends must be non-decreasing");
        previous = e;
    }
    if (ends_.back() != total_iterations)
        throw DomainError("last stage must end at iteration " + std::to_string(total_iterations) + ", not " +
                          std::to_string(ends_.back()));
    return ends_;
}

StageParams stage_params(const StageSchedule &schedule, int iteration, int total_iterations)
{
    if (iteration < 1 || iteration > total_iterations)
        throw DomainError("iteration " + std::to_string(iteration) + " outside [1, " +
                          std::to_string(total_iterations) + "]");
    const std::vector<int> ends = schedule.resolved_ends(total_iterations);
    for (std::size_t s = 0; s < ends.size(); ++s)
        if (iteration <= ends[s])
            return schedule.stages()[s];
    return schedule.stages().back();
}

void PsoConfig::validate() const
{
    if (particles < 1)
        throw ConfigError("pso.particles must be at least 1");
    if (iterations < 1)
        throw ConfigError("pso.iterations must be at least 1");
    if (threads < 1)
        throw ConfigError("pso.threads must be at least 1");
    for (std::size_t s = 0; s < schedule.stages().size(); ++s) {
        const StageParams &p = schedule.stages()[s];
        check_probability("d1", s, p.d1);
        check_probability("d2", s, p.d2);
        if (!(p.c1 >= 0.0) || !(p.c2 >= 0.0) || !(p.w >= 0.0) || !std::isfinite(p.c1) || !std::isfinite(p.c2) ||
            !std::isfinite(p.w))
            throw ConfigError("stage " + std::to_string(s + 1) + " coefficients must be finite and non-negative");
    }
    try {
        schedule.resolved_ends(iterations);
    } catch (const DomainError &e) {
        throw ConfigError(std::string("pso.stage_ends: ") + e.what());
    }
}

// ---------------------------------------------------------------------------------------------
// Random streams

SwarmRng::SwarmRng(std::uint64_t seed, std::size_t particles)
{
    streams_.reserve(particles);
    for (std::size_t p = 0; p < particles; ++p) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(p), static_cast<std::uint32_t>(static_cast<std::uint64_t>(p) >> 32)};
        streams_.emplace_back(seq);
    }
}

double uniform_open(std::mt19937_64 &rng) noexcept
{
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

KeepMask draw_discard_mask(std::mt19937_64 &rng, std::size_t rows, std::size_t cols, double discard_rate)
{
    KeepMask mask(rows, cols);
    for (auto &m : mask)
        m = uniform_open(rng) < discard_rate ? 0 : 1;
    return mask;
}

// ---------------------------------------------------------------------------------------------
// Suppression objective

SuppressionObjective::SuppressionObjective(const ArrayGeometry &geometry, MaskSet masks, std::size_t particles,
                                           const std::optional<PhaseProfile> &anchor)
    : engine_(geometry, masks.grid()), masks_(std::move(masks)), slots_(particles)
{
    if (anchor) {
        anchor_.emplace();
        anchor_->levels = anchor->levels();
        anchor_->field = engine_.make_field();
        engine_.accumulate(anchor_->levels, anchor_->field);
        anchor_->ready = true;
    }
}

double SuppressionObjective::evaluate(std::size_t particle, const LevelMatrix &position)
{
    Slot &slot = slots_.at(particle);
    const Slot *base = slot.ready ? &slot : (anchor_ ? &*anchor_ : nullptr);

    bool incremental = false;
    if (base != nullptr && base->levels.same_shape(position)) {
        slot.changes.clear();
        const std::size_t cols = position.cols();
        for (std::size_t e = 0; e < position.size(); ++e) {
            const int from = base->levels.flat()[e];
            const int to = position.flat()[e];
            if (from != to)
                slot.changes.push_back({static_cast<std::uint32_t>(e / cols), static_cast<std::uint32_t>(e % cols),
                                        from, to});
        }
        // A move costs about 1.5 element additions.
        incremental = 3 * slot.changes.size() < 2 * position.size();
    }

    if (incremental) {
        if (base != &slot) {
            slot.levels = base->levels;
            slot.field = base->field;
        }
        engine_.apply_changes(slot.changes, slot.field);
        slot.levels = position;
    } else {
        if (slot.field.re.empty())
            slot.field = engine_.make_field();
        engine_.accumulate(position, slot.field);
        slot.levels = position;
    }
    slot.ready = true;
    evaluations_.fetch_add(1, std::memory_order_relaxed);
    return engine_.suppression(slot.field, masks_);
}

// ---------------------------------------------------------------------------------------------
// Swarm

SwarmState init_swarm(const PsoConfig &config, const ArrayGeometry &geometry,
                      const std::optional<PhaseProfile> &knowledge, SwarmObjective &objective, SwarmRng &rng)
{
    config.validate();
    const bool needs_knowledge = config.knowledge != Knowledge::zero;
    if (needs_knowledge && !knowledge)
        throw ConfigError(to_string(config.knowledge) + " knowledge needs a knowledge profile");
    if (!needs_knowledge && knowledge)
        throw ConfigError("zero knowledge does not take a knowledge profile");
    if (knowledge && (knowledge->rows() != geometry.rows() || knowledge->cols() != geometry.cols() ||
                      knowledge->resolution_bits() != geometry.resolution_bits()))
        throw ConfigError("knowledge profile does not match the array");
    if (rng.size() != config.particles)
        throw ConfigError("random streams do not match the particle count");

    const std::size_t rows = geometry.rows();
    const std::size_t cols = geometry.cols();
    const int levels = geometry.level_count();
    const std::size_t particles = config.particles;

    SwarmState state;
    state.resolution_bits = geometry.resolution_bits();
    state.positions.resize(particles);
    state.velocities.resize(particles);
    state.current_values.resize(particles);

    for (std::size_t p = 0; p < particles; ++p) {
        auto &stream = rng.stream(p);
        Matrix<double> v(rows, cols);
        for (double &entry : v)
            entry = 2.0 * uniform_open(stream) - 1.0;
        state.velocities[p] = std::move(v);

        const bool seeded = config.knowledge == Knowledge::full || (config.knowledge == Knowledge::partial && p == 0);
        if (seeded) {
            state.positions[p] = knowledge->levels();
        } else {
            LevelMatrix x(rows, cols);
            for (int &entry : x) {
                const double raw = std::round(static_cast<double>(levels) * uniform_open(stream) + 0.5);
                entry = std::min(static_cast<int>(raw), levels);
            }
            state.positions[p] = std::move(x);
        }
    }

    parallel_for(particles, config.threads, [&](std::size_t p) {
        state.current_values[p] = evaluate_particle(objective, p, state.positions[p]);
    });

    state.personal_best_positions = state.positions;
    state.personal_best_values = state.current_values;
    const auto best = static_cast<std::size_t>(
        std::min_element(state.personal_best_values.begin(), state.personal_best_values.end()) -
        state.personal_best_values.begin());
    state.global_best_position = state.personal_best_positions[best];
    state.global_best_value = state.personal_best_values[best];
    state.iteration = 0;
    return state;
}

void advance_particle(LevelMatrix &position, Matrix<double> &velocity, const LevelMatrix &personal_best,
                      const LevelMatrix &global_best, const StageParams &params, double r1, double r2,
                      const KeepMask &keep1, const KeepMask &keep2, int levels, BoundMode bound_mode)
{
    const double a1 = params.c1 * r1;
    const double a2 = params.c2 * r2;
    for (std::size_t e = 0; e < position.size(); ++e) {
        const int x = position.flat()[e];
        const double cognitive = keep1.flat()[e] ? a1 * static_cast<double>(personal_best.flat()[e] - x) : 0.0;
        const double social = keep2.flat()[e] ? a2 * static_cast<double>(global_best.flat()[e] - x) : 0.0;
        const double v = std::clamp(params.w * velocity.flat()[e] + cognitive + social, -1.0, 1.0);
        velocity.flat()[e] = v;

        int next = static_cast<int>(std::round(static_cast<double>(x) + v));
        if (bound_mode == BoundMode::clamp)
            next = std::clamp(next, 1, levels);
        else
            next = ((next - 1) % levels + levels) % levels + 1;
        position.flat()[e] = next;
    }
}

void step(SwarmState &state, const StageParams &params, SwarmObjective &objective, SwarmRng &rng,
          BoundMode bound_mode, std::size_t threads)
{
    const std::size_t particles = state.positions.size();
    if (rng.size() != particles)
        throw DomainError("random streams do not match the swarm size");
    const int levels = 1 << state.resolution_bits;

    parallel_for(particles, threads, [&](std::size_t p) {
        auto &stream = rng.stream(p);
        LevelMatrix &x = state.positions[p];
        const double r1 = uniform_open(stream);
        const double r2 = uniform_open(stream);
        const KeepMask keep1 = draw_discard_mask(stream, x.rows(), x.cols(), params.d1);
        const KeepMask keep2 = draw_discard_mask(stream, x.rows(), x.cols(), params.d2);
        advance_particle(x, state.velocities[p], state.personal_best_positions[p], state.global_best_position,
                         params, r1, r2, keep1, keep2, levels, bound_mode);
        state.current_values[p] = evaluate_particle(objective, p, x);
    });

    std::size_t best = 0;
    for (std::size_t p = 0; p < particles; ++p) {
        if (state.current_values[p] < state.personal_best_values[p]) {
            state.personal_best_values[p] = state.current_values[p];
            state.personal_best_positions[p] = state.positions[p];
        }
        if (state.personal_best_values[p] < state.personal_best_values[best])
            best = p;
    }
    if (state.personal_best_values[best] < state.global_best_value) {
        state.global_best_value = state.personal_best_values[best];
        state.global_best_position = state.personal_best_positions[best];
    }
    ++state.iteration;
}

OptimizationResult optimize(const PsoConfig &config, const ArrayGeometry &geometry,
                            const std::optional<PhaseProfile> &knowledge, SwarmObjective &objective)
{
    const auto start = std::chrono::steady_clock::now();
    SwarmRng rng(config.rng_seed, config.particles);
    SwarmState state = init_swarm(config, geometry, knowledge, objective, rng);

    std::vector<double> suppression;
    std::vector<double> fitness;
    suppression.reserve(static_cast<std::size_t>(config.iterations));
    fitness.reserve(static_cast<std::size_t>(config.iterations));
    const double initial = state.global_best_value;

    for (int t = 1; t <= config.iterations; ++t) {
        step(state, stage_params(config.schedule, t, config.iterations), objective, rng, config.bound_mode,
             config.threads);
        suppression.push_back(state.global_best_value);
        double sum = 0.0;
        for (double v : state.current_values)
            sum += v;
        fitness.push_back(sum);
    }

    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
    return OptimizationResult{
        PhaseProfile(state.global_best_position, geometry.resolution_bits()),
        state.global_best_value,
        initial,
        std::move(suppression),
        std::move(fitness),
        elapsed.count(),
        static_cast<std::uint64_t>(config.particles) * static_cast<std::uint64_t>(config.iterations + 1),
    };
}

OptimizationResult run(const PsoConfig &config, const ArrayGeometry &geometry, std::span<const BeamSpec> beams,
                       const MaskSet &masks)
{
    if (beams.size() != masks.beam_count())
        throw DomainError("mask set has " + std::to_string(masks.beam_count()) + " beams but " +
                          std::to_string(beams.size()) + " were given");
    std::optional<PhaseProfile> knowledge;
    if (config.knowledge != Knowledge::zero)
        knowledge = superpose_profiles(geometry, beams);
    SuppressionObjective objective(geometry, masks, config.particles, knowledge);
    return optimize(config, geometry, knowledge, objective);
}

} // namespace rissynth

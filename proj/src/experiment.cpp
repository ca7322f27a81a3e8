#include "rissynth/experiment.hpp"

#include "rissynth/error.hpp"
#include "rissynth/io.hpp"
#include "rissynth/synthesis.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <system_error>

namespace rissynth {

namespace {

void prepare_directory(const std::filesystem::path &dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw std::runtime_error("cannot create output directory '" + dir.string() + "'" +
                                 (ec ? ": " + ec.message() : std::string{}));
}

void write_text(const std::filesystem::path &path, const std::string &text)
{
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    out.flush();
    if (!out)
        throw std::runtime_error("error while writing '" + path.string() + "'");
}

void report(const RunOptions &options, const std::string &line)
{
    if (options.progress)
        options.progress(line);
}

std::string summary_text(const ExperimentConfig &config, const ExperimentResult &r)
{
    const auto &opt = r.optimization;
    std::string s;
    auto line = [&s](std::string_view key, const std::string &value) { s += fmt::format("{} = {}\n", key, value); };
    line("pre_suppression_db", format_exact(r.pre_suppression));
    line("post_suppression_db", format_exact(r.post_suppression));
    line("improvement_db", format_exact(r.improvement));
    line("initial_best_suppression_db", format_exact(opt.initial_best_value));
    line("iterations", std::to_string(opt.suppression_history.size()));
    line("evaluations", std::to_string(opt.evaluations));
    line("seed", std::to_string(config.pso.seed));
    line("wall_time_s", format_exact(opt.wall_time_seconds));
    line("wall_time_min", format_exact(opt.wall_time_seconds / 60.0));
    line("efficiency.elements", std::to_string(r.efficiency.elements));
    line("efficiency.individuals", std::to_string(r.efficiency.individuals));
    line("efficiency.optimization_time_minutes", format_exact(r.efficiency.optimization_time_minutes));
    line("efficiency.value", format_exact(r.efficiency.efficiency));
    s += format_config(config, "config.");
    return s;
}

} // namespace

EfficiencyReport efficiency(std::size_t elements, std::size_t individuals, double minutes)
{
    if (!(minutes > 0.0) || !std::isfinite(minutes))
        throw DomainError("optimization time must be positive, got " + format_exact(minutes) + " minutes");
    return {elements, individuals, minutes,
            static_cast<double>(elements) * static_cast<double>(individuals) / minutes};
}

ProfileEvaluation evaluate_profile(const ExperimentConfig &config, const PhaseProfile &profile)
{
    validate_config(config);
    const ArrayGeometry geometry = config.array();
    const AngularGrid grid = config.angular_grid();
    const MaskSet masks = build_masks(grid, config.beams, config.mask_radius_deg);
    ProfileEvaluation eval{compute_pattern(geometry, profile, grid), 0.0};
    eval.suppression = sll_objective(eval.pattern, masks);
    return eval;
}

ExperimentResult run_experiment(const ExperimentConfig &config, const RunOptions &options)
{
    validate_config(config);
    const std::filesystem::path dir = config.output_dir;
    prepare_directory(dir);

    const ArrayGeometry geometry = config.array();
    const AngularGrid grid = config.angular_grid();
    const MaskSet masks = build_masks(grid, config.beams, config.mask_radius_deg);
    const PsoConfig pso = config.pso_config();

    PhaseProfile pre = superpose_profiles(geometry, config.beams);
    const FarFieldPattern pre_pattern = compute_pattern(geometry, pre, grid);
    const double pre_value = sll_objective(pre_pattern, masks);
    report(options, fmt::format("pre-optimization suppression {:.3f} dB", pre_value));

    OptimizationResult opt = run(pso, geometry, config.beams, masks);
    const FarFieldPattern post_pattern = compute_pattern(geometry, opt.best_profile, grid);
    report(options, fmt::format("post-optimization suppression {:.3f} dB after {} iterations ({:.2f} s)",
                                opt.best_value, opt.suppression_history.size(), opt.wall_time_seconds));

    // Guard against a zero clock reading on trivially small runs.
    const double minutes = std::max(opt.wall_time_seconds, 1e-9) / 60.0;
    ExperimentResult result{
        std::move(pre),
        pre_value,
        std::move(opt),
        0.0,
        0.0,
        efficiency(geometry.rows() * geometry.cols(), pso.particles, minutes),
        dir,
    };
    result.post_suppression = result.optimization.best_value;
    result.improvement = result.pre_suppression - result.post_suppression;

    write_profile_csv(dir / "pre_profile.csv", result.pre_profile);
    write_pattern_csv(dir / "pre_pattern.csv", pre_pattern);
    write_profile_csv(dir / "post_profile.csv", result.optimization.best_profile);
    write_pattern_csv(dir / "post_pattern.csv", post_pattern);
    write_convergence_csv(dir / "convergence.csv", result.optimization);
    if (options.emit_heatmap) {
        write_heatmap_ppm(dir / "pre_heatmap.ppm", pre_pattern);
        write_heatmap_ppm(dir / "post_heatmap.ppm", post_pattern);
    }
    write_text(dir / "summary.txt", summary_text(config, result));
    return result;
}

double quantile(std::vector<double> values, double q)
{
    if (values.empty())
        throw DomainError("quantile of an empty sample");
    if (!(q >= 0.0 && q <= 1.0))
        throw DomainError("quantile level must be in [0, 1]");
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] + frac * (values[hi] - values[lo]);
}

Spread spread(std::span<const double> values)
{
    std::vector<double> v(values.begin(), values.end());
    return {quantile(v, 0.5), quantile(v, 0.25), quantile(v, 0.75)};
}

SweepReport run_sweep(const ExperimentConfig &config, std::span<const std::uint64_t> seeds,
                      const RunOptions &options)
{
    if (seeds.empty())
        throw ConfigError("sweep needs at least one seed");
    validate_config(config);
    const std::filesystem::path root = config.output_dir;
    prepare_directory(root);

    SweepReport sweep;
    for (const std::uint64_t seed : seeds) {
        ExperimentConfig run_config = config;
        run_config.pso.seed = seed;
        run_config.output_dir = (root / fmt::format("seed_{}", seed)).string();
        report(options, fmt::format("seed {}", seed));
        ExperimentResult r = run_experiment(run_config, options);
        sweep.runs.push_back({seed, r.pre_suppression, r.post_suppression, r.improvement,
                              std::move(r.optimization.suppression_history)});
    }

    std::vector<double> pre, post, gain;
    for (const auto &r : sweep.runs) {
        pre.push_back(r.pre_suppression);
        post.push_back(r.post_suppression);
        gain.push_back(r.improvement);
    }
    sweep.pre = spread(pre);
    sweep.post = spread(post);
    sweep.improvement = spread(gain);

    std::string csv = "seed,pre_suppression_db,post_suppression_db,improvement_db\n";
    for (const auto &r : sweep.runs)
        csv += fmt::format("{},{},{},{}\n", r.seed, format_exact(r.pre_suppression), format_exact(r.post_suppression),
                           format_exact(r.improvement));
    write_text(root / "sweep.csv", csv);

    std::string summary = fmt::format("runs = {}\n", sweep.runs.size());
    auto add = [&summary](std::string_view name, const Spread &s) {
        summary += fmt::format("{}.median = {}\n{}.q1 = {}\n{}.q3 = {}\n{}.iqr = {}\n", name, format_exact(s.median),
                               name, format_exact(s.q1), name, format_exact(s.q3), name, format_exact(s.q3 - s.q1));
    };
    add("pre_suppression_db", sweep.pre);
    add("post_suppression_db", sweep.post);
    add("improvement_db", sweep.improvement);
    write_text(root / "sweep_summary.txt", summary);
    return sweep;
}

} // namespace rissynth

// rissynth: multi-beam reflectarray profile synthesis from the command line.
//
//   rissynth run <config> [--out DIR] [--seed N] [--threads N] [--quiet] [--emit-heatmap]
//   rissynth pattern <profile.csv> <config> [--out DIR] [--emit-heatmap]
//   rissynth sweep <config> [--seeds 1,2,3 | --runs N] [--out DIR] [--threads N] [--quiet]
//
// Exit status: 0 success, 1 configuration error, 2 runtime error.

#include "rissynth/config.hpp"
#include "rissynth/error.hpp"
#include "rissynth/experiment.hpp"
#include "rissynth/io.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

namespace {

constexpr int kConfigExit = 1;
constexpr int kRuntimeExit = 2;

struct Common {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> threads;
    bool quiet = false;
    bool heatmap = false;
};

void add_common(CLI::App &cmd, Common &c, bool optimizer_flags)
{
    cmd.add_option("--out", c.out_dir, "Output directory (overrides output.dir)");
    cmd.add_flag("--quiet", c.quiet, "Only print errors");
    cmd.add_flag("--emit-heatmap", c.heatmap, "Also write PPM heatmaps of the dB patterns");
    if (optimizer_flags) {
        cmd.add_option("--seed", c.seed, "Random seed (overrides pso.seed)");
        cmd.add_option("--threads", c.threads, "Worker threads (overrides pso.threads)")->check(CLI::PositiveNumber);
    }
}

rissynth::ExperimentConfig resolve(const Common &c)
{
    rissynth::ExperimentConfig cfg = rissynth::load_config(c.config_path);
    if (!c.out_dir.empty())
        cfg.output_dir = c.out_dir;
    if (c.seed)
        cfg.pso.seed = *c.seed;
    if (c.threads)
        cfg.pso.threads = *c.threads;
    rissynth::validate_config(cfg);
    return cfg;
}

rissynth::RunOptions options(const Common &c)
{
    rissynth::RunOptions opt;
    opt.emit_heatmap = c.heatmap;
    if (!c.quiet)
        opt.progress = [](const std::string &line) { fmt::print("{}\n", line); };
    return opt;
}

int cmd_run(const Common &c)
{
    const auto cfg = resolve(c);
    const auto r = rissynth::run_experiment(cfg, options(c));
    if (!c.quiet)
        fmt::print("pre {:.3f} dB, post {:.3f} dB, improvement {:.3f} dB; artifacts in {}\n", r.pre_suppression,
                   r.post_suppression, r.improvement, r.output_dir.string());
    return 0;
}

int cmd_pattern(const Common &c, const std::string &profile_path)
{
    const auto cfg = resolve(c);
    const auto profile = rissynth::read_profile_csv(profile_path, cfg.geometry.resolution_bits);
    const auto eval = rissynth::evaluate_profile(cfg, profile);

    const std::filesystem::path dir = cfg.output_dir;
    std::filesystem::create_directories(dir);
    rissynth::write_pattern_csv(dir / "pattern.csv", eval.pattern);
    if (c.heatmap)
        rissynth::write_heatmap_ppm(dir / "pattern_heatmap.ppm", eval.pattern);
    if (!c.quiet)
        fmt::print("suppression_db = {}\n", rissynth::format_exact(eval.suppression));
    return 0;
}

int cmd_sweep(const Common &c, std::vector<std::uint64_t> seeds, std::size_t runs)
{
    const auto cfg = resolve(c);
    if (seeds.empty())
        for (std::size_t i = 0; i < runs; ++i)
            seeds.push_back(cfg.pso.seed + i);
    const auto sweep = rissynth::run_sweep(cfg, seeds, options(c));
    if (!c.quiet) {
        auto show = [](const char *name, const rissynth::Spread &s) {
            fmt::print("{:<12} median {:8.3f}  q1 {:8.3f}  q3 {:8.3f}\n", name, s.median, s.q1, s.q3);
        };
        show("pre", sweep.pre);
        show("post", sweep.post);
        show("improvement", sweep.improvement);
    }
    return 0;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Multi-beam reflectarray phase profile synthesis"};
    app.require_subcommand(1);

    Common run_args, pattern_args, sweep_args;
    std::string profile_path;
    std::vector<std::uint64_t> seeds;
    std::size_t runs = 10;

    auto *run = app.add_subcommand("run", "Optimize one configuration and write all artifacts");
    run->add_option("config", run_args.config_path, "Configuration file")->required();
    add_common(*run, run_args, true);

    auto *pattern = app.add_subcommand("pattern", "Re-evaluate a saved profile");
    pattern->add_option("profile", profile_path, "Profile CSV")->required();
    pattern->add_option("config", pattern_args.config_path, "Configuration file")->required();
    add_common(*pattern, pattern_args, false);

    auto *sweep = app.add_subcommand("sweep", "Repeat run over several seeds and report median and IQR");
    sweep->add_option("config", sweep_args.config_path, "Configuration file")->required();
    add_common(*sweep, sweep_args, true);
    auto *seeds_opt = sweep->add_option("--seeds", seeds, "Comma-separated seed list")->delimiter(',');
    sweep->add_option("--runs", runs, "Consecutive seeds from pso.seed when --seeds is absent")
        ->check(CLI::PositiveNumber)
        ->excludes(seeds_opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kConfigExit;
    }

    try {
        if (*run)
            return cmd_run(run_args);
        if (*pattern)
            return cmd_pattern(pattern_args, profile_path);
        return cmd_sweep(sweep_args, seeds, runs);
    } catch (const rissynth::ConfigError &e) {
        fmt::print(stderr, "configuration error: {}\n", e.what());
        return kConfigExit;
    } catch (const std::exception &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return kRuntimeExit;
    }
}

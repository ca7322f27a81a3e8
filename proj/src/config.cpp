#include "rissynth/config.hpp"

#include "rissynth/error.hpp"
#include "rissynth/farfield.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace rissynth {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text, int line)
{
    text = trim(text);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError(fmt::format("{}: expected a number, got '{}'", key, text), line);
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(value))
            throw ConfigError(fmt::format("{}: value must be finite", key), line);
    }
    return value;
}

std::size_t parse_count(std::string_view key, std::string_view text, int line)
{
    const long long v = parse_number<long long>(key, text, line);
    if (v < 0)
        throw ConfigError(fmt::format("{}: must not be negative", key), line);
    return static_cast<std::size_t>(v);
}

std::vector<BeamSpec> parse_beams(std::string_view text, int line)
{
    std::vector<BeamSpec> beams;
    std::string_view rest = trim(text);
    while (!rest.empty()) {
        if (rest.front() != '(')
            throw ConfigError("beams: expected '(theta, phi)' entries separated by commas", line);
        const auto close = rest.find(')');
        if (close == std::string_view::npos)
            throw ConfigError("beams: missing ')'", line);
        const std::string_view inner = rest.substr(1, close - 1);
        const auto comma = inner.find(',');
        if (comma == std::string_view::npos)
            throw ConfigError("beams: each entry needs theta and phi", line);
        beams.push_back({parse_number<double>("beams theta", inner.substr(0, comma), line),
                         parse_number<double>("beams phi", inner.substr(comma + 1), line)});
        rest = trim(rest.substr(close + 1));
        if (!rest.empty()) {
            if (rest.front() != ',')
                throw ConfigError("beams: entries must be separated by commas", line);
            rest = trim(rest.substr(1));
            if (rest.empty())
                throw ConfigError("beams: trailing comma", line);
        }
    }
    return beams;
}

std::vector<int> parse_int_list(std::string_view key, std::string_view text, int line)
{
    std::vector<int> values;
    std::string_view rest = trim(text);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        values.push_back(parse_number<int>(key, rest.substr(0, comma), line));
        if (comma == std::string_view::npos)
            break;
        rest = trim(rest.substr(comma + 1));
        if (rest.empty())
            throw ConfigError(fmt::format("{}: trailing comma", key), line);
    }
    return values;
}

Knowledge parse_knowledge(std::string_view text, int line)
{
    text = trim(text);
    if (text == "zero")
        return Knowledge::zero;
    if (text == "partial")
        return Knowledge::partial;
    if (text == "full")
        return Knowledge::full;
    throw ConfigError(fmt::format("pso.knowledge: expected zero, partial or full, got '{}'", text), line);
}

BoundMode parse_bound_mode(std::string_view text, int line)
{
    text = trim(text);
    if (text == "clamp")
        return BoundMode::clamp;
    if (text == "wrap")
        return BoundMode::wrap;
    throw ConfigError(fmt::format("pso.bound_mode: expected clamp or wrap, got '{}'", text), line);
}

// Applies one key; returns false for an unknown key.
bool apply_key(ExperimentConfig &cfg, const std::string &key, std::string_view value, int line)
{
    auto &g = cfg.geometry;
    auto &grid = cfg.grid;
    auto &pso = cfg.pso;

    if (key == "geometry.rows") g.rows = parse_count(key, value, line);
    else if (key == "geometry.cols") g.cols = parse_count(key, value, line);
    else if (key == "geometry.spacing_mm") g.spacing_mm = parse_number<double>(key, value, line);
    else if (key == "geometry.frequency_ghz") g.frequency_ghz = parse_number<double>(key, value, line);
    else if (key == "geometry.amplitude") g.amplitude = parse_number<double>(key, value, line);
    else if (key == "geometry.resolution_bits") g.resolution_bits = parse_number<int>(key, value, line);
    else if (key == "beams") cfg.beams = parse_beams(value, line);
    else if (key == "grid.theta_start") grid.theta_start = parse_number<double>(key, value, line);
    else if (key == "grid.theta_stop") grid.theta_stop = parse_number<double>(key, value, line);
    else if (key == "grid.theta_step") grid.theta_step = parse_number<double>(key, value, line);
    else if (key == "grid.phi_start") grid.phi_start = parse_number<double>(key, value, line);
    else if (key == "grid.phi_stop") grid.phi_stop = parse_number<double>(key, value, line);
    else if (key == "grid.phi_step") grid.phi_step = parse_number<double>(key, value, line);
    else if (key == "mask.radius_deg") cfg.mask_radius_deg = parse_number<double>(key, value, line);
    else if (key == "pso.particles") pso.particles = parse_count(key, value, line);
    else if (key == "pso.iterations") pso.iterations = parse_number<int>(key, value, line);
    else if (key == "pso.knowledge") pso.knowledge = parse_knowledge(value, line);
    else if (key == "pso.seed") pso.seed = parse_number<std::uint64_t>(key, value, line);
    else if (key == "pso.bound_mode") pso.bound_mode = parse_bound_mode(value, line);
    else if (key == "pso.threads") pso.threads = parse_count(key, value, line);
    else if (key == "pso.stage_ends") pso.stage_ends = parse_int_list(key, value, line);
    else if (key == "output.dir") {
        cfg.output_dir = std::string(trim(value));
        if (cfg.output_dir.empty())
            throw ConfigError("output.dir must not be empty", line);
    } else if (key.starts_with("pso.stage")) {
        // pso.stage<N>.<d1|d2|c1|c2|w>
        const auto dot = key.find('.', 9);
        if (dot == std::string::npos)
            return false;
        const std::string_view index_text = std::string_view(key).substr(9, dot - 9);
        int index = 0;
        const auto [ptr, ec] = std::from_chars(index_text.data(), index_text.data() + index_text.size(), index);
        if (ec != std::errc{} || ptr != index_text.data() + index_text.size() || index < 1 ||
            static_cast<std::size_t>(index) > pso.stages.size())
            return false;
        StageParams &s = pso.stages[static_cast<std::size_t>(index - 1)];
        const std::string field = key.substr(dot + 1);
        const double v = parse_number<double>(key, value, line);
        if (field == "d1") s.d1 = v;
        else if (field == "d2") s.d2 = v;
        else if (field == "c1") s.c1 = v;
        else if (field == "c2") s.c2 = v;
        else if (field == "w") s.w = v;
        else return false;
    } else {
        return false;
    }
    return true;
}

std::string format_double(double v)
{
    return fmt::format("{}", v);
}

} // namespace

ArrayGeometry ExperimentConfig::array() const
{
    return ArrayGeometry(geometry.rows, geometry.cols, geometry.spacing_mm * 1e-3, geometry.frequency_ghz * 1e9,
                         geometry.amplitude, geometry.resolution_bits);
}

AngularGrid ExperimentConfig::angular_grid() const
{
    return AngularGrid::uniform(grid.theta_start, grid.theta_stop, grid.theta_step, grid.phi_start, grid.phi_stop,
                                grid.phi_step);
}

PsoConfig ExperimentConfig::pso_config() const
{
    PsoConfig c;
    c.particles = pso.particles;
    c.iterations = pso.iterations;
    c.knowledge = pso.knowledge;
    c.schedule = StageSchedule(pso.stages, pso.stage_ends);
    c.rng_seed = pso.seed;
    c.bound_mode = pso.bound_mode;
    c.threads = pso.threads;
    return c;
}

void validate_config(const ExperimentConfig &config)
{
    const auto &g = config.geometry;
    if (g.rows < 1)
        throw ConfigError("geometry.rows must be at least 1");
    if (g.cols < 1)
        throw ConfigError("geometry.cols must be at least 1");
    if (g.spacing_mm <= 0.0)
        throw ConfigError("geometry.spacing_mm must be positive");
    if (g.frequency_ghz <= 0.0)
        throw ConfigError("geometry.frequency_ghz must be positive");
    if (g.amplitude <= 0.0 || g.amplitude > 1.0)
        throw ConfigError("geometry.amplitude must be in (0, 1]");
    if (g.resolution_bits < 1 || g.resolution_bits > 16)
        throw ConfigError("geometry.resolution_bits must be in [1, 16]");
    if (config.beams.empty())
        throw ConfigError("beams must list at least one (theta, phi) direction");
    for (std::size_t d = 0; d < config.beams.size(); ++d) {
        try {
            validate_beam(config.beams[d]);
        } catch (const DomainError &e) {
            throw ConfigError(fmt::format("beams entry {}: {}", d + 1, e.what()));
        }
    }
    if (config.mask_radius_deg <= 0.0)
        throw ConfigError("mask.radius_deg must be positive");

    AngularGrid grid = AngularGrid::standard();
    try {
        grid = config.angular_grid();
    } catch (const DomainError &e) {
        throw ConfigError(fmt::format("grid: {}", e.what()));
    }
    try {
        build_masks(grid, config.beams, config.mask_radius_deg);
    } catch (const DomainError &e) {
        throw ConfigError(fmt::format("mask: {}", e.what()));
    }

    try {
        config.pso_config().validate();
    } catch (const DomainError &e) {
        throw ConfigError(fmt::format("pso: {}", e.what()));
    }
}

ExperimentConfig parse_config(std::string_view text)
{
    ExperimentConfig cfg;
    std::set<std::string> seen;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view content = raw;
        if (const auto hash = content.find('#'); hash != std::string_view::npos)
            content = content.substr(0, hash);
        content = trim(content);
        if (content.empty())
            continue;

        const auto eq = content.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(fmt::format("expected 'key = value', got '{}'", content), line);
        const std::string key(trim(content.substr(0, eq)));
        const std::string_view value = trim(content.substr(eq + 1));
        if (key.empty())
            throw ConfigError("missing key before '='", line);
        if (value.empty())
            throw ConfigError(fmt::format("{}: missing value", key), line);
        if (!seen.insert(key).second)
            throw ConfigError(fmt::format("{}: key given twice", key), line);
        if (!apply_key(cfg, key, value, line))
            throw ConfigError(fmt::format("unknown key '{}'", key), line);
    }
    validate_config(cfg);
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string format_config(const ExperimentConfig &c, std::string_view prefix)
{
    std::string out;
    const auto put = [&](std::string_view key, const std::string &value) {
        out += fmt::format("{}{} = {}\n", prefix, key, value);
    };

    put("geometry.rows", std::to_string(c.geometry.rows));
    put("geometry.cols", std::to_string(c.geometry.cols));
    put("geometry.spacing_mm", format_double(c.geometry.spacing_mm));
    put("geometry.frequency_ghz", format_double(c.geometry.frequency_ghz));
    put("geometry.amplitude", format_double(c.geometry.amplitude));
    put("geometry.resolution_bits", std::to_string(c.geometry.resolution_bits));

    std::string beams;
    for (std::size_t d = 0; d < c.beams.size(); ++d)
        beams += fmt::format("{}({}, {})", d == 0 ? "" : ", ", format_double(c.beams[d].theta_deg),
                             format_double(c.beams[d].phi_deg));
    put("beams", beams);

    put("grid.theta_start", format_double(c.grid.theta_start));
    put("grid.theta_stop", format_double(c.grid.theta_stop));
    put("grid.theta_step", format_double(c.grid.theta_step));
    put("grid.phi_start", format_double(c.grid.phi_start));
    put("grid.phi_stop", format_double(c.grid.phi_stop));
    put("grid.phi_step", format_double(c.grid.phi_step));
    put("mask.radius_deg", format_double(c.mask_radius_deg));

    put("pso.particles", std::to_string(c.pso.particles));
    put("pso.iterations", std::to_string(c.pso.iterations));
    put("pso.knowledge", to_string(c.pso.knowledge));
    put("pso.seed", std::to_string(c.pso.seed));
    put("pso.bound_mode", to_string(c.pso.bound_mode));
    put("pso.threads", std::to_string(c.pso.threads));
    if (!c.pso.stage_ends.empty())
        put("pso.stage_ends", fmt::format("{}", fmt::join(c.pso.stage_ends, ", ")));
    for (std::size_t s = 0; s < c.pso.stages.size(); ++s) {
        const StageParams &p = c.pso.stages[s];
        put(fmt::format("pso.stage{}.d1", s + 1), format_double(p.d1));
        put(fmt::format("pso.stage{}.d2", s + 1), format_double(p.d2));
        put(fmt::format("pso.stage{}.c1", s + 1), format_double(p.c1));
        put(fmt::format("pso.stage{}.c2", s + 1), format_double(p.c2));
        put(fmt::format("pso.stage{}.w", s + 1), format_double(p.w));
    }
    put("output.dir", c.output_dir);
    return out;
}

} // namespace rissynth

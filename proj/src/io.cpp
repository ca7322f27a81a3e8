#include "rissynth/io.hpp"

#include "rissynth/error.hpp"

#include <fmt/format.h>
#include <fmt/os.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rissynth {

namespace {

std::ofstream open_for_write(const std::filesystem::path &path, std::ios::openmode mode = std::ios::out)
{
    std::ofstream out(path, mode | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

void finish(std::ofstream &out, const std::filesystem::path &path)
{
    out.flush();
    if (!out)
        throw std::runtime_error("error while writing '" + path.string() + "'");
}

std::vector<std::string_view> split(std::string_view line, char sep)
{
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(sep, start);
        fields.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return fields;
}

template <typename T>
T parse_field(std::string_view text, const std::filesystem::path &path, int line)
{
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
        text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r'))
        text.remove_suffix(1);
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw DomainError(fmt::format("{}:{}: cannot parse '{}'", path.string(), line, text));
    return value;
}

// Piecewise-linear dark-blue -> teal -> yellow ramp.
std::array<unsigned char, 3> colour(double t)
{
    static constexpr std::array<std::array<double, 3>, 5> stops{{
        {68, 1, 84},
        {59, 82, 139},
        {33, 145, 140},
        {94, 201, 98},
        {253, 231, 37},
    }};
    t = std::clamp(t, 0.0, 1.0) * static_cast<double>(stops.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
    const double f = t - static_cast<double>(i);
    std::array<unsigned char, 3> rgb{};
    for (std::size_t c = 0; c < 3; ++c)
        rgb[c] = static_cast<unsigned char>(std::lround(stops[i][c] + f * (stops[i + 1][c] - stops[i][c])));
    return rgb;
}

} // namespace

std::string format_exact(double value)
{
    return fmt::format("{}", value);
}

void write_profile_csv(const std::filesystem::path &path, const PhaseProfile &profile)
{
    auto out = open_for_write(path);
    for (std::size_t r = 0; r < profile.rows(); ++r) {
        std::string line;
        for (std::size_t c = 0; c < profile.cols(); ++c) {
            if (c > 0)
                line += ',';
            line += std::to_string(profile(r, c));
        }
        out << line << '\n';
    }
    finish(out, path);
}

PhaseProfile read_profile_csv(const std::filesystem::path &path, int resolution_bits)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open profile '" + path.string() + "'");

    std::vector<std::vector<int>> rows;
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty() || line == "\r")
            continue;
        std::vector<int> row;
        for (std::string_view field : split(line, ','))
            row.push_back(parse_field<int>(field, path, number));
        if (!rows.empty() && row.size() != rows.front().size())
            throw DomainError(fmt::format("{}:{}: expected {} columns, found {}", path.string(), number,
                                          rows.front().size(), row.size()));
        rows.push_back(std::move(row));
    }
    if (rows.empty())
        throw DomainError("profile '" + path.string() + "' is empty");

    LevelMatrix levels(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            levels(r, c) = rows[r][c];
    return PhaseProfile(std::move(levels), resolution_bits);
}

void write_pattern_csv(const std::filesystem::path &path, const FarFieldPattern &pattern)
{
    auto out = open_for_write(path);
    fmt::memory_buffer buf;
    fmt::format_to(std::back_inserter(buf), "theta_deg,phi_deg,magnitude_db\n");
    const AngularGrid &grid = pattern.grid;
    for (std::size_t i = 0; i < grid.theta_count(); ++i)
        for (std::size_t j = 0; j < grid.phi_count(); ++j)
            // + 0.0 keeps a negative zero from printing as -0.000000
            fmt::format_to(std::back_inserter(buf), "{:.6f},{:.6f},{:.6f}\n", grid.theta_samples()[i] + 0.0,
                           grid.phi_samples()[j] + 0.0, pattern.magnitude_db(i, j) + 0.0);
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
    finish(out, path);
}

FarFieldPattern read_pattern_csv(const std::filesystem::path &path, const AngularGrid &grid)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open pattern '" + path.string() + "'");

    std::string line;
    if (!std::getline(in, line) || line.rfind("theta_deg,phi_deg,magnitude_db", 0) != 0)
        throw DomainError(path.string() + ": missing pattern header");

    FarFieldPattern pattern{grid, {}, Matrix<double>(grid.theta_count(), grid.phi_count())};
    std::size_t g = 0;
    int number = 1;
    while (std::getline(in, line)) {
        ++number;
        if (line.empty())
            continue;
        const auto fields = split(line, ',');
        if (fields.size() != 3)
            throw DomainError(fmt::format("{}:{}: expected 3 fields", path.string(), number));
        if (g >= grid.size())
            throw DomainError(fmt::format("{}:{}: more rows than grid points", path.string(), number));
        const std::size_t i = g / grid.phi_count();
        const std::size_t j = g % grid.phi_count();
        const double theta = parse_field<double>(fields[0], path, number);
        const double phi = parse_field<double>(fields[1], path, number);
        if (std::abs(theta - grid.theta_samples()[i]) > 5e-7 || std::abs(phi - grid.phi_samples()[j]) > 5e-7)
            throw DomainError(fmt::format("{}:{}: coordinates do not match the grid", path.string(), number));
        pattern.magnitude_db(i, j) = parse_field<double>(fields[2], path, number);
        ++g;
    }
    if (g != grid.size())
        throw DomainError(fmt::format("{}: {} rows for {} grid points", path.string(), g, grid.size()));
    return pattern;
}

void write_convergence_csv(const std::filesystem::path &path, const OptimizationResult &result)
{
    auto out = open_for_write(path);
    out << "iteration,global_best_suppression_db,fitness_sum_db\n";
    for (std::size_t t = 0; t < result.suppression_history.size(); ++t)
        out << fmt::format("{},{},{}\n", t + 1, format_exact(result.suppression_history[t]),
                           format_exact(result.fitness_history[t]));
    finish(out, path);
}

void write_heatmap_ppm(const std::filesystem::path &path, const FarFieldPattern &pattern)
{
    constexpr double lo = -40.0;
    auto out = open_for_write(path, std::ios::out | std::ios::binary);
    const std::size_t rows = pattern.grid.theta_count();
    const std::size_t cols = pattern.grid.phi_count();
    out << "P6\n" << cols << ' ' << rows << "\n255\n";
    std::vector<unsigned char> pixels;
    pixels.reserve(rows * cols * 3);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const auto rgb = colour((pattern.magnitude_db(i, j) - lo) / -lo);
            pixels.insert(pixels.end(), rgb.begin(), rgb.end());
        }
    out.write(reinterpret_cast<const char *>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
    finish(out, path);
}

} // namespace rissynth

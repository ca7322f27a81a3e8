#include "rissynth/config.hpp"
#include "rissynth/error.hpp"
#include "rissynth/experiment.hpp"
#include "rissynth/farfield.hpp"
#include "rissynth/geometry.hpp"
#include "rissynth/io.hpp"
#include "rissynth/phase_profile.hpp"
#include "rissynth/pso.hpp"
#include "rissynth/synthesis.hpp"

#include <pybind11/functional.h>
#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

namespace py = pybind11;
using namespace rissynth;

namespace {

template <typename T>
py::array_t<T> to_numpy(const Matrix<T> &m)
{
    py::array_t<T> out({m.rows(), m.cols()});
    std::copy(m.begin(), m.end(), out.mutable_data());
    return out;
}

template <typename T>
Matrix<T> from_numpy(const py::array_t<T, py::array::c_style | py::array::forcecast> &a)
{
    if (a.ndim() != 2)
        throw py::value_error("expected a 2-D array");
    Matrix<T> m(static_cast<std::size_t>(a.shape(0)), static_cast<std::size_t>(a.shape(1)));
    std::copy(a.data(), a.data() + a.size(), m.begin());
    return m;
}

std::vector<BeamSpec> to_beams(const std::vector<std::pair<double, double>> &beams)
{
    std::vector<BeamSpec> out;
    for (const auto &[t, p] : beams)
        out.push_back({t, p});
    return out;
}

} // namespace

PYBIND11_MODULE(rissynth, m)
{
    m.doc() = "Multi-beam reflectarray phase profile synthesis with a discrete particle swarm";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    py::class_<ArrayGeometry>(m, "ArrayGeometry")
        .def(py::init<std::size_t, std::size_t, double, double, double, int>(), py::arg("rows"), py::arg("cols"),
             py::arg("spacing_m"), py::arg("frequency_hz"), py::arg("amplitude") = 0.7,
             py::arg("resolution_bits") = 2)
        .def_property_readonly("rows", &ArrayGeometry::rows)
        .def_property_readonly("cols", &ArrayGeometry::cols)
        .def_property_readonly("spacing", &ArrayGeometry::spacing)
        .def_property_readonly("frequency", &ArrayGeometry::frequency)
        .def_property_readonly("amplitude", &ArrayGeometry::element_amplitude)
        .def_property_readonly("resolution_bits", &ArrayGeometry::resolution_bits)
        .def_property_readonly("level_count", &ArrayGeometry::level_count)
        .def_property_readonly("wavelength", &ArrayGeometry::wavelength)
        .def_property_readonly("wavenumber", &ArrayGeometry::wavenumber);

    py::class_<BeamSpec>(m, "BeamSpec")
        .def(py::init<double, double>(), py::arg("theta_deg"), py::arg("phi_deg"))
        .def_readwrite("theta_deg", &BeamSpec::theta_deg)
        .def_readwrite("phi_deg", &BeamSpec::phi_deg)
        .def("__repr__", [](const BeamSpec &b) {
            return "BeamSpec(" + format_exact(b.theta_deg) + ", " + format_exact(b.phi_deg) + ")";
        });

    py::class_<AngularGrid>(m, "AngularGrid")
        .def_static("uniform", &AngularGrid::uniform, py::arg("theta_start"), py::arg("theta_stop"),
                    py::arg("theta_step"), py::arg("phi_start"), py::arg("phi_stop"), py::arg("phi_step"))
        .def_static("standard", &AngularGrid::standard)
        .def_property_readonly("theta", &AngularGrid::theta_samples)
        .def_property_readonly("phi", &AngularGrid::phi_samples)
        .def_property_readonly("shape", [](const AngularGrid &g) { return py::make_tuple(g.theta_count(), g.phi_count()); });

    py::class_<PhaseProfile>(m, "PhaseProfile")
        .def(py::init([](const py::array_t<int, py::array::c_style | py::array::forcecast> &levels, int bits) {
                 return PhaseProfile(from_numpy<int>(levels), bits);
             }),
             py::arg("levels"), py::arg("resolution_bits"))
        .def_static("uniform", &PhaseProfile::uniform, py::arg("rows"), py::arg("cols"), py::arg("resolution_bits"),
                    py::arg("level") = 1)
        .def_property_readonly("levels", [](const PhaseProfile &p) { return to_numpy(p.levels()); })
        .def_property_readonly("resolution_bits", &PhaseProfile::resolution_bits)
        .def("phases", [](const PhaseProfile &p) { return to_numpy(p.phases()); })
        .def(py::self == py::self);

    m.def("level_to_phase", &level_to_phase, py::arg("level"), py::arg("resolution_bits"));
    m.def("phase_to_level", &phase_to_level, py::arg("phase"), py::arg("resolution_bits"));

    m.def(
        "single_beam_profile",
        [](const ArrayGeometry &g, double theta, double phi) { return single_beam_profile(g, {theta, phi}); },
        py::arg("geometry"), py::arg("theta_deg"), py::arg("phi_deg"));
    m.def(
        "superpose_profiles",
        [](const ArrayGeometry &g, const std::vector<std::pair<double, double>> &beams) {
            return superpose_profiles(g, to_beams(beams));
        },
        py::arg("geometry"), py::arg("beams"));

    py::class_<FarFieldPattern>(m, "FarFieldPattern")
        .def_readonly("grid", &FarFieldPattern::grid)
        .def_property_readonly("magnitude", [](const FarFieldPattern &p) { return to_numpy(p.magnitude); })
        .def_property_readonly("magnitude_db", [](const FarFieldPattern &p) { return to_numpy(p.magnitude_db); });

    py::class_<MaskSet>(m, "MaskSet")
        .def_property_readonly("beam_count", &MaskSet::beam_count)
        .def("wanted", [](const MaskSet &s, std::size_t d) { return to_numpy(s.wanted(d)); }, py::arg("beam"))
        .def_property_readonly("unwanted", [](const MaskSet &s) { return to_numpy(s.unwanted()); });

    m.def("compute_pattern", &compute_pattern, py::arg("geometry"), py::arg("profile"), py::arg("grid"));
    m.def(
        "compute_pattern_from_phases",
        [](const ArrayGeometry &g, const py::array_t<double, py::array::c_style | py::array::forcecast> &phases,
           const AngularGrid &grid) { return compute_pattern_from_phases(g, from_numpy<double>(phases), grid); },
        py::arg("geometry"), py::arg("phases"), py::arg("grid"));
    m.def(
        "build_masks",
        [](const AngularGrid &grid, const std::vector<std::pair<double, double>> &beams, double radius) {
            return build_masks(grid, to_beams(beams), radius);
        },
        py::arg("grid"), py::arg("beams"), py::arg("radius_deg") = 10.0);
    m.def("sll_objective", &sll_objective, py::arg("pattern"), py::arg("masks"));

    py::enum_<Knowledge>(m, "Knowledge")
        .value("zero", Knowledge::zero)
        .value("partial", Knowledge::partial)
        .value("full", Knowledge::full);
    py::enum_<BoundMode>(m, "BoundMode").value("clamp", BoundMode::clamp).value("wrap", BoundMode::wrap);

    py::class_<PsoConfig>(m, "PsoConfig")
        .def(py::init([](std::size_t particles, int iterations, Knowledge knowledge, std::uint64_t seed,
                         BoundMode bound_mode, std::size_t threads) {
                 PsoConfig c;
                 c.particles = particles;
                 c.iterations = iterations;
                 c.knowledge = knowledge;
                 c.rng_seed = seed;
                 c.bound_mode = bound_mode;
                 c.threads = threads;
                 c.validate();
                 return c;
             }),
             py::arg("particles") = 100, py::arg("iterations") = 100, py::arg("knowledge") = Knowledge::full,
             py::arg("seed") = 1, py::arg("bound_mode") = BoundMode::clamp, py::arg("threads") = 1)
        .def_readwrite("particles", &PsoConfig::particles)
        .def_readwrite("iterations", &PsoConfig::iterations)
        .def_readwrite("knowledge", &PsoConfig::knowledge)
        .def_readwrite("seed", &PsoConfig::rng_seed)
        .def_readwrite("bound_mode", &PsoConfig::bound_mode)
        .def_readwrite("threads", &PsoConfig::threads);

    py::class_<OptimizationResult>(m, "OptimizationResult")
        .def_readonly("best_profile", &OptimizationResult::best_profile)
        .def_readonly("best_value", &OptimizationResult::best_value)
        .def_readonly("initial_best_value", &OptimizationResult::initial_best_value)
        .def_readonly("suppression_history", &OptimizationResult::suppression_history)
        .def_readonly("fitness_history", &OptimizationResult::fitness_history)
        .def_readonly("wall_time_seconds", &OptimizationResult::wall_time_seconds)
        .def_readonly("evaluations", &OptimizationResult::evaluations);

    m.def(
        "run",
        [](const PsoConfig &config, const ArrayGeometry &g, const std::vector<std::pair<double, double>> &beams,
           const MaskSet &masks) {
            py::gil_scoped_release release;
            return run(config, g, to_beams(beams), masks);
        },
        py::arg("config"), py::arg("geometry"), py::arg("beams"), py::arg("masks"));

    py::class_<EfficiencyReport>(m, "EfficiencyReport")
        .def_readonly("elements", &EfficiencyReport::elements)
        .def_readonly("individuals", &EfficiencyReport::individuals)
        .def_readonly("optimization_time_minutes", &EfficiencyReport::optimization_time_minutes)
        .def_readonly("efficiency", &EfficiencyReport::efficiency);
    m.def("efficiency", &efficiency, py::arg("elements"), py::arg("individuals"), py::arg("minutes"));

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def_property(
            "output_dir", [](const ExperimentConfig &c) { return c.output_dir; },
            [](ExperimentConfig &c, const std::string &d) { c.output_dir = d; })
        .def_property(
            "seed", [](const ExperimentConfig &c) { return c.pso.seed; },
            [](ExperimentConfig &c, std::uint64_t s) { c.pso.seed = s; })
        .def_property_readonly("beams",
                               [](const ExperimentConfig &c) {
                                   std::vector<std::pair<double, double>> out;
                                   for (const auto &b : c.beams)
                                       out.emplace_back(b.theta_deg, b.phi_deg);
                                   return out;
                               })
        .def("array", &ExperimentConfig::array)
        .def("angular_grid", &ExperimentConfig::angular_grid)
        .def("pso_config", &ExperimentConfig::pso_config)
        .def("__str__", [](const ExperimentConfig &c) { return format_config(c); });
    m.def("parse_config", &parse_config, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("pre_profile", &ExperimentResult::pre_profile)
        .def_readonly("pre_suppression", &ExperimentResult::pre_suppression)
        .def_readonly("optimization", &ExperimentResult::optimization)
        .def_readonly("post_suppression", &ExperimentResult::post_suppression)
        .def_readonly("improvement", &ExperimentResult::improvement)
        .def_readonly("efficiency", &ExperimentResult::efficiency)
        .def_readonly("output_dir", &ExperimentResult::output_dir);
    m.def(
        "run_experiment",
        [](const ExperimentConfig &config, bool emit_heatmap) {
            py::gil_scoped_release release;
            RunOptions options;
            options.emit_heatmap = emit_heatmap;
            return run_experiment(config, options);
        },
        py::arg("config"), py::arg("emit_heatmap") = false);

    m.def("read_profile_csv", &read_profile_csv, py::arg("path"), py::arg("resolution_bits"));
    m.def("write_profile_csv", &write_profile_csv, py::arg("path"), py::arg("profile"));
}

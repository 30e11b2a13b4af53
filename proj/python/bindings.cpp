// pybind11 surface for the core operations: fields, convolution, unsweep,
// elasticity, pruning, and the scenario workflow.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "prunetrace/scenario.hpp"

namespace py = pybind11;
using namespace prunetrace;

namespace {

std::vector<std::vector<int>> indicator_rows(const IndicatorField& f) {
    std::vector<std::vector<int>> rows(f.grid.ny, std::vector<int>(f.grid.nx, 0));
    for (int j = 0; j < f.grid.ny; ++j)
        for (int i = 0; i < f.grid.nx; ++i) rows[j][i] = f.at(i, j) ? 1 : 0;
    return rows;
}

std::vector<std::vector<double>> scalar_rows(const ScalarField& f) {
    std::vector<std::vector<double>> rows(f.grid.ny, std::vector<double>(f.grid.nx, 0.0));
    for (int j = 0; j < f.grid.ny; ++j)
        for (int i = 0; i < f.grid.nx; ++i) rows[j][i] = f.at(i, j);
    return rows;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "design-space pruning and Pareto-tracing topology optimization on 2D grids";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InfeasibleTargetError>(m, "InfeasibleTargetError", PyExc_ValueError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::class_<Grid>(m, "Grid")
        .def(py::init<int, int, double, double, double>(), py::arg("nx"), py::arg("ny"),
             py::arg("h"), py::arg("ox") = 0.0, py::arg("oy") = 0.0)
        .def_readonly("nx", &Grid::nx)
        .def_readonly("ny", &Grid::ny)
        .def_readonly("h", &Grid::h)
        .def_readonly("ox", &Grid::ox)
        .def_readonly("oy", &Grid::oy)
        .def("cells", &Grid::cells)
        .def("cx", &Grid::cx, py::arg("i"))
        .def("cy", &Grid::cy, py::arg("j"));

    py::class_<IndicatorField>(m, "IndicatorField")
        .def(py::init([](const Grid& g, bool fill) { return IndicatorField(g, fill ? 1 : 0); }),
             py::arg("grid"), py::arg("fill") = false)
        .def_readonly("grid", &IndicatorField::grid)
        .def("get", [](const IndicatorField& f, int i, int j) { return f.at(i, j) != 0; },
             py::arg("i"), py::arg("j"))
        .def("set",
             [](IndicatorField& f, int i, int j, bool v) { f.set(i, j, v); }, py::arg("i"),
             py::arg("j"), py::arg("value"))
        .def("count", &IndicatorField::count)
        .def("rows", &indicator_rows, "cell values as a list of rows, bottom row first");

    py::class_<ScalarField>(m, "ScalarField")
        .def(py::init<const Grid&, double>(), py::arg("grid"), py::arg("fill") = 0.0)
        .def_readonly("grid", &ScalarField::grid)
        .def("get", [](const ScalarField& f, int i, int j) { return f.at(i, j); }, py::arg("i"),
             py::arg("j"))
        .def("rows", &scalar_rows, "cell values as a list of rows, bottom row first");

    m.def("convolve", &convolve, py::arg("a"), py::arg("b"),
          "cross-correlation of two indicator fields, scaled by the cell area");
    m.def("regularize", &regularize, py::arg("field"), py::arg("min_component") = 4,
          "morphological opening plus small-component removal");
    m.def("volume_fraction", &volume_fraction, py::arg("field"), py::arg("reference"));

    py::class_<MotionSet>(m, "MotionSet")
        .def("__len__", [](const MotionSet& s) { return s.samples.size(); });
    m.def(
        "make_rotation_sweep",
        [](double px, double py_, double theta0, double theta1, int samples) {
            return make_rotation_sweep({px, py_}, theta0, theta1, samples);
        },
        py::arg("pivot_x"), py::arg("pivot_y"), py::arg("theta0"), py::arg("theta1"),
        py::arg("samples"));
    m.def("unsweep", &unsweep, py::arg("motions"), py::arg("envelope"), py::arg("grid"),
          "largest regularized set whose points stay in the envelope under every motion");

    py::class_<Material>(m, "Material")
        .def(py::init<double, double, double>(), py::arg("young"), py::arg("poisson"),
             py::arg("ersatz") = 1e-6);

    py::class_<BoundaryConditions>(m, "BoundaryConditions")
        .def(py::init<>())
        .def("fix_node",
             [](BoundaryConditions& bc, int i, int j, bool fx, bool fy) {
                 bc.fixed_nodes.push_back({i, j, fx, fy});
             },
             py::arg("i"), py::arg("j"), py::arg("fix_x") = true, py::arg("fix_y") = true)
        .def("load_node",
             [](BoundaryConditions& bc, int i, int j, double fx, double fy) {
                 bc.loads.push_back({i, j, fx, fy});
             },
             py::arg("i"), py::arg("j"), py::arg("fx"), py::arg("fy"));

    py::class_<FeaResult>(m, "FeaResult")
        .def_readonly("compliance", &FeaResult::compliance)
        .def_readonly("max_deflection", &FeaResult::max_deflection)
        .def_readonly("residual", &FeaResult::residual)
        .def_readonly("deflection_blow_up", &FeaResult::deflection_blow_up)
        .def("ux", &FeaResult::ux, py::arg("i"), py::arg("j"))
        .def("uy", &FeaResult::uy, py::arg("i"), py::arg("j"));
    m.def("solve_elasticity", &solve_elasticity, py::arg("design"), py::arg("material"),
          py::arg("bc"), "plane-stress solve with void cells at the ersatz stiffness");

    py::class_<ToolAssembly>(m, "ToolAssembly")
        .def(py::init([](IndicatorField head, IndicatorField cutter, int oi, int oj) {
                 return ToolAssembly{std::move(head), std::move(cutter), oi, oj};
             }),
             py::arg("head"), py::arg("cutter"), py::arg("origin_i"), py::arg("origin_j"));
    py::class_<OrientationSet>(m, "OrientationSet")
        .def("__len__", [](const OrientationSet& s) { return s.angles.size(); });
    m.def("make_orientation_set", &make_orientation_set, py::arg("source"), py::arg("origin_i"),
          py::arg("origin_j"), py::arg("angles"));
    m.def("inaccessibility_measure", &inaccessibility_measure, py::arg("design"),
          py::arg("fixtures"), py::arg("tool"), py::arg("orientations"),
          "per-cell minimum normalized tool collision volume, in [0, 1]");
    m.def("accessible_maximal_set", &accessible_maximal_set, py::arg("head"), py::arg("fixtures"),
          py::arg("grid"), py::arg("head_orients"), py::arg("mu0_cells") = 0.5);

    py::class_<PointwiseConstraint>(m, "PointwiseConstraint");
    m.def("containment_constraint", &containment_constraint, py::arg("name"), py::arg("motions"),
          py::arg("envelope"));
    m.def("accessibility_constraint", &accessibility_constraint, py::arg("name"), py::arg("head"),
          py::arg("fixtures"), py::arg("head_orients"), py::arg("mu0_cells") = 0.5);
    m.def(
        "custom_constraint",
        [](std::string name, std::function<bool(double, double)> pred) {
            return custom_constraint(std::move(name), std::move(pred));
        },
        py::arg("name"), py::arg("predicate"),
        "keep cells whose center (x, y) satisfies the predicate");

    py::class_<PruneResult>(m, "PruneResult")
        .def_readonly("pruned", &PruneResult::pruned)
        .def_readonly("empty_warning", &PruneResult::empty_warning)
        .def_readonly("per_constraint", &PruneResult::per_constraint);
    m.def("prune_pointwise", &prune_pointwise, py::arg("constraints"), py::arg("grid"),
          "intersect the maximal sets of all constraints, then regularize once");

    py::class_<ParetoPoint>(m, "ParetoPoint")
        .def_readonly("step", &ParetoPoint::step)
        .def_readonly("volume_fraction", &ParetoPoint::volume_fraction)
        .def_readonly("compliance", &ParetoPoint::compliance)
        .def_readonly("max_disp", &ParetoPoint::max_disp)
        .def_readonly("support_frac", &ParetoPoint::support_frac)
        .def_readonly("inner_iters", &ParetoPoint::inner_iters)
        .def_readonly("status", &ParetoPoint::status)
        .def_readonly("design", &ParetoPoint::design);

    py::class_<Scenario>(m, "Scenario")
        .def_readonly("grid", &Scenario::grid)
        .def_readonly("config_name", &Scenario::config_name)
        .def_readwrite("out_dir", &Scenario::out_dir)
        .def_readwrite("snapshot_every", &Scenario::snapshot_every);

    py::class_<RunResult>(m, "RunResult")
        .def_readonly("exit_code", &RunResult::exit_code)
        .def_readonly("message", &RunResult::message)
        .def_readonly("prune_ran", &RunResult::prune_ran)
        .def_readonly("initial", &RunResult::initial)
        .def_readonly("front", &RunResult::front);

    m.def("generator_names", &generator_names);
    m.def("generate_scenario", &generate_scenario, py::arg("name"), py::arg("dir"),
          "write a built-in scenario's configs and bitmaps; returns the file names");
    m.def("load_scenario", &load_scenario, py::arg("path"));
    m.def("validate_scenario",
          [](const Scenario& s) { return validate_scenario(s).errors; }, py::arg("scenario"),
          "schema and cross-reference errors, empty when the scenario is runnable");
    m.def("run_scenario", &run_scenario, py::arg("scenario"),
          py::call_guard<py::gil_scoped_release>(),
          "prune, trace the Pareto front, and write artifacts to scenario.out_dir");
}

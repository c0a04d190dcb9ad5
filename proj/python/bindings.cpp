#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "minsurf/evolution.hpp"
#include "minsurf/isosurface.hpp"
#include "minsurf/levelset.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/scenario.hpp"
#include "minsurf/types.hpp"

namespace py = pybind11;
using namespace minsurf;

namespace {

py::array_t<double> vertex_array(const SurfaceMesh& surface) {
  py::array_t<double> out({static_cast<py::ssize_t>(surface.vertices.size()),
                           py::ssize_t(3)});
  auto view = out.mutable_unchecked<2>();
  for (py::ssize_t v = 0; v < view.shape(0); ++v) {
    for (py::ssize_t c = 0; c < 3; ++c) {
      view(v, c) = surface.vertices[v].position[c];
    }
  }
  return out;
}

py::array_t<Index> triangle_array(const SurfaceMesh& surface) {
  py::array_t<Index> out({static_cast<py::ssize_t>(surface.triangles.size()),
                          py::ssize_t(3)});
  auto view = out.mutable_unchecked<2>();
  for (py::ssize_t t = 0; t < view.shape(0); ++t) {
    for (py::ssize_t c = 0; c < 3; ++c) {
      view(t, c) = surface.triangles[t].vertices[c];
    }
  }
  return out;
}

py::dict surface_dict(const SurfaceMesh& surface) {
  py::dict out;
  out["vertices"] = vertex_array(surface);
  out["triangles"] = triangle_array(surface);
  out["area"] = total_area(surface);
  return out;
}

const char* status_name(RunStatus status) {
  switch (status) {
    case RunStatus::kConverged:
      return "converged";
    case RunStatus::kVanished:
      return "vanished";
    case RunStatus::kMaxSteps:
      return "max_steps";
  }
  return "unknown";
}

/// Mesh plus the level-set values bound to it; keeps the mesh alive for the
/// lifetime of every surface view handed back to Python.
struct PyLevelSet {
  std::shared_ptr<BackgroundMesh> mesh;
  std::vector<double> values;

  LevelSet view() const {
    return LevelSet{mesh.get(), values};
  }
};

PyLevelSet make_level_set(std::shared_ptr<BackgroundMesh> mesh,
                          const Primitive& shape) {
  PyLevelSet ls;
  ls.values = init_from_primitive(*mesh, shape).values;
  ls.mesh = std::move(mesh);
  return ls;
}

py::dict extract(const PyLevelSet& ls, int ring_count) {
  LevelSet work = ls.view();
  apply_zero_perturbation(work);
  const Band band = select_band(work, ring_count);
  return surface_dict(extract_surface(work, band));
}

void apply_overrides(EvolutionConfig& cfg, std::optional<double> epsilon,
                     std::optional<int> max_steps, std::optional<double> k_max,
                     std::optional<double> c_j) {
  if (epsilon) cfg.epsilon = *epsilon;
  if (max_steps) cfg.max_steps = *max_steps;
  if (k_max) cfg.k_max = *k_max;
  if (c_j) cfg.c_j = *c_j;
}

py::dict run_scenario(const std::string& name,
                      std::optional<std::array<int, 3>> divisions,
                      std::optional<double> epsilon,
                      std::optional<int> max_steps,
                      std::optional<double> k_max, std::optional<double> c_j) {
  const Scenario& scenario = find_scenario(name);
  ScenarioSetup setup =
      prepare_scenario(scenario, divisions.value_or(scenario.domain.divisions));
  apply_overrides(setup.config, epsilon, max_steps, k_max, c_j);

  const EvolutionResult result =
      run(*setup.mesh, std::move(setup.level_set), setup.config);

  const py::ssize_t steps = static_cast<py::ssize_t>(result.reports.size());
  py::array_t<double> time(steps), dt(steps), nodal(steps), l2(steps),
      area(steps);
  py::array_t<int> cg(steps), triangles(steps);
  for (py::ssize_t i = 0; i < steps; ++i) {
    const StepReport& r = result.reports[i];
    time.mutable_at(i) = r.time;
    dt.mutable_at(i) = r.dt;
    nodal.mutable_at(i) = r.nodal_curvature_norm;
    l2.mutable_at(i) = r.l2_curvature_norm;
    area.mutable_at(i) = r.area;
    cg.mutable_at(i) = r.cg_iterations;
    triangles.mutable_at(i) = r.triangle_count;
  }

  py::dict history;
  history["time"] = time;
  history["dt"] = dt;
  history["nodal_curvature_norm"] = nodal;
  history["l2_curvature_norm"] = l2;
  history["area"] = area;
  history["cg_iterations"] = cg;
  history["triangles"] = triangles;

  py::dict out;
  out["status"] = status_name(result.status);
  out["steps"] = result.reports.size();
  out["history"] = history;
  out["surface"] = surface_dict(result.surface);
  out["h"] = setup.mesh->h;
  return out;
}

py::dict curvature_study(const std::vector<int>& divisions) {
  const std::vector<CurvatureStudyRow> rows = sphere_curvature_study(divisions);
  const py::ssize_t count = static_cast<py::ssize_t>(rows.size());
  py::array_t<double> h(count), error(count);
  for (py::ssize_t i = 0; i < count; ++i) {
    h.mutable_at(i) = rows[i].h;
    error.mutable_at(i) = rows[i].l2_error;
  }
  py::dict out;
  out["h"] = h;
  out["l2_error"] = error;
  out["order"] = fitted_order(rows);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Level-set mean curvature flow on a tetrahedral background mesh";

  // Base first, derived second: translators run newest-first, so UsageError
  // is matched before falling back to the Error base.
  py::register_exception<Error>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);

  py::class_<BackgroundMesh, std::shared_ptr<BackgroundMesh>>(m, "Mesh")
      .def_property_readonly("node_count", &BackgroundMesh::node_count)
      .def_property_readonly("element_count", &BackgroundMesh::element_count)
      .def_readonly("h", &BackgroundMesh::h)
      .def("total_volume", &BackgroundMesh::total_volume)
      .def("__repr__", [](const BackgroundMesh& mesh) {
        return "Mesh(nodes=" + std::to_string(mesh.node_count()) +
               ", elements=" + std::to_string(mesh.element_count()) + ")";
      });

  m.def(
      "build_box_mesh",
      [](const std::array<double, 3>& lo, const std::array<double, 3>& hi,
         const std::array<int, 3>& divisions) {
        BoxDomain domain;
        domain.lo = Vec3(lo[0], lo[1], lo[2]);
        domain.hi = Vec3(hi[0], hi[1], hi[2]);
        domain.divisions = divisions;
        return std::make_shared<BackgroundMesh>(build_box_mesh(domain));
      },
      py::arg("lo"), py::arg("hi"), py::arg("divisions"),
      "Structured tetrahedral mesh of an axis-aligned box");

  py::class_<Primitive>(m, "Primitive")
      .def_static(
          "sphere",
          [](const std::array<double, 3>& center, double radius) {
            return Primitive::sphere(Vec3(center[0], center[1], center[2]),
                                     radius);
          },
          py::arg("center"), py::arg("radius"))
      .def_static(
          "cylinder",
          [](const std::array<double, 3>& point,
             const std::array<double, 3>& axis, double radius) {
            return Primitive::cylinder(Vec3(point[0], point[1], point[2]),
                                       Vec3(axis[0], axis[1], axis[2]),
                                       radius);
          },
          py::arg("axis_point"), py::arg("axis_dir"), py::arg("radius"))
      .def_static(
          "plane",
          [](const std::array<double, 3>& point,
             const std::array<double, 3>& normal) {
            return Primitive::plane(Vec3(point[0], point[1], point[2]),
                                    Vec3(normal[0], normal[1], normal[2]));
          },
          py::arg("point"), py::arg("normal"))
      .def_static("merge", &Primitive::merge, py::arg("parts"))
      .def(
          "signed_distance",
          [](const Primitive& shape, const std::array<double, 3>& x) {
            return shape.signed_distance(Vec3(x[0], x[1], x[2]));
          },
          py::arg("x"));

  py::class_<PyLevelSet>(m, "LevelSet")
      .def_property_readonly("mesh",
                             [](const PyLevelSet& ls) { return ls.mesh; })
      .def_property_readonly("values", [](const PyLevelSet& ls) {
        return py::array_t<double>(static_cast<py::ssize_t>(ls.values.size()),
                                   ls.values.data());
      });

  m.def("level_set", &make_level_set, py::arg("mesh"), py::arg("shape"),
        "Sample a primitive's signed distance on the mesh nodes");
  m.def("extract_surface", &extract, py::arg("level_set"),
        py::arg("ring_count") = 2,
        "Triangulated zero isosurface: dict with vertices, triangles, area");

  m.def("scenario_names", [] {
    std::vector<std::string> names;
    for (const Scenario& s : scenario_registry()) names.push_back(s.name);
    return names;
  });
  m.def("scenario_description", [](const std::string& name) {
    return find_scenario(name).description;
  });
  m.def("run_scenario", &run_scenario, py::arg("name"),
        py::arg("divisions") = std::nullopt, py::arg("epsilon") = std::nullopt,
        py::arg("max_steps") = std::nullopt, py::arg("k_max") = std::nullopt,
        py::arg("c_j") = std::nullopt,
        "Evolve a named scenario; returns status, history, final surface");
  m.def("curvature_study", &curvature_study, py::arg("divisions"),
        "Sphere curvature accuracy under refinement: h, errors, fitted order");
}

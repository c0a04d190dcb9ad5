#include "minsurf/scenario.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace minsurf {

namespace {

// Tube-like shapes fix the rings where they meet the z boundary planes.
std::vector<ClampPlane> z_plane_clamps(const BoxDomain& box) {
  return {{2, box.lo.z()}, {2, box.hi.z()}};
}

std::vector<Scenario> make_registry() {
  std::vector<Scenario> all;

  {
    BoxDomain box{{0, 0, 0}, {1, 1, 1}, {16, 16, 16}};
    all.push_back({"plane",
                   "flat plane z = 1/2, stationary from the start",
                   box,
                   Primitive::plane({0.5, 0.5, 0.5}, {0, 0, 1}),
                   {},
                   true,
                   false,
                   std::nullopt});
  }
  {
    BoxDomain box{{-0.6, -0.6, -0.6}, {0.6, 0.6, 0.6}, {16, 16, 16}};
    all.push_back({"sphere",
                   "sphere of radius 0.4, shrinks to a point",
                   box,
                   Primitive::sphere({0, 0, 0}, 0.4),
                   {},
                   true,
                   false,
                   std::nullopt});
  }
  {
    BoxDomain box{{-0.6, -0.6, -0.277259}, {0.6, 0.6, 0.277259}, {32, 32, 16}};
    all.push_back({"catenoid",
                   "cylinder of radius 0.5 clamped at both ends, necks into "
                   "a catenoid",
                   box,
                   Primitive::cylinder({0, 0, 0}, {0, 0, 1}, 0.5),
                   z_plane_clamps(box),
                   true,
                   false,
                   Vec3{0, 0, 0}});
  }
  {
    BoxDomain box{{-0.6, -0.6, -0.277259}, {0.6, 0.6, 0.277259}, {32, 32, 16}};
    all.push_back({"cut-catenoid",
                   "catenoid setup with the cylinder axis shifted to "
                   "(0, 0.06), stressing near-vertex cuts",
                   box,
                   Primitive::cylinder({0, 0.06, 0}, {0, 0, 1}, 0.5),
                   z_plane_clamps(box),
                   true,
                   false,
                   Vec3{0, 0.06, 0}});
  }
  {
    BoxDomain box{{-1, -1, -0.5}, {1, 1, 0.5}, {32, 32, 16}};
    all.push_back({"collapsing-cylinder",
                   "clamped cylinder too long to form a catenoid; the tube "
                   "pinches and the caps settle on the clamp planes",
                   box,
                   Primitive::cylinder({0, 0, 0}, {0, 0, 1}, 0.5),
                   z_plane_clamps(box),
                   true,
                   false,
                   Vec3{0, 0, 0}});
  }
  {
    BoxDomain box{{0, 0, 0}, {1, 1, 1}, {32, 32, 32}};
    all.push_back({"schwarz",
                   "sphere of radius 0.5 touching the unit box faces, "
                   "relaxes toward a triply periodic surface (experimental)",
                   box,
                   Primitive::sphere({0.5, 0.5, 0.5}, 0.5),
                   {},
                   false,
                   true,
                   std::nullopt});
  }
  return all;
}

}  // namespace

const std::vector<Scenario>& scenario_registry() {
  static const std::vector<Scenario> registry = make_registry();
  return registry;
}

const Scenario& find_scenario(std::string_view name) {
  for (const Scenario& s : scenario_registry()) {
    if (s.name == name) return s;
  }
  std::string known;
  for (const Scenario& s : scenario_registry()) {
    known += known.empty() ? "" : ", ";
    known += s.name;
  }
  throw UsageError("unknown scenario '" + std::string(name) + "' (known: " +
                   known + ")");
}

ScenarioSetup prepare_scenario(const Scenario& scenario,
                               const std::array<int, 3>& divisions) {
  BoxDomain box = scenario.domain;
  box.divisions = divisions;

  ScenarioSetup setup{std::make_shared<BackgroundMesh>(build_box_mesh(box)),
                      {},
                      {}};
  setup.level_set = init_from_primitive(*setup.mesh, scenario.shape);

  setup.config.clamps = scenario.explicit_clamps;
  if (scenario.clamp_domain_boundary) {
    for (int axis = 0; axis < 3; ++axis) {
      setup.config.clamps.push_back({axis, box.lo[axis]});
      setup.config.clamps.push_back({axis, box.hi[axis]});
    }
  }
  if (scenario.neck_axis_point) {
    const double mid = 0.5 * (box.lo.z() + box.hi.z());
    const double slab = 2.0 * setup.mesh->h;
    setup.config.neck = NeckProbe{*scenario.neck_axis_point,
                                  {0, 0, 1},
                                  mid - slab - scenario.neck_axis_point->z(),
                                  mid + slab - scenario.neck_axis_point->z()};
  }
  return setup;
}

std::vector<CurvatureStudyRow> sphere_curvature_study(
    std::span<const int> divisions) {
  constexpr double kRadius = 0.3;
  std::vector<CurvatureStudyRow> rows;
  for (int n : divisions) {
    if (n < 4) throw UsageError("curvature study: divisions must be >= 4");
    const BoxDomain box{{-0.6, -0.6, -0.6}, {0.6, 0.6, 0.6}, {n, n, n}};
    const BackgroundMesh mesh = build_box_mesh(box);
    LevelSet ls = init_from_primitive(mesh, Primitive::sphere({0, 0, 0}, kRadius));
    apply_zero_perturbation(ls);

    EvolutionConfig cfg;
    const Band band = select_band(ls, cfg.ring_count);
    const SurfaceMesh surface = extract_surface(ls, band);
    const NormalField normals = build_normal_field(ls, band, surface);
    const DofMap dofs = build_dof_map(mesh, band, cfg.clamps);

    const SparseOperator mass = assemble_mass(mesh, surface, band, dofs);
    SparseOperator system = mass;
    system.add_scaled(
        assemble_stabilization(mesh, band, dofs, cfg.c_j, cfg.h_power));
    const VelocityField velocity =
        solve_velocity(std::move(system), assemble_stiffness(mesh, surface, dofs),
                       mesh, dofs, cfg.cg_rel_tol, cfg.cg_max_iter_factor);

    std::vector<double> error = mean_curvature(velocity, normals, dofs);
    for (double& e : error) e -= 1.0 / kRadius;
    rows.push_back({n, mesh.h, std::sqrt(std::max(mass.quadratic_form(error), 0.0))});
  }
  return rows;
}

double fitted_order(std::span<const CurvatureStudyRow> rows) {
  if (rows.size() < 2) throw Error("fitted order: needs at least two rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const CurvatureStudyRow& r : rows) {
    const double x = std::log(r.h);
    const double y = std::log(r.l2_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(rows.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace minsurf

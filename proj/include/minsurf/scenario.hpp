#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "minsurf/evolution.hpp"
#include "minsurf/levelset.hpp"
#include "minsurf/mesh.hpp"

namespace minsurf {

/// Named initial configuration: domain, starting shape, boundary handling.
struct Scenario {
  std::string name;
  std::string description;
  BoxDomain domain;  // divisions hold the scenario default
  Primitive shape;
  /// Planes whose nodes are held fixed throughout the run.
  std::vector<ClampPlane> explicit_clamps;
  /// Trace unknowns vanish where the surface meets the domain boundary;
  /// scenarios that rely on natural boundary behavior switch this off.
  bool clamp_domain_boundary = true;
  bool experimental = false;
  /// Axis of the neck probe for tube-like shapes (direction +z).
  std::optional<Vec3> neck_axis_point;
};

const std::vector<Scenario>& scenario_registry();

/// Throws UsageError for unknown names, listing the valid ones.
const Scenario& find_scenario(std::string_view name);

/// Mesh, initial level set, and evolution defaults for a scenario.
/// The mesh is shared so long-lived views (bindings) can hold onto it.
struct ScenarioSetup {
  std::shared_ptr<BackgroundMesh> mesh;
  LevelSet level_set;
  EvolutionConfig config;
};

ScenarioSetup prepare_scenario(const Scenario& scenario,
                               const std::array<int, 3>& divisions);

/// Static single-solve study: discrete mean curvature of a sphere of radius
/// 0.3 in the box [-0.6, 0.6]^3, compared against the exact value 1/R in
/// the surface L2 norm.
struct CurvatureStudyRow {
  int divisions = 0;
  double h = 0;
  double l2_error = 0;
};

std::vector<CurvatureStudyRow> sphere_curvature_study(
    std::span<const int> divisions);

/// Least-squares slope of log(error) against log(h).
double fitted_order(std::span<const CurvatureStudyRow> rows);

}  // namespace minsurf

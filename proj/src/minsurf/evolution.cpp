#include "minsurf/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

namespace minsurf {

VelocityField solve_velocity(SparseOperator mass_plus_stabilization,
                             const SparseOperator& stiffness,
                             const BackgroundMesh& mesh, const DofMap& dofs,
                             double cg_rel_tol, int cg_max_iter_factor) {
  const Index n = dofs.size();
  if (mass_plus_stabilization.size() != n || stiffness.size() != n) {
    throw StructuralError("velocity solve: operator size mismatch");
  }

  // Right-hand sides use the untouched stiffness before any row is
  // eliminated, so interior equations keep their full coupling.
  std::array<std::vector<double>, 3> rhs;
  for (int c = 0; c < 3; ++c) {
    std::vector<double> coord(n);
    for (Index d = 0; d < n; ++d) {
      coord[d] = mesh.nodes[dofs.node_of_dof[d]][c];
    }
    rhs[c] = stiffness.multiply(coord);
    for (double& v : rhs[c]) v = -v;
  }

  // Clamped dofs and dofs never touched by a cut element (empty rows) get
  // identity equations with zero right-hand side.
  std::vector<std::uint8_t> eliminate(dofs.dof_is_clamped.begin(),
                                      dofs.dof_is_clamped.end());
  const std::vector<double> diag = mass_plus_stabilization.diagonal();
  for (Index d = 0; d < n; ++d) {
    if (diag[d] == 0.0) eliminate[d] = 1;
  }
  mass_plus_stabilization.constrain(eliminate);
  for (int c = 0; c < 3; ++c) {
    for (Index d = 0; d < n; ++d) {
      if (eliminate[d]) rhs[c][d] = 0.0;
    }
  }

  VelocityField field;
  field.node_values.assign(mesh.node_count(), Vec3::Zero());
  const int max_iterations = cg_max_iter_factor * std::max<Index>(n, 1);
  for (int c = 0; c < 3; ++c) {
    PcgOutcome outcome =
        pcg_jacobi(mass_plus_stabilization, rhs[c], cg_rel_tol, max_iterations);
    if (!outcome.converged) {
      throw SolveError("velocity solve: CG stalled on coordinate " +
                           std::to_string(c) + " after " +
                           std::to_string(outcome.iterations) + " iterations",
                       std::move(outcome.residual_history));
    }
    field.cg_iterations += outcome.iterations;
    for (Index d = 0; d < n; ++d) {
      field.node_values[dofs.node_of_dof[d]][c] = outcome.solution[d];
    }
  }
  return field;
}

std::vector<double> mean_curvature(const VelocityField& velocity,
                                   const NormalField& normals,
                                   const DofMap& dofs) {
  std::vector<double> curvature(dofs.size());
  for (Index d = 0; d < dofs.size(); ++d) {
    const Index n = dofs.node_of_dof[d];
    curvature[d] =
        -0.5 * normals.node_normals[n].dot(velocity.node_values[n]);
  }
  return curvature;
}

std::pair<double, double> curvature_norms(std::span<const double> curvature,
                                          const SparseOperator& mass) {
  double sum_squares = 0;
  for (double h : curvature) sum_squares += h * h;
  const double weighted = mass.quadratic_form(curvature);
  return {std::sqrt(sum_squares), std::sqrt(std::max(weighted, 0.0))};
}

double choose_timestep(const VelocityField& velocity, const DofMap& dofs,
                       double h, const EvolutionConfig& cfg) {
  double max_speed = 0;
  for (Index n : dofs.node_of_dof) {
    max_speed = std::max(max_speed, velocity.node_values[n].norm());
  }
  if (max_speed > 0) {
    return std::min(cfg.k_max, cfg.alpha * h / max_speed);
  }
  return cfg.k_max;
}

namespace {

double default_epsilon(const EvolutionConfig& cfg, Index dof_count,
                       double area) {
  if (cfg.epsilon) return *cfg.epsilon;
  if (cfg.norm_mode == NormMode::kNodal) {
    return 0.05 * std::sqrt(static_cast<double>(dof_count));
  }
  return 0.05 * std::sqrt(std::max(area, 0.0));
}

// A surface whose bounding box fits inside one cell is below mesh
// resolution: nothing representable remains, and the transport step cannot
// be trusted to flip the last interior nodes (a symmetric collapse stalls
// with the timestep shrinking to zero). Treated as extinction.
bool below_resolution(const SurfaceMesh& surface, double h) {
  if (surface.vertices.empty()) return true;
  Vec3 lo = surface.vertices.front().position;
  Vec3 hi = lo;
  for (const SurfaceVertex& v : surface.vertices) {
    lo = lo.cwiseMin(v.position);
    hi = hi.cwiseMax(v.position);
  }
  return (hi - lo).maxCoeff() < h;
}

[[noreturn]] void rethrow_with_step(int step) {
  try {
    throw;
  } catch (const SolveError& e) {
    throw SolveError("step " + std::to_string(step) + ": " + e.what(),
                     e.residual_history);
  } catch (const StructuralError& e) {
    throw StructuralError("step " + std::to_string(step) + ": " + e.what());
  } catch (const Error& e) {
    throw Error("step " + std::to_string(step) + ": " + e.what());
  }
}

}  // namespace

EvolutionResult run(const BackgroundMesh& mesh, LevelSet initial,
                    const EvolutionConfig& cfg, const StepCallback& callback) {
  if (initial.mesh != &mesh) {
    throw StructuralError("run: level set bound to a different mesh");
  }
  if (!(cfg.alpha > 0) || !(cfg.k_max > 0)) {
    throw Error("run: alpha and k_max must be positive");
  }
  if (cfg.max_steps < 1) throw Error("run: max_steps must be at least 1");

  // Nodes on clamp planes never move; reinitialization must not touch their
  // values either, or clamped rings would drift between steps.
  std::vector<std::uint8_t> frozen(mesh.node_count(), 0);
  bool any_frozen = false;
  for (Index n = 0; n < mesh.node_count(); ++n) {
    if (node_on_clamp_plane(mesh.nodes[n], cfg.clamps)) {
      frozen[n] = 1;
      any_frozen = true;
    }
  }
  const std::span<const std::uint8_t> frozen_span =
      any_frozen ? std::span<const std::uint8_t>(frozen)
                 : std::span<const std::uint8_t>();

  // A transport step moves the surface at most alpha * h, so the band must
  // be wide enough to still contain it afterwards.
  const int ring_count =
      std::max(cfg.ring_count, static_cast<int>(std::ceil(cfg.alpha)));

  EvolutionResult result;
  result.status = RunStatus::kMaxSteps;
  double time = 0;

  for (int step = 1; step <= cfg.max_steps; ++step) {
    try {
      apply_zero_perturbation(initial);
      Band band;
      try {
        band = select_band(initial, ring_count);
      } catch (const EmptyCutError&) {
        result.status = RunStatus::kVanished;
        break;
      }
      SurfaceMesh surface = extract_surface(initial, band);
      if (surface.triangles.empty() || below_resolution(surface, mesh.h)) {
        result.status = RunStatus::kVanished;
        break;
      }
      const NormalField normals = build_normal_field(initial, band, surface);
      const DofMap dofs = build_dof_map(mesh, band, cfg.clamps);

      const SparseOperator mass = assemble_mass(mesh, surface, band, dofs);
      const SparseOperator stiffness = assemble_stiffness(mesh, surface, dofs);
      SparseOperator system = mass;
      system.add_scaled(
          assemble_stabilization(mesh, band, dofs, cfg.c_j, cfg.h_power));

      const VelocityField velocity =
          solve_velocity(std::move(system), stiffness, mesh, dofs,
                         cfg.cg_rel_tol, cfg.cg_max_iter_factor);
      const std::vector<double> curvature =
          mean_curvature(velocity, normals, dofs);
      const auto [nodal_norm, l2_norm] = curvature_norms(curvature, mass);

      StepReport report;
      report.step = step;
      report.time = time;
      report.nodal_curvature_norm = nodal_norm;
      report.l2_curvature_norm = l2_norm;
      report.area = total_area(surface);
      report.triangle_count = static_cast<Index>(surface.triangles.size());
      report.cg_iterations = velocity.cg_iterations;
      for (Index n : dofs.node_of_dof) {
        report.max_speed =
            std::max(report.max_speed, velocity.node_values[n].norm());
      }
      report.dt = choose_timestep(velocity, dofs, mesh.h, cfg);
      if (cfg.neck) {
        try {
          report.neck_radius =
              min_radial_distance(surface, cfg.neck->axis_point,
                                  cfg.neck->axis_dir, cfg.neck->s_lo,
                                  cfg.neck->s_hi);
        } catch (const Error&) {
          report.neck_radius = std::nullopt;
        }
      }
      result.reports.push_back(report);
      if (callback) {
        callback(StepState{report, surface, dofs, curvature, velocity});
      }

      const double eps = default_epsilon(cfg, dofs.size(), report.area);
      const double norm =
          cfg.norm_mode == NormMode::kNodal ? nodal_norm : l2_norm;
      if (norm <= eps) {
        result.status = RunStatus::kConverged;
        result.surface = std::move(surface);
        break;
      }

      advance(initial, band, normals, velocity.node_values, report.dt);
      time += report.dt;

      apply_zero_perturbation(initial);
      Band moved_band;
      try {
        moved_band = select_band(initial, ring_count);
      } catch (const EmptyCutError&) {
        result.status = RunStatus::kVanished;
        break;
      }
      const SurfaceMesh moved_surface = extract_surface(initial, moved_band);
      if (moved_surface.triangles.empty() ||
          below_resolution(moved_surface, mesh.h)) {
        result.status = RunStatus::kVanished;
        break;
      }
      reinitialize(initial, moved_band, moved_surface, cfg.reinit_mode,
                   frozen_span);
    } catch (const EmptyCutError&) {
      throw;  // unreachable: handled at the selection sites
    } catch (const Error&) {
      rethrow_with_step(step);
    }
  }

  // For runs stopped by the step limit the level set has moved past the
  // last report, so the surface is re-extracted to match the final state.
  if (result.status == RunStatus::kMaxSteps) {
    apply_zero_perturbation(initial);
    try {
      const Band band = select_band(initial, ring_count);
      result.surface = extract_surface(initial, band);
      if (below_resolution(result.surface, mesh.h)) {
        result.status = RunStatus::kVanished;
        result.surface = SurfaceMesh{};
      }
    } catch (const EmptyCutError&) {
      result.status = RunStatus::kVanished;
    }
  }
  result.level_set = std::move(initial);
  return result;
}

}  // namespace minsurf

#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "minsurf/assembly.hpp"
#include "minsurf/isosurface.hpp"
#include "minsurf/levelset.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/sparse.hpp"
#include "minsurf/types.hpp"

namespace minsurf {

enum class NormMode { kNodal, kL2 };
enum class RunStatus { kConverged, kMaxSteps, kVanished };

/// Cylindrical probe reporting the surface's minimal distance to an axis,
/// restricted to the axial window [s_lo, s_hi].
struct NeckProbe {
  Vec3 axis_point{0, 0, 0};
  Vec3 axis_dir{0, 0, 1};
  double s_lo = 0;
  double s_hi = 0;
};

struct EvolutionConfig {
  /// Stopping threshold on the curvature norm; unset picks the default rule
  /// (nodal: 0.05 * sqrt(band node count), l2: 0.05 * sqrt(area)).
  std::optional<double> epsilon;
  int max_steps = 500;
  /// CFL factor: dt <= alpha * h / max speed.
  double alpha = 0.5;
  double k_max = 0.05;
  double c_j = 1.0;
  int h_power = 0;
  int ring_count = 2;
  ReinitMode reinit_mode = ReinitMode::kTriangle;
  NormMode norm_mode = NormMode::kNodal;
  double cg_rel_tol = 1e-10;
  /// CG iteration cap is this factor times the dof count.
  int cg_max_iter_factor = 10;
  std::vector<ClampPlane> clamps;
  std::optional<NeckProbe> neck;
};

struct StepReport {
  int step = 0;
  /// Accumulated time before this step's transport is applied.
  double time = 0;
  /// Timestep the transport after this report will use.
  double dt = 0;
  double nodal_curvature_norm = 0;
  double l2_curvature_norm = 0;
  double area = 0;
  Index triangle_count = 0;
  int cg_iterations = 0;
  double max_speed = 0;
  std::optional<double> neck_radius;
};

/// Velocity of the surface as a full nodal field (zero off the band and on
/// clamped nodes). cg_iterations sums the three coordinate solves.
struct VelocityField {
  std::vector<Vec3> node_values;
  int cg_iterations = 0;
};

/// Everything a per-step observer may want to serialize.
struct StepState {
  const StepReport& report;
  const SurfaceMesh& surface;
  const DofMap& dofs;
  std::span<const double> curvature;  // per dof
  const VelocityField& velocity;
};

using StepCallback = std::function<void(const StepState&)>;

struct EvolutionResult {
  RunStatus status = RunStatus::kMaxSteps;
  LevelSet level_set;
  SurfaceMesh surface;
  std::vector<StepReport> reports;
};

/// Solves (M + J) u_c = -(S x_c) for the three coordinates with Jacobi CG.
/// Clamped dofs and dofs with empty rows get identity equations and zero
/// velocity. Throws SolveError when CG fails to converge.
VelocityField solve_velocity(SparseOperator mass_plus_stabilization,
                             const SparseOperator& stiffness,
                             const BackgroundMesh& mesh, const DofMap& dofs,
                             double cg_rel_tol, int cg_max_iter_factor);

/// Discrete mean curvature per dof: H = -(n . u) / 2.
std::vector<double> mean_curvature(const VelocityField& velocity,
                                   const NormalField& normals,
                                   const DofMap& dofs);

/// (nodal, l2) curvature norms; `mass` is the unstabilized mass matrix.
std::pair<double, double> curvature_norms(std::span<const double> curvature,
                                          const SparseOperator& mass);

double choose_timestep(const VelocityField& velocity, const DofMap& dofs,
                       double h, const EvolutionConfig& cfg);

/// Runs the full evolution until the curvature norm drops below epsilon,
/// the surface vanishes, or max_steps is exhausted.
EvolutionResult run(const BackgroundMesh& mesh, LevelSet initial,
                    const EvolutionConfig& cfg,
                    const StepCallback& callback = {});

}  // namespace minsurf

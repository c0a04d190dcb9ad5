#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "minsurf/isosurface.hpp"
#include "minsurf/levelset.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/sparse.hpp"
#include "minsurf/types.hpp"

namespace minsurf {

/// Axis-aligned plane on which unknowns are held fixed. Nodes with
/// |x[axis] - value| <= tol are clamped.
struct ClampPlane {
  int axis = 2;
  double value = 0;
  double tol = 1e-9;
};

/// Contiguous numbering of the band nodes. Clamped dofs stay in the system
/// and get identity rows; their solution values are exactly zero.
struct DofMap {
  std::vector<Index> node_of_dof;          // sorted band nodes
  std::vector<Index> dof_of_node;          // node count long, -1 off the band
  std::vector<std::uint8_t> dof_is_clamped;

  Index size() const { return static_cast<Index>(node_of_dof.size()); }
};

bool node_on_clamp_plane(const Vec3& position, std::span<const ClampPlane> clamps);

DofMap build_dof_map(const BackgroundMesh& mesh, const Band& band,
                     std::span<const ClampPlane> clamps);

/// Surface mass matrix with edge-midpoint quadrature (exact for the
/// quadratic integrands of linear trace functions).
SparseOperator assemble_mass(const BackgroundMesh& mesh,
                             const SurfaceMesh& surface, const Band& band,
                             const DofMap& dofs);

/// Laplace-Beltrami stiffness: tangential gradients through the projector
/// I - n n^T of each surface triangle.
SparseOperator assemble_stiffness(const BackgroundMesh& mesh,
                                  const SurfaceMesh& surface,
                                  const DofMap& dofs);

/// Normal-jump face penalty over internal faces shared by two cut elements:
/// c_j * h^h_power * area(F) * [n_F . grad u][n_F . grad v].
SparseOperator assemble_stabilization(const BackgroundMesh& mesh,
                                      const Band& band, const DofMap& dofs,
                                      double c_j, int h_power);

}  // namespace minsurf

#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "minsurf/evolution.hpp"
#include "minsurf/isosurface.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/sparse.hpp"

namespace minsurf {

/// Legacy ASCII polydata with per-point curvature ("H") and "velocity"
/// arrays; values are printed with six significant digits. Files are
/// written to a temporary sibling and renamed into place.
void write_surface_vtk(const SurfaceMesh& surface,
                       std::span<const double> vertex_curvature,
                       std::span<const Vec3> vertex_velocity,
                       const std::filesystem::path& path);

/// Legacy ASCII unstructured grid of the background tetrahedra, with the
/// nodal level-set values attached when provided.
void write_mesh_vtk(const BackgroundMesh& mesh,
                    std::span<const double> node_values,
                    const std::filesystem::path& path);

void write_history_csv(std::span<const StepReport> reports,
                       const std::filesystem::path& path);

/// Plain-text dump: "size entries" header then one "row col value" line per
/// stored entry.
void write_operator(const SparseOperator& op,
                    const std::filesystem::path& path);

/// Per-vertex interpolation of nodal data along each vertex's parent edge.
std::vector<double> interpolate_vertex_scalar(const SurfaceMesh& surface,
                                              const DofMap& dofs,
                                              std::span<const double> per_dof);
std::vector<Vec3> interpolate_vertex_vector(const SurfaceMesh& surface,
                                            std::span<const Vec3> per_node);

}  // namespace minsurf

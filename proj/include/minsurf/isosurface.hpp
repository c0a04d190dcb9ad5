#pragma once

#include <array>
#include <vector>

#include "minsurf/levelset.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/types.hpp"

namespace minsurf {

/// Vertex on a cut background edge. `edge_a < edge_b` are background node
/// ids; theta in (0,1) is the fraction from a toward b, so
/// position = (1-theta)*x_a + theta*x_b. Shared edges dedup exactly.
struct SurfaceVertex {
  Vec3 position;
  Index edge_a;
  Index edge_b;
  double theta;
};

/// Triangle of the discrete isosurface; oriented so `normal` points toward
/// increasing level-set values. `element` is the parent cut tetrahedron.
struct SurfaceTriangle {
  std::array<Index, 3> vertices;
  Index element;
  double area;
  Vec3 normal;
};

struct SurfaceMesh {
  std::vector<SurfaceVertex> vertices;
  std::vector<SurfaceTriangle> triangles;
  /// Sliver triangles (area < 1e-14 * h^2) discarded during extraction.
  Index dropped_triangles = 0;
};

/// Marching-tetrahedra extraction over the cut elements of `band`.
/// One-against-three sign splits give a triangle; two-against-two give a
/// planar quad split along its shorter diagonal (ties broken by the
/// lower-indexed vertex pair).
SurfaceMesh extract_surface(const LevelSet& ls, const Band& band);

double total_area(const SurfaceMesh& surface);

/// Smallest distance from surface vertices to the axis line, restricted to
/// vertices whose axial coordinate lies in [s_lo, s_hi]. Throws Error when
/// no vertex falls inside the slab.
double min_radial_distance(const SurfaceMesh& surface, const Vec3& axis_point,
                           const Vec3& axis_dir, double s_lo, double s_hi);

}  // namespace minsurf

#pragma once

#include <array>
#include <span>
#include <vector>

#include "minsurf/types.hpp"

namespace minsurf {

/// Axis-aligned box with per-axis subdivision counts.
struct BoxDomain {
  Vec3 lo{0, 0, 0};
  Vec3 hi{1, 1, 1};
  std::array<int, 3> divisions{1, 1, 1};

  double volume() const;
};

/// Oriented triangular facet between tetrahedra. `right` is kNoElement for
/// boundary faces. Node triple is sorted ascending; geometry is recovered
/// from coordinates when needed.
struct Face {
  std::array<Index, 3> nodes;
  Index left;
  Index right;
};

inline constexpr Index kNoElement = -1;

/// Structured tetrahedral background mesh: each grid cell is split into six
/// tetrahedra sharing the main cell diagonal, so neighboring cells conform.
struct BackgroundMesh {
  BoxDomain domain;
  std::vector<Vec3> nodes;
  std::vector<std::array<Index, 4>> elements;
  std::vector<Face> faces;
  /// CSR adjacency node -> incident elements.
  std::vector<Index> node_element_ptr;
  std::vector<Index> node_elements;
  /// Longest edge over all elements; the mesh parameter h.
  double h = 0;

  Index node_count() const { return static_cast<Index>(nodes.size()); }
  Index element_count() const { return static_cast<Index>(elements.size()); }

  std::span<const Index> elements_of_node(Index node) const {
    return {node_elements.data() + node_element_ptr[node],
            node_elements.data() + node_element_ptr[node + 1]};
  }

  double total_volume() const;
};

/// Affine geometry of one tetrahedron: constant gradients of the four
/// barycentric shape functions and the (positive) volume.
struct ElementGeometry {
  std::array<Vec3, 4> basis_gradients;
  double volume;

  /// Value of shape function `i` at point `x`.
  double basis_value(const BackgroundMesh& mesh, Index element, int i,
                     const Vec3& x) const;
};

BackgroundMesh build_box_mesh(const BoxDomain& domain);

ElementGeometry element_geometry(const BackgroundMesh& mesh, Index element);

/// Recomputes the face list of `mesh.elements` from scratch. Exposed for
/// verification; build_box_mesh already fills `mesh.faces` with this.
std::vector<Face> build_face_adjacency(Index node_count,
                                       std::span<const std::array<Index, 4>> elements);

}  // namespace minsurf

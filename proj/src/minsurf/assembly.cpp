#include "minsurf/assembly.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace minsurf {

bool node_on_clamp_plane(const Vec3& position,
                         std::span<const ClampPlane> clamps) {
  for (const ClampPlane& c : clamps) {
    if (c.axis < 0 || c.axis > 2) {
      throw StructuralError("clamp plane: axis out of range");
    }
    if (std::abs(position[c.axis] - c.value) <= c.tol) return true;
  }
  return false;
}

DofMap build_dof_map(const BackgroundMesh& mesh, const Band& band,
                     std::span<const ClampPlane> clamps) {
  DofMap dofs;
  dofs.node_of_dof = band.nodes;
  dofs.dof_of_node.assign(mesh.node_count(), kNoElement);
  dofs.dof_is_clamped.resize(dofs.node_of_dof.size());
  for (Index d = 0; d < dofs.size(); ++d) {
    const Index n = dofs.node_of_dof[d];
    dofs.dof_of_node[n] = d;
    dofs.dof_is_clamped[d] = node_on_clamp_plane(mesh.nodes[n], clamps) ? 1 : 0;
  }
  return dofs;
}

namespace {

std::array<Index, 4> element_dofs(const BackgroundMesh& mesh,
                                  const DofMap& dofs, Index element) {
  std::array<Index, 4> d;
  for (int i = 0; i < 4; ++i) {
    d[i] = dofs.dof_of_node[mesh.elements[element][i]];
    if (d[i] < 0) {
      throw StructuralError("element " + std::to_string(element) +
                            " has a node outside the band");
    }
  }
  return d;
}

}  // namespace

SparseOperator assemble_mass(const BackgroundMesh& mesh,
                             const SurfaceMesh& surface, const Band& band,
                             const DofMap& dofs) {
  std::vector<Triplet> triplets;
  triplets.reserve(surface.triangles.size() * 16);
  for (const SurfaceTriangle& tri : surface.triangles) {
    if (!band.element_is_cut[tri.element]) {
      throw StructuralError("mass: triangle parent " +
                            std::to_string(tri.element) + " is not cut");
    }
    const ElementGeometry geom = element_geometry(mesh, tri.element);
    const auto d = element_dofs(mesh, dofs, tri.element);

    const Vec3& a = surface.vertices[tri.vertices[0]].position;
    const Vec3& b = surface.vertices[tri.vertices[1]].position;
    const Vec3& c = surface.vertices[tri.vertices[2]].position;
    const Vec3 quad_points[3] = {0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)};
    const double w = tri.area / 3.0;

    double basis[3][4];
    for (int q = 0; q < 3; ++q) {
      for (int i = 0; i < 4; ++i) {
        basis[q][i] = geom.basis_value(mesh, tri.element, i, quad_points[q]);
      }
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        double m = 0;
        for (int q = 0; q < 3; ++q) m += w * basis[q][i] * basis[q][j];
        triplets.push_back({d[i], d[j], m});
      }
    }
  }
  return SparseOperator::from_triplets(dofs.size(), std::move(triplets));
}

SparseOperator assemble_stiffness(const BackgroundMesh& mesh,
                                  const SurfaceMesh& surface,
                                  const DofMap& dofs) {
  std::vector<Triplet> triplets;
  triplets.reserve(surface.triangles.size() * 16);
  for (const SurfaceTriangle& tri : surface.triangles) {
    const ElementGeometry geom = element_geometry(mesh, tri.element);
    const auto d = element_dofs(mesh, dofs, tri.element);
    const Vec3& n = tri.normal;

    Vec3 tangential[4];
    for (int i = 0; i < 4; ++i) {
      const Vec3& g = geom.basis_gradients[i];
      tangential[i] = g - n.dot(g) * n;
    }
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        triplets.push_back(
            {d[i], d[j], tri.area * tangential[i].dot(tangential[j])});
      }
    }
  }
  return SparseOperator::from_triplets(dofs.size(), std::move(triplets));
}

SparseOperator assemble_stabilization(const BackgroundMesh& mesh,
                                      const Band& band, const DofMap& dofs,
                                      double c_j, int h_power) {
  const double scale_base = c_j * std::pow(mesh.h, h_power);
  std::vector<Triplet> triplets;

  for (const Face& face : mesh.faces) {
    if (face.right == kNoElement) continue;
    if (!band.element_is_cut[face.left] || !band.element_is_cut[face.right]) {
      continue;
    }

    const Vec3& f0 = mesh.nodes[face.nodes[0]];
    const Vec3 cross = (mesh.nodes[face.nodes[1]] - f0)
                           .cross(mesh.nodes[face.nodes[2]] - f0);
    const double area = 0.5 * cross.norm();
    if (!(area > 0)) {
      throw StructuralError("stabilization: degenerate face");
    }
    const Vec3 face_normal = cross / cross.norm();

    // Jump coefficient of each involved node: sum of outward normal
    // derivatives of its shape function from the two elements.
    Index involved[8];
    double jump[8];
    int count = 0;
    for (const Index element : {face.left, face.right}) {
      const ElementGeometry geom = element_geometry(mesh, element);
      const auto& tet = mesh.elements[element];
      // Outward direction: from the face toward the opposite node is inward.
      Index opposite = kNoElement;
      for (Index n : tet) {
        if (n != face.nodes[0] && n != face.nodes[1] && n != face.nodes[2]) {
          opposite = n;
        }
      }
      if (opposite == kNoElement) {
        throw StructuralError("stabilization: face not a facet of element");
      }
      const double side = face_normal.dot(mesh.nodes[opposite] - f0);
      const Vec3 outward = side > 0 ? -face_normal : face_normal;

      for (int i = 0; i < 4; ++i) {
        const double derivative = outward.dot(geom.basis_gradients[i]);
        int slot = 0;
        while (slot < count && involved[slot] != tet[i]) ++slot;
        if (slot == count) {
          involved[count] = tet[i];
          jump[count] = 0;
          ++count;
        }
        jump[slot] += derivative;
      }
    }

    const double factor = scale_base * area;
    for (int i = 0; i < count; ++i) {
      const Index di = dofs.dof_of_node[involved[i]];
      if (di < 0) {
        throw StructuralError("stabilization: node outside the band");
      }
      for (int j = 0; j < count; ++j) {
        const Index dj = dofs.dof_of_node[involved[j]];
        triplets.push_back({di, dj, factor * jump[i] * jump[j]});
      }
    }
  }
  return SparseOperator::from_triplets(dofs.size(), std::move(triplets));
}

}  // namespace minsurf

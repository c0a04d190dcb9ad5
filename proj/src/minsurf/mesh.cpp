#include "minsurf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace minsurf {

namespace {

// The six axis orders of the Kuhn subdivision, lexicographic. Odd
// permutations get two vertices swapped below to keep volumes positive.
constexpr int kAxisOrders[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                   {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
constexpr bool kOrderIsOdd[6] = {false, true, true, false, false, true};

}  // namespace

double BoxDomain::volume() const {
  return (hi.x() - lo.x()) * (hi.y() - lo.y()) * (hi.z() - lo.z());
}

BackgroundMesh build_box_mesh(const BoxDomain& domain) {
  for (int a = 0; a < 3; ++a) {
    if (domain.divisions[a] < 1) {
      throw StructuralError("box mesh: divisions must be positive on axis " +
                            std::to_string(a));
    }
    if (!(domain.hi[a] > domain.lo[a])) {
      throw StructuralError("box mesh: empty extent on axis " +
                            std::to_string(a));
    }
  }

  const int nx = domain.divisions[0];
  const int ny = domain.divisions[1];
  const int nz = domain.divisions[2];

  BackgroundMesh mesh;
  mesh.domain = domain;
  mesh.nodes.reserve(static_cast<std::size_t>(nx + 1) * (ny + 1) * (nz + 1));

  const Vec3 step{(domain.hi.x() - domain.lo.x()) / nx,
                  (domain.hi.y() - domain.lo.y()) / ny,
                  (domain.hi.z() - domain.lo.z()) / nz};
  for (int k = 0; k <= nz; ++k) {
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        mesh.nodes.push_back(domain.lo +
                             Vec3{i * step.x(), j * step.y(), k * step.z()});
      }
    }
  }

  const auto node_id = [&](int i, int j, int k) {
    return static_cast<Index>(i + (nx + 1) * (j + (ny + 1) * k));
  };

  mesh.elements.reserve(static_cast<std::size_t>(nx) * ny * nz * 6);
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        for (int p = 0; p < 6; ++p) {
          int c[3] = {i, j, k};
          std::array<Index, 4> tet;
          tet[0] = node_id(c[0], c[1], c[2]);
          c[kAxisOrders[p][0]] += 1;
          tet[1] = node_id(c[0], c[1], c[2]);
          c[kAxisOrders[p][1]] += 1;
          tet[2] = node_id(c[0], c[1], c[2]);
          tet[3] = node_id(i + 1, j + 1, k + 1);
          if (kOrderIsOdd[p]) std::swap(tet[1], tet[2]);
          mesh.elements.push_back(tet);
        }
      }
    }
  }

  // Longest edge over all elements.
  constexpr int kEdges[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
  double h2 = 0;
  for (const auto& tet : mesh.elements) {
    for (const auto& e : kEdges) {
      h2 = std::max(h2,
                    (mesh.nodes[tet[e[0]]] - mesh.nodes[tet[e[1]]]).squaredNorm());
    }
  }
  mesh.h = std::sqrt(h2);

  // Node -> element adjacency in CSR form.
  mesh.node_element_ptr.assign(mesh.nodes.size() + 1, 0);
  for (const auto& tet : mesh.elements) {
    for (Index n : tet) mesh.node_element_ptr[n + 1] += 1;
  }
  for (std::size_t n = 0; n < mesh.nodes.size(); ++n) {
    mesh.node_element_ptr[n + 1] += mesh.node_element_ptr[n];
  }
  mesh.node_elements.resize(mesh.node_element_ptr.back());
  std::vector<Index> cursor(mesh.node_element_ptr.begin(),
                            mesh.node_element_ptr.end() - 1);
  for (Index e = 0; e < mesh.element_count(); ++e) {
    for (Index n : mesh.elements[e]) mesh.node_elements[cursor[n]++] = e;
  }

  mesh.faces = build_face_adjacency(mesh.node_count(), mesh.elements);
  return mesh;
}

std::vector<Face> build_face_adjacency(
    Index node_count, std::span<const std::array<Index, 4>> elements) {
  struct Facet {
    std::array<Index, 3> key;
    Index element;
  };
  constexpr int kFacets[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};

  std::vector<Facet> facets;
  facets.reserve(elements.size() * 4);
  for (std::size_t e = 0; e < elements.size(); ++e) {
    for (const auto& f : kFacets) {
      std::array<Index, 3> key = {elements[e][f[0]], elements[e][f[1]],
                                  elements[e][f[2]]};
      for (Index n : key) {
        if (n < 0 || n >= node_count) {
          throw StructuralError("face adjacency: node index out of range");
        }
      }
      std::sort(key.begin(), key.end());
      facets.push_back({key, static_cast<Index>(e)});
    }
  }
  std::sort(facets.begin(), facets.end(), [](const Facet& a, const Facet& b) {
    return a.key != b.key ? a.key < b.key : a.element < b.element;
  });

  std::vector<Face> faces;
  faces.reserve(facets.size() / 2 + 1);
  for (std::size_t i = 0; i < facets.size();) {
    std::size_t j = i;
    while (j < facets.size() && facets[j].key == facets[i].key) ++j;
    const std::size_t incident = j - i;
    if (incident > 2) {
      throw StructuralError("face adjacency: face shared by " +
                            std::to_string(incident) + " elements");
    }
    faces.push_back({facets[i].key, facets[i].element,
                     incident == 2 ? facets[i + 1].element : kNoElement});
    i = j;
  }
  return faces;
}

ElementGeometry element_geometry(const BackgroundMesh& mesh, Index element) {
  const auto& tet = mesh.elements[element];
  const Vec3& x0 = mesh.nodes[tet[0]];
  Mat3 d;
  d.col(0) = mesh.nodes[tet[1]] - x0;
  d.col(1) = mesh.nodes[tet[2]] - x0;
  d.col(2) = mesh.nodes[tet[3]] - x0;

  ElementGeometry geom;
  geom.volume = d.determinant() / 6.0;
  const double h = mesh.h > 0 ? mesh.h : 1.0;
  if (!(geom.volume > 1e-12 * h * h * h)) {
    throw StructuralError("degenerate element " + std::to_string(element) +
                          " (volume " + std::to_string(geom.volume) + ")");
  }

  const Mat3 inv = d.inverse();
  geom.basis_gradients[1] = inv.row(0);
  geom.basis_gradients[2] = inv.row(1);
  geom.basis_gradients[3] = inv.row(2);
  geom.basis_gradients[0] =
      -(geom.basis_gradients[1] + geom.basis_gradients[2] +
        geom.basis_gradients[3]);
  return geom;
}

double ElementGeometry::basis_value(const BackgroundMesh& mesh, Index element,
                                    int i, const Vec3& x) const {
  const Vec3& x0 = mesh.nodes[mesh.elements[element][0]];
  return (i == 0 ? 1.0 : 0.0) + basis_gradients[i].dot(x - x0);
}

double BackgroundMesh::total_volume() const {
  long double sum = 0;
  for (Index e = 0; e < element_count(); ++e) {
    sum += element_geometry(*this, e).volume;
  }
  return static_cast<double>(sum);
}

}  // namespace minsurf

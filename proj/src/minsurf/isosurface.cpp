#include "minsurf/isosurface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace minsurf {

namespace {

class Extractor {
 public:
  Extractor(const LevelSet& ls, const Band& band)
      : ls_(ls), mesh_(*ls.mesh), band_(band) {
    area_floor_ = 1e-14 * mesh_.h * mesh_.h;
  }

  SurfaceMesh run() {
    for (Index e : band_.cut_elements) process_element(e);
    compact_vertices();
    return std::move(out_);
  }

 private:
  // Vertex on the background edge between global nodes a and b, deduplicated
  // by the canonical (min, max) key so neighboring elements share vertices.
  Index vertex_on_edge(Index a, Index b) {
    if (a > b) std::swap(a, b);
    const auto [it, inserted] =
        edge_vertex_.try_emplace({a, b}, static_cast<Index>(out_.vertices.size()));
    if (inserted) {
      const double va = ls_.values[a];
      const double vb = ls_.values[b];
      const double theta = va / (va - vb);
      out_.vertices.push_back(
          {(1.0 - theta) * mesh_.nodes[a] + theta * mesh_.nodes[b], a, b,
           theta});
    }
    return it->second;
  }

  void emit_triangle(Index v0, Index v1, Index v2, Index element,
                     const Vec3& gradient) {
    const Vec3& p0 = out_.vertices[v0].position;
    const Vec3& p1 = out_.vertices[v1].position;
    const Vec3& p2 = out_.vertices[v2].position;
    Vec3 n = (p1 - p0).cross(p2 - p0);
    if (n.dot(gradient) < 0) {
      std::swap(v1, v2);
      n = -n;
    }
    const double len = n.norm();
    const double area = 0.5 * len;
    if (area < area_floor_) {
      out_.dropped_triangles += 1;
      return;
    }
    out_.triangles.push_back({{v0, v1, v2}, element, area, n / len});
  }

  // Dropped slivers can leave vertices no surviving triangle references.
  // Prune them so the vertex list describes exactly the emitted geometry.
  void compact_vertices() {
    std::vector<Index> remap(out_.vertices.size(), -1);
    for (const SurfaceTriangle& tri : out_.triangles) {
      for (Index v : tri.vertices) remap[static_cast<std::size_t>(v)] = 0;
    }
    Index next = 0;
    for (Index& slot : remap) {
      if (slot == 0) slot = next++;
    }
    if (next == static_cast<Index>(out_.vertices.size())) return;
    for (SurfaceTriangle& tri : out_.triangles) {
      for (Index& v : tri.vertices) v = remap[static_cast<std::size_t>(v)];
    }
    std::vector<SurfaceVertex> kept;
    kept.reserve(static_cast<std::size_t>(next));
    for (std::size_t v = 0; v < remap.size(); ++v) {
      if (remap[v] >= 0) kept.push_back(out_.vertices[v]);
    }
    out_.vertices = std::move(kept);
  }

  void process_element(Index element) {
    const auto& tet = mesh_.elements[element];
    int neg[4];
    int pos[4];
    int n_neg = 0;
    int n_pos = 0;
    for (int i = 0; i < 4; ++i) {
      (ls_.values[tet[i]] < 0.0 ? neg[n_neg++] : pos[n_pos++]) = i;
    }
    if (n_neg == 0 || n_neg == 4) {
      throw StructuralError("extract: element " + std::to_string(element) +
                            " marked cut but has uniform sign");
    }
    const Vec3 gradient = element_gradient(ls_, element);

    if (n_neg == 1 || n_neg == 3) {
      const int lone = n_neg == 1 ? neg[0] : pos[0];
      const int* rest = n_neg == 1 ? pos : neg;
      emit_triangle(vertex_on_edge(tet[lone], tet[rest[0]]),
                    vertex_on_edge(tet[lone], tet[rest[1]]),
                    vertex_on_edge(tet[lone], tet[rest[2]]), element, gradient);
      return;
    }

    // Two-against-two: a planar quad. Walk the ring so consecutive corners
    // share a tetrahedron node, then split along the shorter diagonal.
    const Index q0 = vertex_on_edge(tet[neg[0]], tet[pos[0]]);
    const Index q1 = vertex_on_edge(tet[neg[0]], tet[pos[1]]);
    const Index q2 = vertex_on_edge(tet[neg[1]], tet[pos[1]]);
    const Index q3 = vertex_on_edge(tet[neg[1]], tet[pos[0]]);

    const double d02 =
        (out_.vertices[q0].position - out_.vertices[q2].position).squaredNorm();
    const double d13 =
        (out_.vertices[q1].position - out_.vertices[q3].position).squaredNorm();
    bool use02;
    if (d02 != d13) {
      use02 = d02 < d13;
    } else {
      use02 = std::minmax(q0, q2) < std::minmax(q1, q3);
    }
    if (use02) {
      emit_triangle(q0, q1, q2, element, gradient);
      emit_triangle(q0, q2, q3, element, gradient);
    } else {
      emit_triangle(q1, q2, q3, element, gradient);
      emit_triangle(q1, q3, q0, element, gradient);
    }
  }

  const LevelSet& ls_;
  const BackgroundMesh& mesh_;
  const Band& band_;
  double area_floor_;
  std::map<std::pair<Index, Index>, Index> edge_vertex_;
  SurfaceMesh out_;
};

}  // namespace

SurfaceMesh extract_surface(const LevelSet& ls, const Band& band) {
  return Extractor(ls, band).run();
}

double total_area(const SurfaceMesh& surface) {
  long double sum = 0;
  for (const SurfaceTriangle& tri : surface.triangles) sum += tri.area;
  return static_cast<double>(sum);
}

double min_radial_distance(const SurfaceMesh& surface, const Vec3& axis_point,
                           const Vec3& axis_dir, double s_lo, double s_hi) {
  const double len = axis_dir.norm();
  if (!(len > 0)) throw Error("min_radial_distance: axis must be nonzero");
  const Vec3 dir = axis_dir / len;

  double best = std::numeric_limits<double>::infinity();
  for (const SurfaceVertex& v : surface.vertices) {
    const Vec3 rel = v.position - axis_point;
    const double s = rel.dot(dir);
    if (s < s_lo || s > s_hi) continue;
    best = std::min(best, (rel - s * dir).norm());
  }
  if (!std::isfinite(best)) {
    throw Error("min_radial_distance: no surface vertex in the axial window");
  }
  return best;
}

}  // namespace minsurf

#include "minsurf/levelset.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "minsurf/isosurface.hpp"

namespace minsurf {

Primitive Primitive::sphere(const Vec3& center, double radius) {
  if (!(radius > 0)) throw Error("sphere: radius must be positive");
  Primitive p;
  p.kind_ = Kind::kSphere;
  p.point_ = center;
  p.radius_ = radius;
  return p;
}

Primitive Primitive::cylinder(const Vec3& axis_point, const Vec3& axis_dir,
                              double radius) {
  if (!(radius > 0)) throw Error("cylinder: radius must be positive");
  const double len = axis_dir.norm();
  if (!(len > 0)) throw Error("cylinder: axis direction must be nonzero");
  Primitive p;
  p.kind_ = Kind::kCylinder;
  p.point_ = axis_point;
  p.direction_ = axis_dir / len;
  p.radius_ = radius;
  return p;
}

Primitive Primitive::plane(const Vec3& point, const Vec3& normal) {
  const double len = normal.norm();
  if (!(len > 0)) throw Error("plane: normal must be nonzero");
  Primitive p;
  p.kind_ = Kind::kPlane;
  p.point_ = point;
  p.direction_ = normal / len;
  return p;
}

Primitive Primitive::merge(std::vector<Primitive> parts) {
  if (parts.empty()) throw Error("merge: needs at least one part");
  Primitive p;
  p.kind_ = Kind::kUnion;
  p.parts_ = std::make_shared<const std::vector<Primitive>>(std::move(parts));
  return p;
}

Primitive Primitive::translated(const Vec3& offset) const {
  Primitive p = *this;
  if (kind_ == Kind::kUnion) {
    std::vector<Primitive> moved;
    moved.reserve(parts_->size());
    for (const auto& part : *parts_) moved.push_back(part.translated(offset));
    p.parts_ = std::make_shared<const std::vector<Primitive>>(std::move(moved));
  } else {
    p.point_ += offset;
  }
  return p;
}

double Primitive::signed_distance(const Vec3& x) const {
  switch (kind_) {
    case Kind::kSphere:
      return (x - point_).norm() - radius_;
    case Kind::kCylinder: {
      const Vec3 rel = x - point_;
      return (rel - rel.dot(direction_) * direction_).norm() - radius_;
    }
    case Kind::kPlane:
      return (x - point_).dot(direction_);
    case Kind::kUnion: {
      double d = std::numeric_limits<double>::infinity();
      for (const auto& part : *parts_) {
        d = std::min(d, part.signed_distance(x));
      }
      return d;
    }
  }
  throw StructuralError("primitive: unknown kind");
}

LevelSet init_from_primitive(const BackgroundMesh& mesh,
                             const Primitive& shape) {
  LevelSet ls;
  ls.mesh = &mesh;
  ls.values.reserve(mesh.nodes.size());
  for (const Vec3& x : mesh.nodes) {
    ls.values.push_back(shape.signed_distance(x));
  }
  return ls;
}

void apply_zero_perturbation(LevelSet& ls, double delta) {
  const double eps = delta * ls.mesh->h;
  for (double& v : ls.values) {
    if (v == 0.0) {
      v = eps;
    } else if (std::abs(v) < eps) {
      v = std::copysign(eps, v);
    }
  }
}

Vec3 element_gradient(const LevelSet& ls, Index element) {
  const ElementGeometry geom = element_geometry(*ls.mesh, element);
  const auto& tet = ls.mesh->elements[element];
  Vec3 g = Vec3::Zero();
  for (int i = 0; i < 4; ++i) {
    g += ls.values[tet[i]] * geom.basis_gradients[i];
  }
  return g;
}

namespace {

bool element_is_cut(const LevelSet& ls, const std::array<Index, 4>& tet) {
  // Values of exactly zero count as positive, matching apply_zero_perturbation.
  int negatives = 0;
  for (Index n : tet) negatives += ls.values[n] < 0.0 ? 1 : 0;
  return negatives > 0 && negatives < 4;
}

}  // namespace

Band select_band(const LevelSet& ls, int ring_count) {
  if (ring_count < 0) throw Error("band: ring_count must be nonnegative");
  const BackgroundMesh& mesh = *ls.mesh;

  Band band;
  band.ring_count = ring_count;
  band.element_is_cut.assign(mesh.element_count(), 0);
  band.element_in_band.assign(mesh.element_count(), 0);
  band.node_in_band.assign(mesh.node_count(), 0);

  for (Index e = 0; e < mesh.element_count(); ++e) {
    if (element_is_cut(ls, mesh.elements[e])) {
      band.element_is_cut[e] = 1;
      band.element_in_band[e] = 1;
      band.cut_elements.push_back(e);
    }
  }
  if (band.cut_elements.empty()) {
    throw EmptyCutError("no element is cut by the zero isosurface");
  }

  std::vector<Index> frontier = band.cut_elements;
  std::vector<Index> frontier_nodes;
  for (int ring = 0; ring < ring_count; ++ring) {
    frontier_nodes.clear();
    for (Index e : frontier) {
      for (Index n : mesh.elements[e]) frontier_nodes.push_back(n);
    }
    std::sort(frontier_nodes.begin(), frontier_nodes.end());
    frontier_nodes.erase(
        std::unique(frontier_nodes.begin(), frontier_nodes.end()),
        frontier_nodes.end());

    std::vector<Index> next;
    for (Index n : frontier_nodes) {
      for (Index e : mesh.elements_of_node(n)) {
        if (!band.element_in_band[e]) {
          band.element_in_band[e] = 1;
          next.push_back(e);
        }
      }
    }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
    if (frontier.empty()) break;
  }

  for (Index e = 0; e < mesh.element_count(); ++e) {
    if (band.element_in_band[e]) {
      if (!band.element_is_cut[e]) band.halo_elements.push_back(e);
      for (Index n : mesh.elements[e]) band.node_in_band[n] = 1;
    }
  }
  for (Index n = 0; n < mesh.node_count(); ++n) {
    if (band.node_in_band[n]) band.nodes.push_back(n);
  }
  return band;
}

NormalField build_normal_field(const LevelSet& ls, const Band& band,
                               const SurfaceMesh& surface) {
  const BackgroundMesh& mesh = *ls.mesh;
  NormalField field;
  field.element_normals.assign(mesh.element_count(), Vec3::Zero());
  field.node_normals.assign(mesh.node_count(), Vec3::Zero());

  for (Index e : band.cut_elements) {
    const Vec3 g = element_gradient(ls, e);
    const double len = g.norm();
    if (!(len > 0)) {
      throw StructuralError("zero level-set gradient on cut element " +
                            std::to_string(e));
    }
    field.element_normals[e] = g / len;
  }

  // Lumped L2 projection onto band nodes: weights are the row sums of the
  // surface mass matrix, evaluated with edge-midpoint quadrature.
  std::vector<Vec3> momentum(mesh.node_count(), Vec3::Zero());
  for (const SurfaceTriangle& tri : surface.triangles) {
    const ElementGeometry geom = element_geometry(mesh, tri.element);
    const auto& tet = mesh.elements[tri.element];
    const Vec3& a = surface.vertices[tri.vertices[0]].position;
    const Vec3& b = surface.vertices[tri.vertices[1]].position;
    const Vec3& c = surface.vertices[tri.vertices[2]].position;
    const Vec3 mids[3] = {0.5 * (a + b), 0.5 * (b + c), 0.5 * (c + a)};
    const Vec3& n = field.element_normals[tri.element];
    const double w = tri.area / 3.0;
    for (int i = 0; i < 4; ++i) {
      double weight = 0;
      for (const Vec3& q : mids) {
        weight += w * geom.basis_value(mesh, tri.element, i, q);
      }
      momentum[tet[i]] += weight * n;
    }
  }

  for (Index n : band.nodes) {
    Vec3 dir = momentum[n];
    if (!(dir.norm() > 0)) {
      // Halo nodes carry no surface mass; fall back to the averaged raw
      // level-set gradient of the incident band elements.
      dir = Vec3::Zero();
      for (Index e : mesh.elements_of_node(n)) {
        if (band.element_in_band[e]) dir += element_gradient(ls, e);
      }
    }
    const double len = dir.norm();
    if (len > 0) {
      field.node_normals[n] = dir / len;
    }
    // Deep halo nodes wedged between opposing sheets can see the incident
    // gradients cancel exactly. They carry no velocity, so a zero normal
    // leaves them untouched until reinitialization repairs the field.
  }
  return field;
}

void advance(LevelSet& ls, const Band& band, const NormalField& normals,
             std::span<const Vec3> node_velocity, double dt) {
  if (node_velocity.size() != ls.values.size()) {
    throw StructuralError("advance: velocity field has wrong size");
  }
  for (Index n : band.nodes) {
    ls.values[n] -= dt * normals.node_normals[n].dot(node_velocity[n]);
  }
}

namespace {

// Closest-point distance from p to triangle (a, b, c).
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b,
                               const Vec3& c) {
  const Vec3 ab = b - a;
  const Vec3 ac = c - a;
  const Vec3 ap = p - a;

  const double d1 = ab.dot(ap);
  const double d2 = ac.dot(ap);
  if (d1 <= 0 && d2 <= 0) return ap.norm();

  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp);
  const double d4 = ac.dot(bp);
  if (d3 >= 0 && d4 <= d3) return bp.norm();

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0 && d1 >= 0 && d3 <= 0) {
    const double t = d1 / (d1 - d3);
    return (ap - t * ab).norm();
  }

  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp);
  const double d6 = ac.dot(cp);
  if (d6 >= 0 && d5 <= d6) return cp.norm();

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0 && d2 >= 0 && d6 <= 0) {
    const double t = d2 / (d2 - d6);
    return (ap - t * ac).norm();
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0 && d4 - d3 >= 0 && d5 - d6 >= 0) {
    const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (bp - t * (c - b)).norm();
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  return (ap - v * ab - w * ac).norm();
}

// Uniform grid over the background cells used to localize closest-point
// queries against the extracted surface.
class CellGrid {
 public:
  CellGrid(const BackgroundMesh& mesh, std::size_t item_count)
      : lo_(mesh.domain.lo),
        counts_(mesh.domain.divisions),
        ptr_(static_cast<std::size_t>(counts_[0]) * counts_[1] * counts_[2] + 1,
             0) {
    for (int a = 0; a < 3; ++a) {
      step_[a] = (mesh.domain.hi[a] - mesh.domain.lo[a]) / counts_[a];
    }
    cell_of_item_.reserve(item_count);
  }

  void place(const Vec3& position) {
    cell_of_item_.push_back(cell_index(position));
  }

  void finalize() {
    for (int c : cell_of_item_) ptr_[c + 1] += 1;
    for (std::size_t c = 1; c < ptr_.size(); ++c) ptr_[c] += ptr_[c - 1];
    items_.resize(cell_of_item_.size());
    std::vector<int> cursor(ptr_.begin(), ptr_.end() - 1);
    for (std::size_t i = 0; i < cell_of_item_.size(); ++i) {
      items_[cursor[cell_of_item_[i]]++] = static_cast<Index>(i);
    }
  }

  /// Calls visit(item) for items in cells at Chebyshev shell radius r around
  /// the cell containing p, for growing r, until stop(r) returns true after
  /// a completed shell. Shells beyond the grid stop the walk.
  template <class Visit, class Stop>
  void walk_shells(const Vec3& p, const Visit& visit, const Stop& stop) const {
    int base[3];
    for (int a = 0; a < 3; ++a) {
      base[a] = clamp_cell(static_cast<int>(std::floor((p[a] - lo_[a]) / step_[a])), a);
    }
    const int max_r = std::max({counts_[0], counts_[1], counts_[2]});
    for (int r = 0; r <= max_r; ++r) {
      for (int ci = base[0] - r; ci <= base[0] + r; ++ci) {
        if (ci < 0 || ci >= counts_[0]) continue;
        for (int cj = base[1] - r; cj <= base[1] + r; ++cj) {
          if (cj < 0 || cj >= counts_[1]) continue;
          for (int ck = base[2] - r; ck <= base[2] + r; ++ck) {
            if (ck < 0 || ck >= counts_[2]) continue;
            const int shell = std::max({std::abs(ci - base[0]),
                                        std::abs(cj - base[1]),
                                        std::abs(ck - base[2])});
            if (shell != r) continue;
            const int c = ci + counts_[0] * (cj + counts_[1] * ck);
            for (int k = ptr_[c]; k < ptr_[c + 1]; ++k) visit(items_[k]);
          }
        }
      }
      if (stop(r)) return;
    }
  }

  double min_step() const { return std::min({step_[0], step_[1], step_[2]}); }

 private:
  int clamp_cell(int v, int axis) const {
    return std::clamp(v, 0, counts_[axis] - 1);
  }

  int cell_index(const Vec3& position) const {
    int c[3];
    for (int a = 0; a < 3; ++a) {
      c[a] = clamp_cell(
          static_cast<int>(std::floor((position[a] - lo_[a]) / step_[a])), a);
    }
    return c[0] + counts_[0] * (c[1] + counts_[1] * c[2]);
  }

  Vec3 lo_;
  Vec3 step_;
  std::array<int, 3> counts_;
  std::vector<int> ptr_;
  std::vector<Index> items_;
  std::vector<int> cell_of_item_;
};

double nearest_surface_distance(const CellGrid& grid, const SurfaceMesh& surface,
                                ReinitMode mode, const Vec3& p) {
  double best = std::numeric_limits<double>::infinity();
  const auto visit = [&](Index item) {
    double d;
    if (mode == ReinitMode::kTriangle) {
      const SurfaceTriangle& tri = surface.triangles[item];
      d = point_triangle_distance(p, surface.vertices[tri.vertices[0]].position,
                                  surface.vertices[tri.vertices[1]].position,
                                  surface.vertices[tri.vertices[2]].position);
    } else {
      d = (surface.vertices[item].position - p).norm();
    }
    best = std::min(best, d);
  };
  // Items are bucketed by one representative point, so after a hit one more
  // shell (plus slack for anisotropy) must still be scanned.
  const auto stop = [&](int r) {
    return std::isfinite(best) && (r - 1) * grid.min_step() > best;
  };
  grid.walk_shells(p, visit, stop);
  if (!std::isfinite(best)) {
    throw StructuralError("reinitialize: no surface found near query point");
  }
  return best;
}

}  // namespace

void reinitialize(LevelSet& ls, const Band& band, const SurfaceMesh& surface,
                  ReinitMode mode, std::span<const std::uint8_t> frozen) {
  const BackgroundMesh& mesh = *ls.mesh;
  if (surface.triangles.empty()) {
    throw StructuralError("reinitialize: empty surface");
  }
  if (!frozen.empty() && frozen.size() != ls.values.size()) {
    throw StructuralError("reinitialize: frozen mask has wrong size");
  }

  const std::size_t item_count = mode == ReinitMode::kTriangle
                                     ? surface.triangles.size()
                                     : surface.vertices.size();
  CellGrid grid(mesh, item_count);
  if (mode == ReinitMode::kTriangle) {
    for (const SurfaceTriangle& tri : surface.triangles) {
      grid.place((surface.vertices[tri.vertices[0]].position +
                  surface.vertices[tri.vertices[1]].position +
                  surface.vertices[tri.vertices[2]].position) /
                 3.0);
    }
  } else {
    for (const SurfaceVertex& v : surface.vertices) grid.place(v.position);
  }
  grid.finalize();

  for (Index n : band.nodes) {
    if (!frozen.empty() && frozen[n]) continue;
    const double d = nearest_surface_distance(grid, surface, mode, mesh.nodes[n]);
    ls.values[n] = std::copysign(d, ls.values[n]);
  }

  // Outside the band the values only need the right sign and enough
  // magnitude to stay clear of the next band selection.
  const double width = (band.ring_count + 1) * mesh.h;
  for (Index n = 0; n < mesh.node_count(); ++n) {
    if (band.node_in_band[n]) continue;
    if (!frozen.empty() && frozen[n]) continue;
    if (std::abs(ls.values[n]) < width) {
      ls.values[n] = std::copysign(width, ls.values[n]);
    }
  }
}

}  // namespace minsurf

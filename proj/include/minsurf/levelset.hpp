#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "minsurf/mesh.hpp"
#include "minsurf/types.hpp"

namespace minsurf {

struct SurfaceMesh;

/// Exact signed-distance primitive (negative inside). Union keeps the
/// pointwise minimum, which stays an exact distance outside overlaps.
class Primitive {
 public:
  static Primitive sphere(const Vec3& center, double radius);
  /// Infinite cylinder around the line through `axis_point` along `axis_dir`.
  static Primitive cylinder(const Vec3& axis_point, const Vec3& axis_dir,
                            double radius);
  /// Half-space boundary; negative on the side `normal` points away from.
  static Primitive plane(const Vec3& point, const Vec3& normal);
  static Primitive merge(std::vector<Primitive> parts);

  Primitive translated(const Vec3& offset) const;

  double signed_distance(const Vec3& x) const;

 private:
  enum class Kind { kSphere, kCylinder, kPlane, kUnion };

  Primitive() = default;

  Kind kind_ = Kind::kSphere;
  Vec3 point_{0, 0, 0};
  Vec3 direction_{0, 0, 1};
  double radius_ = 0;
  std::shared_ptr<const std::vector<Primitive>> parts_;
};

/// Nodal level-set values on a background mesh (non-owning reference).
struct LevelSet {
  const BackgroundMesh* mesh = nullptr;
  std::vector<double> values;
};

/// Narrow band around the zero isosurface: the cut elements plus
/// `ring_count` rings of node-neighbor elements.
struct Band {
  int ring_count = 0;
  std::vector<Index> cut_elements;   // sorted ascending
  std::vector<Index> halo_elements;  // sorted, disjoint from cut_elements
  std::vector<Index> nodes;          // sorted nodes of cut + halo elements
  std::vector<std::uint8_t> element_is_cut;   // size element_count
  std::vector<std::uint8_t> element_in_band;  // size element_count
  std::vector<std::uint8_t> node_in_band;     // size node_count
};

/// Discrete normals: raw per-element normals on cut elements and the
/// lumped L2 projection onto band nodes (unit length).
struct NormalField {
  std::vector<Vec3> element_normals;  // size element_count, zero off the cut
  std::vector<Vec3> node_normals;     // size node_count, zero off the band
};

LevelSet init_from_primitive(const BackgroundMesh& mesh,
                             const Primitive& shape);

/// Pushes nodal values away from exact zero so every element has a strict
/// sign pattern: |v| < delta*h becomes sign(v)*delta*h, exact zero +delta*h.
void apply_zero_perturbation(LevelSet& ls, double delta = 1e-8);

/// Interpolated level-set gradient on one element (constant per element).
Vec3 element_gradient(const LevelSet& ls, Index element);

Band select_band(const LevelSet& ls, int ring_count);

/// How surface reinitialization measures distance to the extracted surface.
enum class ReinitMode { kTriangle, kVertex };

NormalField build_normal_field(const LevelSet& ls, const Band& band,
                               const SurfaceMesh& surface);

/// One explicit transport step of the nodal values on band nodes:
/// value -= dt * (node normal . node velocity).
void advance(LevelSet& ls, const Band& band, const NormalField& normals,
             std::span<const Vec3> node_velocity, double dt);

/// Resets band-node values to signed distance to `surface` (sign kept from
/// the current values) and pushes any too-small magnitude outside the band
/// up to the band width. Nodes with `frozen[node]` set are left untouched.
void reinitialize(LevelSet& ls, const Band& band, const SurfaceMesh& surface,
                  ReinitMode mode, std::span<const std::uint8_t> frozen = {});

}  // namespace minsurf

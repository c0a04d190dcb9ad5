#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "minsurf/assembly.hpp"
#include "minsurf/isosurface.hpp"
#include "minsurf/levelset.hpp"
#include "minsurf/mesh.hpp"
#include "minsurf/sparse.hpp"
#include "minsurf/types.hpp"

using namespace minsurf;

namespace {

struct CutSetup {
  BackgroundMesh mesh;
  LevelSet ls;
  Band band;
  SurfaceMesh surface;
  DofMap dofs;
};

// Filled in place: the level set points at the caller-owned mesh, so the
// setup must never be moved after initialization.
void init_sphere(CutSetup& s, int divisions) {
  s.mesh = build_box_mesh({{-0.6, -0.6, -0.6},
                           {0.6, 0.6, 0.6},
                           {divisions, divisions, divisions}});
  s.ls = init_from_primitive(s.mesh, Primitive::sphere({0, 0, 0}, 0.4));
  apply_zero_perturbation(s.ls);
  s.band = select_band(s.ls, 2);
  s.surface = extract_surface(s.ls, s.band);
  s.dofs = build_dof_map(s.mesh, s.band, {});
}

void init_plane(CutSetup& s) {
  s.mesh = build_box_mesh({{0, 0, 0}, {1, 1, 1}, {8, 8, 8}});
  s.ls = init_from_primitive(s.mesh, Primitive::plane({0, 0, 0.43}, {0, 0, 1}));
  apply_zero_perturbation(s.ls);
  s.band = select_band(s.ls, 2);
  s.surface = extract_surface(s.ls, s.band);
  std::vector<ClampPlane> boundary;
  for (int axis = 0; axis < 3; ++axis) {
    boundary.push_back({axis, 0.0});
    boundary.push_back({axis, 1.0});
  }
  s.dofs = build_dof_map(s.mesh, s.band, boundary);
}

std::vector<double> coordinate_vector(const CutSetup& s, int axis) {
  std::vector<double> x(s.dofs.size());
  for (Index d = 0; d < s.dofs.size(); ++d) {
    x[d] = s.mesh.nodes[s.dofs.node_of_dof[d]][axis];
  }
  return x;
}

double relative_residual(const SparseOperator& op,
                         const std::vector<double>& x) {
  const std::vector<double> y = op.multiply(x);
  double norm = 0;
  for (double v : y) norm += v * v;
  return std::sqrt(norm) / op.frobenius_norm();
}

}  // namespace

TEST_CASE("dof map: contiguous band numbering with clamp flags") {
  const BackgroundMesh mesh = build_box_mesh(
      {{-0.6, -0.6, -0.6}, {0.6, 0.6, 0.6}, {12, 12, 12}});
  LevelSet ls = init_from_primitive(mesh, Primitive::sphere({0, 0, 0}, 0.4));
  apply_zero_perturbation(ls);
  const Band band = select_band(ls, 2);
  const std::vector<ClampPlane> clamps = {{2, 0.4}};
  const DofMap dofs = build_dof_map(mesh, band, clamps);

  REQUIRE(dofs.size() == static_cast<Index>(band.nodes.size()));
  CHECK(std::is_sorted(dofs.node_of_dof.begin(), dofs.node_of_dof.end()));
  int clamped = 0;
  for (Index d = 0; d < dofs.size(); ++d) {
    const Index n = dofs.node_of_dof[d];
    CHECK(dofs.dof_of_node[n] == d);
    CHECK(dofs.dof_is_clamped[d] ==
          (node_on_clamp_plane(mesh.nodes[n], clamps) ? 1 : 0));
    clamped += dofs.dof_is_clamped[d];
  }
  CHECK(clamped > 0);
  for (Index n = 0; n < mesh.node_count(); ++n) {
    if (!band.node_in_band[n]) CHECK(dofs.dof_of_node[n] == -1);
  }
  CHECK(node_on_clamp_plane({0.1, 0.2, 0.4}, clamps));
  CHECK(!node_on_clamp_plane({0.1, 0.2, 0.3}, clamps));
  CHECK_THROWS_AS(node_on_clamp_plane({0, 0, 0}, std::vector<ClampPlane>{{5, 0.0}}),
                  StructuralError);
}

TEST_CASE("mass matrix equals a degree-5 quadrature reference") {
  const BackgroundMesh mesh = build_box_mesh({{0, 0, 0}, {1, 1, 1}, {1, 1, 1}});
  LevelSet ls{&mesh, {}};
  for (const Vec3& x : mesh.nodes) ls.values.push_back(x.sum() - 0.5);
  const Band band = select_band(ls, 1);
  const SurfaceMesh surface = extract_surface(ls, band);
  const DofMap dofs = build_dof_map(mesh, band, {});
  const SparseOperator mass = assemble_mass(mesh, surface, band, dofs);

  // 7-point degree-5 rule; overkill for the quadratic integrand, so any
  // disagreement with the 3-point midpoint rule is a bug, not quadrature.
  const double a1 = (6.0 - std::sqrt(15.0)) / 21.0;
  const double a2 = (6.0 + std::sqrt(15.0)) / 21.0;
  const double w0 = 9.0 / 40.0;
  const double w1 = (155.0 - std::sqrt(15.0)) / 1200.0;
  const double w2 = (155.0 + std::sqrt(15.0)) / 1200.0;
  struct QP {
    double l0, l1, w;
  };
  const QP rule[7] = {{1.0 / 3, 1.0 / 3, w0}, {a1, a1, w1},
                      {1 - 2 * a1, a1, w1},   {a1, 1 - 2 * a1, w1},
                      {a2, a2, w2},           {1 - 2 * a2, a2, w2},
                      {a2, 1 - 2 * a2, w2}};

  const Index n = dofs.size();
  Eigen::MatrixXd reference = Eigen::MatrixXd::Zero(n, n);
  for (const SurfaceTriangle& tri : surface.triangles) {
    const ElementGeometry geom = element_geometry(mesh, tri.element);
    const auto& tet = mesh.elements[tri.element];
    const Vec3& p0 = surface.vertices[tri.vertices[0]].position;
    const Vec3& p1 = surface.vertices[tri.vertices[1]].position;
    const Vec3& p2 = surface.vertices[tri.vertices[2]].position;
    for (const QP& qp : rule) {
      const Vec3 x = qp.l0 * p0 + qp.l1 * p1 + (1 - qp.l0 - qp.l1) * p2;
      for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
          const Index di = dofs.dof_of_node[tet[i]];
          const Index dj = dofs.dof_of_node[tet[j]];
          reference(di, dj) += qp.w * tri.area *
                               geom.basis_value(mesh, tri.element, i, x) *
                               geom.basis_value(mesh, tri.element, j, x);
        }
      }
    }
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      CHECK(mass.entry(i, j) ==
            doctest::Approx(reference(i, j)).epsilon(1e-12));
    }
  }
  CHECK(mass.sum_entries() ==
        doctest::Approx(std::sqrt(3.0) / 8.0).epsilon(1e-13));
}

TEST_CASE("mass matrix: partition of unity, symmetry, nonnegative rows") {
  CutSetup s;
  init_sphere(s, 16);
  const SparseOperator mass = assemble_mass(s.mesh, s.surface, s.band, s.dofs);

  const double area = total_area(s.surface);
  CHECK(mass.sum_entries() == doctest::Approx(area).epsilon(1e-12));
  CHECK(mass.symmetry_defect() <= 1e-14);

  const std::vector<double> row_sums =
      mass.multiply(std::vector<double>(s.dofs.size(), 1.0));
  for (double v : row_sums) CHECK(v >= -1e-15);

  std::mt19937 rng(21);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(s.dofs.size());
    for (double& v : x) v = value(rng);
    CHECK(mass.quadratic_form(x) >= -1e-14);
  }
}

TEST_CASE("stiffness on a flat cut: exact coordinate decomposition") {
  CutSetup s;
  init_plane(s);
  const SparseOperator stiff = assemble_stiffness(s.mesh, s.surface, s.dofs);
  const double area = total_area(s.surface);

  CHECK(relative_residual(stiff, std::vector<double>(s.dofs.size(), 1.0)) <
        1e-13);
  // In-plane coordinates each contribute exactly the area; the normal
  // coordinate is constant on the surface and contributes nothing.
  CHECK(stiff.quadratic_form(coordinate_vector(s, 0)) ==
        doctest::Approx(area).epsilon(1e-12));
  CHECK(stiff.quadratic_form(coordinate_vector(s, 1)) ==
        doctest::Approx(area).epsilon(1e-12));
  CHECK(stiff.quadratic_form(coordinate_vector(s, 2)) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(stiff.symmetry_defect() <= 1e-14);
}

TEST_CASE("stiffness Dirichlet identity on a curved cut") {
  CutSetup s;
  init_sphere(s, 16);
  const SparseOperator stiff = assemble_stiffness(s.mesh, s.surface, s.dofs);
  const double area = total_area(s.surface);

  double dirichlet = 0;
  for (int axis = 0; axis < 3; ++axis) {
    dirichlet += stiff.quadratic_form(coordinate_vector(s, axis));
  }
  CHECK(dirichlet == doctest::Approx(2.0 * area).epsilon(1e-12));
  CHECK(relative_residual(stiff, std::vector<double>(s.dofs.size(), 1.0)) <
        1e-13);

  std::mt19937 rng(22);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(s.dofs.size());
    for (double& v : x) v = value(rng);
    CHECK(stiff.quadratic_form(x) >= -1e-12 * stiff.frobenius_norm());
  }
}

TEST_CASE("stabilization equals an independent dense assembly") {
  const BackgroundMesh mesh = build_box_mesh({{0, 0, 0}, {2, 1, 1}, {2, 1, 1}});
  LevelSet ls{&mesh, {}};
  for (const Vec3& x : mesh.nodes) ls.values.push_back(x.sum() - 1.2);
  const Band band = select_band(ls, 1);
  const SurfaceMesh surface = extract_surface(ls, band);
  REQUIRE(!surface.triangles.empty());
  const DofMap dofs = build_dof_map(mesh, band, {});
  const double c_j = 0.7;
  const SparseOperator stab =
      assemble_stabilization(mesh, band, dofs, c_j, 0);

  const Index n = dofs.size();
  Eigen::MatrixXd reference = Eigen::MatrixXd::Zero(n, n);
  for (const Face& face : mesh.faces) {
    if (face.right == kNoElement) continue;
    if (!band.element_is_cut[face.left] || !band.element_is_cut[face.right]) {
      continue;
    }
    const Vec3& a = mesh.nodes[face.nodes[0]];
    const Vec3& b = mesh.nodes[face.nodes[1]];
    const Vec3& c = mesh.nodes[face.nodes[2]];
    const Vec3 cross = (b - a).cross(c - a);
    const double face_area = 0.5 * cross.norm();
    const Vec3 n_f = cross.normalized();

    // Jump of the normal derivative per global node, as outward traces.
    Eigen::VectorXd jump = Eigen::VectorXd::Zero(n);
    for (Index e : {face.left, face.right}) {
      const ElementGeometry geom = element_geometry(mesh, e);
      const auto& tet = mesh.elements[e];
      Vec3 opposite = Vec3::Zero();
      for (Index node : tet) {
        if (node != face.nodes[0] && node != face.nodes[1] &&
            node != face.nodes[2]) {
          opposite = mesh.nodes[node];
        }
      }
      const double side = n_f.dot(opposite - a) > 0 ? -1.0 : 1.0;
      for (int i = 0; i < 4; ++i) {
        jump[dofs.dof_of_node[tet[i]]] +=
            side * n_f.dot(geom.basis_gradients[i]);
      }
    }
    reference += c_j * face_area * jump * jump.transpose();
  }

  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < n; ++j) {
      CHECK(stab.entry(i, j) ==
            doctest::Approx(reference(i, j)).epsilon(1e-12));
    }
  }
  CHECK(reference.norm() > 0);
}

TEST_CASE("stabilization: linear consistency, scaling, symmetry, PSD") {
  CutSetup s;
  init_sphere(s, 12);
  const SparseOperator stab =
      assemble_stabilization(s.mesh, s.band, s.dofs, 1.0, 0);
  REQUIRE(stab.frobenius_norm() > 0);

  // Globally linear fields have continuous gradients: the penalty ignores
  // them, constants included.
  CHECK(relative_residual(stab, std::vector<double>(s.dofs.size(), 1.0)) <
        1e-12);
  for (int axis = 0; axis < 3; ++axis) {
    CHECK(relative_residual(stab, coordinate_vector(s, axis)) < 1e-12);
  }
  CHECK(stab.symmetry_defect() <= 1e-12);

  std::mt19937 rng(23);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<double> x(s.dofs.size());
    for (double& v : x) v = value(rng);
    CHECK(stab.quadratic_form(x) >= -1e-12 * stab.frobenius_norm());
  }

  const SparseOperator doubled =
      assemble_stabilization(s.mesh, s.band, s.dofs, 2.0, 0);
  const SparseOperator h_scaled =
      assemble_stabilization(s.mesh, s.band, s.dofs, 1.0, 1);
  SparseOperator defect = doubled;
  defect.add_scaled(stab, -2.0);
  CHECK(defect.frobenius_norm() <= 1e-13 * stab.frobenius_norm());
  SparseOperator h_defect = h_scaled;
  h_defect.add_scaled(stab, -s.mesh.h);
  CHECK(h_defect.frobenius_norm() <= 1e-12 * stab.frobenius_norm());

  // The penalty only touches nodes of cut elements.
  std::vector<std::uint8_t> near_cut(s.mesh.node_count(), 0);
  for (Index e : s.band.cut_elements) {
    for (Index node : s.mesh.elements[e]) near_cut[node] = 1;
  }
  for (Index d = 0; d < s.dofs.size(); ++d) {
    if (near_cut[s.dofs.node_of_dof[d]]) continue;
    for (double v : stab.row_entries_values(d)) CHECK(v == 0.0);
  }
}

TEST_CASE("mass assembly rejects triangles outside the cut") {
  CutSetup s;
  init_sphere(s, 12);
  Band lie = s.band;
  lie.element_is_cut.assign(lie.element_is_cut.size(), 0);
  CHECK_THROWS_AS(assemble_mass(s.mesh, s.surface, lie, s.dofs),
                  StructuralError);
}

#include "minsurf/vtk_io.hpp"

#include <cstdio>
#include <fstream>
#include <string>

namespace minsurf {

namespace {

void append_number(std::string& out, const char* format, double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), format, value);
  out += buf;
}

void append_g6(std::string& out, double value) {
  append_number(out, "%.6g", value);
}

void append_full(std::string& out, double value) {
  append_number(out, "%.17g", value);
}

/// Writes through a temporary file in the same directory so readers never
/// observe a half-written file.
void commit_atomically(const std::filesystem::path& path,
                       const std::string& content) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp.string() + "' for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw Error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

void write_surface_vtk(const SurfaceMesh& surface,
                       std::span<const double> vertex_curvature,
                       std::span<const Vec3> vertex_velocity,
                       const std::filesystem::path& path) {
  const std::size_t n = surface.vertices.size();
  if (vertex_curvature.size() != n || vertex_velocity.size() != n) {
    throw StructuralError("surface vtk: point data size mismatch");
  }

  std::string out;
  out.reserve(64 * n + 32 * surface.triangles.size() + 256);
  out += "# vtk DataFile Version 3.0\n";
  out += "surface\n";
  out += "ASCII\n";
  out += "DATASET POLYDATA\n";
  out += "POINTS " + std::to_string(n) + " float\n";
  for (const SurfaceVertex& v : surface.vertices) {
    append_g6(out, v.position.x());
    out += ' ';
    append_g6(out, v.position.y());
    out += ' ';
    append_g6(out, v.position.z());
    out += '\n';
  }
  out += "POLYGONS " + std::to_string(surface.triangles.size()) + " " +
         std::to_string(4 * surface.triangles.size()) + "\n";
  for (const SurfaceTriangle& t : surface.triangles) {
    out += "3 " + std::to_string(t.vertices[0]) + " " +
           std::to_string(t.vertices[1]) + " " + std::to_string(t.vertices[2]) +
           "\n";
  }
  out += "POINT_DATA " + std::to_string(n) + "\n";
  out += "SCALARS H float 1\n";
  out += "LOOKUP_TABLE default\n";
  for (double h : vertex_curvature) {
    append_g6(out, h);
    out += '\n';
  }
  out += "VECTORS velocity float\n";
  for (const Vec3& u : vertex_velocity) {
    append_g6(out, u.x());
    out += ' ';
    append_g6(out, u.y());
    out += ' ';
    append_g6(out, u.z());
    out += '\n';
  }
  commit_atomically(path, out);
}

void write_mesh_vtk(const BackgroundMesh& mesh,
                    std::span<const double> node_values,
                    const std::filesystem::path& path) {
  if (!node_values.empty() &&
      node_values.size() != static_cast<std::size_t>(mesh.node_count())) {
    throw StructuralError("mesh vtk: point data size mismatch");
  }

  std::string out;
  out += "# vtk DataFile Version 3.0\n";
  out += "background mesh\n";
  out += "ASCII\n";
  out += "DATASET UNSTRUCTURED_GRID\n";
  out += "POINTS " + std::to_string(mesh.node_count()) + " float\n";
  for (const Vec3& x : mesh.nodes) {
    append_g6(out, x.x());
    out += ' ';
    append_g6(out, x.y());
    out += ' ';
    append_g6(out, x.z());
    out += '\n';
  }
  out += "CELLS " + std::to_string(mesh.element_count()) + " " +
         std::to_string(5 * mesh.element_count()) + "\n";
  for (const auto& tet : mesh.elements) {
    out += "4 " + std::to_string(tet[0]) + " " + std::to_string(tet[1]) + " " +
           std::to_string(tet[2]) + " " + std::to_string(tet[3]) + "\n";
  }
  out += "CELL_TYPES " + std::to_string(mesh.element_count()) + "\n";
  for (Index e = 0; e < mesh.element_count(); ++e) out += "10\n";
  if (!node_values.empty()) {
    out += "POINT_DATA " + std::to_string(mesh.node_count()) + "\n";
    out += "SCALARS phi float 1\n";
    out += "LOOKUP_TABLE default\n";
    for (double v : node_values) {
      append_g6(out, v);
      out += '\n';
    }
  }
  commit_atomically(path, out);
}

void write_history_csv(std::span<const StepReport> reports,
                       const std::filesystem::path& path) {
  std::string out =
      "step,time,k,nodal_curvature_norm,l2_curvature_norm,area,triangles,"
      "cg_iters,neck_radius\n";
  for (const StepReport& r : reports) {
    out += std::to_string(r.step);
    out += ',';
    append_full(out, r.time);
    out += ',';
    append_full(out, r.dt);
    out += ',';
    append_full(out, r.nodal_curvature_norm);
    out += ',';
    append_full(out, r.l2_curvature_norm);
    out += ',';
    append_full(out, r.area);
    out += ',';
    out += std::to_string(r.triangle_count);
    out += ',';
    out += std::to_string(r.cg_iterations);
    out += ',';
    if (r.neck_radius) append_full(out, *r.neck_radius);
    out += '\n';
  }
  commit_atomically(path, out);
}

void write_operator(const SparseOperator& op,
                    const std::filesystem::path& path) {
  std::string out = std::to_string(op.size()) + " " +
                    std::to_string(op.stored_entries()) + "\n";
  for (Index i = 0; i < op.size(); ++i) {
    const auto cols = op.row_entries_cols(i);
    const auto values = op.row_entries_values(i);
    for (std::size_t k = 0; k < cols.size(); ++k) {
      out += std::to_string(i) + " " + std::to_string(cols[k]) + " ";
      append_full(out, values[k]);
      out += '\n';
    }
  }
  commit_atomically(path, out);
}

std::vector<double> interpolate_vertex_scalar(const SurfaceMesh& surface,
                                              const DofMap& dofs,
                                              std::span<const double> per_dof) {
  std::vector<double> out;
  out.reserve(surface.vertices.size());
  for (const SurfaceVertex& v : surface.vertices) {
    const Index da = dofs.dof_of_node[v.edge_a];
    const Index db = dofs.dof_of_node[v.edge_b];
    if (da < 0 || db < 0) {
      throw StructuralError("vertex interpolation: parent node has no dof");
    }
    out.push_back((1.0 - v.theta) * per_dof[da] + v.theta * per_dof[db]);
  }
  return out;
}

std::vector<Vec3> interpolate_vertex_vector(const SurfaceMesh& surface,
                                            std::span<const Vec3> per_node) {
  std::vector<Vec3> out;
  out.reserve(surface.vertices.size());
  for (const SurfaceVertex& v : surface.vertices) {
    out.push_back((1.0 - v.theta) * per_node[v.edge_a] +
                  v.theta * per_node[v.edge_b]);
  }
  return out;
}

}  // namespace minsurf

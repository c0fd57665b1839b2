#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "pdm/mesh.hpp"

namespace pdm {

// Plain-text mesh format (see README for the grammar). Lines starting with '#' are
// comments. Sections appear in this order:
//
//   nodes <N>            then N lines: id x y motion component tags
//   elements <M>         then M lines: n0 n1 n2 phantom ring_index
//   boundary_edges <K>   then K lines: n0 n1 tag
//   ring_links <R>       then R lines: b0 b1 t0 t1
//   ring_node_rows <S>   then S lines: count id...
//   ring_elem_rows <T>   then T lines: count id...
//
// motion is one of fixed|prescribed|free|axis; tags is a comma list or '-'.
// ring_index is -1 when absent. The two ring sections are optional.
void write_mesh_text(const Mesh& mesh, std::ostream& os);
Mesh read_mesh_text(std::istream& is);
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);
Mesh load_mesh(const std::filesystem::path& path);

struct VtkPointVectors {
  std::string name;
  std::vector<Vec2> values;
};
struct VtkPointScalars {
  std::string name;
  std::vector<double> values;
};
struct VtkCellInts {
  std::string name;
  std::vector<int> values;
};

struct VtkFields {
  std::vector<VtkPointVectors> point_vectors;
  std::vector<VtkPointScalars> point_scalars;
  std::vector<VtkCellInts> cell_ints;
};

/// VTK legacy ASCII UNSTRUCTURED_GRID with triangle cells.
void write_vtk(const Mesh& mesh, const VtkFields& fields, std::ostream& os,
               const std::string& title = "pdmum snapshot");
void write_vtk(const Mesh& mesh, const VtkFields& fields, const std::filesystem::path& path);

}  // namespace pdm

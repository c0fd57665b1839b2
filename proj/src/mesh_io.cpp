#include "pdm/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "pdm/errors.hpp"

namespace pdm {

namespace {

std::string_view motion_name(const Node& n) {
  switch (n.motion) {
    case MotionClass::fixed: return "fixed";
    case MotionClass::prescribed: return "prescribed";
    case MotionClass::free: return "free";
    case MotionClass::axis_constrained: return "axis";
  }
  return "free";
}

MotionClass parse_motion(const std::string& s) {
  if (s == "fixed") return MotionClass::fixed;
  if (s == "prescribed") return MotionClass::prescribed;
  if (s == "free") return MotionClass::free;
  if (s == "axis") return MotionClass::axis_constrained;
  throw InvalidArgument("unknown motion class '" + s + "'");
}

// Next non-comment, non-empty line.
bool next_line(std::istream& is, std::string& line) {
  while (std::getline(is, line)) {
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    return true;
  }
  return false;
}

std::size_t expect_header(std::istream& is, const std::string& keyword) {
  std::string line;
  if (!next_line(is, line)) throw InvalidArgument("mesh file ended before section '" + keyword + "'");
  std::istringstream ls(line);
  std::string word;
  std::size_t count = 0;
  if (!(ls >> word >> count) || word != keyword) {
    throw InvalidArgument("expected section '" + keyword + "', got: " + line);
  }
  return count;
}

std::istringstream record(std::istream& is, const std::string& section) {
  std::string line;
  if (!next_line(is, line)) throw InvalidArgument("truncated section '" + section + "'");
  return std::istringstream(line);
}

void write_rows(std::ostream& os, const std::string& name, const std::vector<std::vector<int>>& rows) {
  os << name << ' ' << rows.size() << '\n';
  for (const auto& row : rows) {
    os << row.size();
    for (int v : row) os << ' ' << v;
    os << '\n';
  }
}

std::vector<std::vector<int>> read_rows(std::istream& is, const std::string& name, std::size_t count) {
  std::vector<std::vector<int>> rows(count);
  for (auto& row : rows) {
    auto ls = record(is, name);
    std::size_t n = 0;
    ls >> n;
    row.resize(n);
    for (auto& v : row) {
      if (!(ls >> v)) throw InvalidArgument("malformed row in section '" + name + "'");
    }
  }
  return rows;
}

}  // namespace

void write_mesh_text(const Mesh& mesh, std::ostream& os) {
  os << "# pdmum mesh v1\n" << std::setprecision(17);
  os << "nodes " << mesh.nodes.size() << '\n';
  for (const auto& n : mesh.nodes) {
    os << n.id << ' ' << n.x.x << ' ' << n.x.y << ' ' << motion_name(n) << ' '
       << n.constrained_component << ' ';
    bool any = false;
    for (int t = 0; t < kBoundaryTagCount; ++t) {
      const auto tag = static_cast<BoundaryTag>(t);
      if (!n.tags.has(tag)) continue;
      os << (any ? "," : "") << to_string(tag);
      any = true;
    }
    os << (any ? "" : "-") << '\n';
  }
  os << "elements " << mesh.elements.size() << '\n';
  for (const auto& e : mesh.elements) {
    os << e.nodes[0] << ' ' << e.nodes[1] << ' ' << e.nodes[2] << ' ' << (e.phantom_member ? 1 : 0)
       << ' ' << e.ring_index.value_or(-1) << '\n';
  }
  os << "boundary_edges " << mesh.boundary_edges.size() << '\n';
  for (const auto& be : mesh.boundary_edges) {
    os << be.nodes[0] << ' ' << be.nodes[1] << ' ' << to_string(be.tag) << '\n';
  }
  os << "ring_links " << mesh.ring_links.size() << '\n';
  for (const auto& l : mesh.ring_links) {
    os << l.bottom[0] << ' ' << l.bottom[1] << ' ' << l.top[0] << ' ' << l.top[1] << '\n';
  }
  if (mesh.ring) {
    write_rows(os, "ring_node_rows", mesh.ring->node_rows);
    write_rows(os, "ring_elem_rows", mesh.ring->elem_rows);
  }
}

Mesh read_mesh_text(std::istream& is) {
  Mesh mesh;
  const auto n_nodes = expect_header(is, "nodes");
  mesh.nodes.resize(n_nodes);
  for (auto& n : mesh.nodes) {
    auto ls = record(is, "nodes");
    std::string motion, tags;
    if (!(ls >> n.id >> n.x.x >> n.x.y >> motion >> n.constrained_component >> tags)) {
      throw InvalidArgument("malformed node record");
    }
    n.motion = parse_motion(motion);
    if (tags != "-") {
      std::istringstream ts(tags);
      std::string name;
      while (std::getline(ts, name, ',')) {
        const auto tag = boundary_tag_from_string(name);
        if (!tag) throw InvalidArgument("unknown tag '" + name + "'");
        n.tags.add(*tag);
      }
    }
  }
  const auto n_elems = expect_header(is, "elements");
  mesh.elements.resize(n_elems);
  for (auto& e : mesh.elements) {
    auto ls = record(is, "elements");
    int phantom = 0, ring = -1;
    if (!(ls >> e.nodes[0] >> e.nodes[1] >> e.nodes[2] >> phantom >> ring)) {
      throw InvalidArgument("malformed element record");
    }
    e.phantom_member = phantom != 0;
    if (ring >= 0) e.ring_index = ring;
  }
  const auto n_edges = expect_header(is, "boundary_edges");
  mesh.boundary_edges.resize(n_edges);
  for (auto& be : mesh.boundary_edges) {
    auto ls = record(is, "boundary_edges");
    std::string tag;
    if (!(ls >> be.nodes[0] >> be.nodes[1] >> tag)) throw InvalidArgument("malformed boundary edge record");
    const auto parsed = boundary_tag_from_string(tag);
    if (!parsed) throw InvalidArgument("unknown tag '" + tag + "'");
    be.tag = *parsed;
  }
  const auto n_links = expect_header(is, "ring_links");
  mesh.ring_links.resize(n_links);
  for (auto& l : mesh.ring_links) {
    auto ls = record(is, "ring_links");
    if (!(ls >> l.bottom[0] >> l.bottom[1] >> l.top[0] >> l.top[1])) {
      throw InvalidArgument("malformed ring link record");
    }
  }
  std::string line;
  if (next_line(is, line)) {
    std::istringstream ls(line);
    std::string word;
    std::size_t count = 0;
    ls >> word >> count;
    if (word != "ring_node_rows") throw InvalidArgument("unexpected section: " + line);
    RingStructure ring;
    ring.node_rows = read_rows(is, "ring_node_rows", count);
    ring.elem_rows = read_rows(is, "ring_elem_rows", expect_header(is, "ring_elem_rows"));
    mesh.ring = std::move(ring);
  }
  return mesh;
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot open " + path.string() + " for writing");
  write_mesh_text(mesh, os);
}

Mesh load_mesh(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open mesh file " + path.string());
  return read_mesh_text(is);
}

void write_vtk(const Mesh& mesh, const VtkFields& fields, std::ostream& os, const std::string& title) {
  os << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  os << std::setprecision(12);
  os << "POINTS " << mesh.nodes.size() << " double\n";
  for (const auto& n : mesh.nodes) os << n.x.x << ' ' << n.x.y << " 0\n";
  os << "CELLS " << mesh.elements.size() << ' ' << 4 * mesh.elements.size() << '\n';
  for (const auto& e : mesh.elements) os << "3 " << e.nodes[0] << ' ' << e.nodes[1] << ' ' << e.nodes[2] << '\n';
  os << "CELL_TYPES " << mesh.elements.size() << '\n';
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) os << "5\n";

  if (!fields.cell_ints.empty()) {
    os << "CELL_DATA " << mesh.elements.size() << '\n';
    for (const auto& f : fields.cell_ints) {
      if (f.values.size() != mesh.elements.size()) throw InvalidArgument("cell field '" + f.name + "' has wrong size");
      os << "SCALARS " << f.name << " int 1\nLOOKUP_TABLE default\n";
      for (int v : f.values) os << v << '\n';
    }
  }
  if (!fields.point_vectors.empty() || !fields.point_scalars.empty()) {
    os << "POINT_DATA " << mesh.nodes.size() << '\n';
    for (const auto& f : fields.point_scalars) {
      if (f.values.size() != mesh.nodes.size()) throw InvalidArgument("point field '" + f.name + "' has wrong size");
      os << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : f.values) os << v << '\n';
    }
    for (const auto& f : fields.point_vectors) {
      if (f.values.size() != mesh.nodes.size()) throw InvalidArgument("point field '" + f.name + "' has wrong size");
      os << "VECTORS " << f.name << " double\n";
      for (const auto& v : f.values) os << v.x << ' ' << v.y << " 0\n";
    }
  }
}

void write_vtk(const Mesh& mesh, const VtkFields& fields, const std::filesystem::path& path) {
  std::ofstream os(path);
  if (!os) throw InvalidArgument("cannot open " + path.string() + " for writing");
  write_vtk(mesh, fields, os);
}

}  // namespace pdm

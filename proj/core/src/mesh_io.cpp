#include <algorithm>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "hemo/mesh.hpp"

namespace hemo {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MeshError("cannot open mesh file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <class T>
T expect(std::istream& in, const char* what) {
  T value{};
  if (!(in >> value)) throw MeshError(std::string("malformed mesh: expected ") + what);
  return value;
}

void expect_word(std::istream& in, std::string_view word) {
  const auto got = expect<std::string>(in, "keyword");
  if (got != word) {
    throw MeshError("malformed mesh: expected '" + std::string(word) + "', got '" + got + "'");
  }
}

}  // namespace

Mesh parse_mesh(std::string_view text) {
  std::istringstream in{std::string(text)};
  expect_word(in, "nodes");
  const auto n = expect<long long>(in, "node count");
  expect_word(in, "tets");
  const auto m = expect<long long>(in, "element count");
  if (n <= 0 || m <= 0) throw MeshError("malformed mesh: empty node or element list");

  std::vector<Vec3> nodes(static_cast<std::size_t>(n));
  for (auto& x : nodes) {
    x.x() = expect<double>(in, "coordinate");
    x.y() = expect<double>(in, "coordinate");
    x.z() = expect<double>(in, "coordinate");
  }
  std::vector<std::array<int, 4>> tets(static_cast<std::size_t>(m));
  for (auto& t : tets) {
    for (int& v : t) v = expect<int>(in, "element node index");
  }

  std::vector<FacetGroup> groups;
  std::string word;
  while (in >> word) {
    if (word != "surface") throw MeshError("malformed mesh: expected 'surface', got '" + word + "'");
    FacetGroup g;
    g.name = expect<std::string>(in, "surface name");
    g.tag = parse_facet_tag(expect<std::string>(in, "surface tag"));
    const auto k = expect<long long>(in, "triangle count");
    if (k < 0) throw MeshError("malformed mesh: negative triangle count");
    g.triangles.resize(static_cast<std::size_t>(k));
    for (auto& tri : g.triangles) {
      for (int& v : tri) v = expect<int>(in, "triangle node index");
    }
    for (const auto& other : groups) {
      if (other.name == g.name) throw MeshError("duplicate surface name '" + g.name + "'");
    }
    groups.push_back(std::move(g));
  }
  return Mesh(std::move(nodes), std::move(tets), std::move(groups));
}

Mesh load_mesh(const std::filesystem::path& path) { return parse_mesh(read_file(path)); }

std::string format_mesh(const Mesh& mesh) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "nodes " << mesh.num_nodes() << " tets " << mesh.num_tets() << '\n';
  for (const auto& x : mesh.nodes()) out << x.x() << ' ' << x.y() << ' ' << x.z() << '\n';
  for (const auto& t : mesh.tets()) out << t[0] << ' ' << t[1] << ' ' << t[2] << ' ' << t[3] << '\n';
  for (const auto& g : mesh.groups()) {
    out << "surface " << g.name << ' ' << to_string(g.tag) << ' ' << g.triangles.size() << '\n';
    for (const auto& tri : g.triangles) out << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  return out.str();
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw MeshError("cannot write " + tmp.string());
    out << format_mesh(mesh);
  }
  std::filesystem::rename(tmp, path);
}

Mesh import_vtk(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::string word;
  std::vector<Vec3> points;
  std::vector<std::vector<int>> cells;
  std::vector<int> types;
  while (in >> word) {
    if (word == "POINTS") {
      const auto n = expect<long long>(in, "point count");
      expect<std::string>(in, "point data type");
      points.resize(static_cast<std::size_t>(n));
      for (auto& x : points) {
        x.x() = expect<double>(in, "coordinate");
        x.y() = expect<double>(in, "coordinate");
        x.z() = expect<double>(in, "coordinate");
      }
    } else if (word == "CELLS") {
      const auto n = expect<long long>(in, "cell count");
      expect<long long>(in, "cell list size");
      cells.resize(static_cast<std::size_t>(n));
      for (auto& c : cells) {
        c.resize(static_cast<std::size_t>(expect<int>(in, "cell size")));
        for (int& v : c) v = expect<int>(in, "cell index");
      }
    } else if (word == "CELL_TYPES") {
      const auto n = expect<long long>(in, "cell type count");
      types.resize(static_cast<std::size_t>(n));
      for (int& t : types) t = expect<int>(in, "cell type");
    }
  }
  if (points.empty() || cells.size() != types.size()) throw MeshError("malformed VTK file " + path.string());

  std::vector<std::array<int, 4>> tets;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (types[c] != 10) continue;
    if (cells[c].size() != 4) throw MeshError("malformed VTK tetra cell");
    tets.push_back({cells[c][0], cells[c][1], cells[c][2], cells[c][3]});
  }
  if (tets.empty()) throw MeshError("VTK file has no tetra cells");

  std::map<std::array<int, 3>, std::pair<int, std::array<int, 3>>> faces;
  for (const auto& t : tets) {
    static constexpr int kFaces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    for (const auto& f : kFaces) {
      std::array<int, 3> tri{t[f[0]], t[f[1]], t[f[2]]};
      auto key = tri;
      std::sort(key.begin(), key.end());
      auto& slot = faces[key];
      ++slot.first;
      slot.second = tri;
    }
  }
  FacetGroup wall{"wall", FacetTag::wall, {}};
  for (const auto& [key, info] : faces) {
    if (info.first == 1) wall.triangles.push_back(info.second);
  }
  return Mesh(std::move(points), std::move(tets), {std::move(wall)});
}

}  // namespace hemo

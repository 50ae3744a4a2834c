#include "hemo/generators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace hemo {

Mesh structured_mesh(int nx, int ny, int nz, const std::function<Vec3(double, double, double)>& map,
                     const SideGroups& sides) {
  if (nx < 1 || ny < 1 || nz < 1) throw MeshError("structured mesh needs at least one cell per axis");
  const auto id = [&](int i, int j, int k) { return i + (nx + 1) * (j + (ny + 1) * k); };

  std::vector<Vec3> nodes;
  std::vector<std::array<int, 3>> ijk;
  nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1) * (nz + 1)));
  for (int k = 0; k <= nz; ++k) {
    for (int j = 0; j <= ny; ++j) {
      for (int i = 0; i <= nx; ++i) {
        nodes.push_back(map(double(i) / nx, double(j) / ny, double(k) / nz));
        ijk.push_back({i, j, k});
      }
    }
  }

  static constexpr std::array<std::array<int, 3>, 6> kPerms = {
      {{0, 1, 2}, {0, 2, 1}, {1, 0, 2}, {1, 2, 0}, {2, 0, 1}, {2, 1, 0}}};
  std::vector<std::array<int, 4>> tets;
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        for (const auto& p : kPerms) {
          std::array<int, 3> c{i, j, k};
          std::array<int, 4> t{};
          t[0] = id(c[0], c[1], c[2]);
          for (int s = 0; s < 3; ++s) {
            ++c[p[s]];
            t[s + 1] = id(c[0], c[1], c[2]);
          }
          std::array<Vec3, 4> x{nodes[t[0]], nodes[t[1]], nodes[t[2]], nodes[t[3]]};
          if (signed_volume(x) < 0.0) std::swap(t[1], t[2]);
          tets.push_back(t);
        }
      }
    }
  }

  // Boundary faces are classified by the grid side all three nodes lie on.
  std::map<std::array<int, 3>, int> face_count;
  for (const auto& t : tets) {
    static constexpr int kFaces[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    for (const auto& f : kFaces) {
      std::array<int, 3> key{t[f[0]], t[f[1]], t[f[2]]};
      std::sort(key.begin(), key.end());
      ++face_count[key];
    }
  }
  const std::array<int, 3> extent{nx, ny, nz};
  std::vector<FacetGroup> groups;
  std::map<std::string, std::size_t> by_name;
  for (int s = 0; s < 6; ++s) {
    if (!by_name.contains(sides.names[s])) {
      by_name[sides.names[s]] = groups.size();
      groups.push_back({sides.names[s], sides.tags[s], {}});
    }
  }
  for (const auto& [key, count] : face_count) {
    if (count != 1) continue;
    int side = -1;
    for (int axis = 0; axis < 3 && side < 0; ++axis) {
      for (int hi = 0; hi < 2; ++hi) {
        const int target = hi ? extent[axis] : 0;
        if (ijk[key[0]][axis] == target && ijk[key[1]][axis] == target && ijk[key[2]][axis] == target) {
          side = 2 * axis + hi;
          break;
        }
      }
    }
    if (side < 0) throw MeshError("structured mesh: unclassified boundary face");
    groups[by_name[sides.names[side]]].triangles.push_back(key);
  }
  return Mesh(std::move(nodes), std::move(tets), std::move(groups));
}

Mesh box_mesh(int nx, int ny, int nz, const Vec3& lengths, const SideGroups& sides) {
  return structured_mesh(
      nx, ny, nz,
      [&](double u, double v, double w) { return Vec3(u * lengths.x(), v * lengths.y(), w * lengths.z()); },
      sides);
}

Mesh pipe_mesh(const std::function<double(double)>& radius_of_z, double length, int n_cross,
               int n_axial) {
  SideGroups sides;
  sides.names = {"wall", "wall", "wall", "wall", "inlet", "outlet"};
  sides.tags = {FacetTag::wall, FacetTag::wall, FacetTag::wall,
                FacetTag::wall, FacetTag::inlet, FacetTag::outlet};
  return structured_mesh(
      n_cross, n_cross, n_axial,
      [&](double u, double v, double w) {
        // square-to-disk map; the square boundary lands exactly on the circle
        const double x = 2.0 * u - 1.0;
        const double y = 2.0 * v - 1.0;
        const double z = w * length;
        const double r = radius_of_z(z);
        return Vec3(r * x * std::sqrt(1.0 - 0.5 * y * y), r * y * std::sqrt(1.0 - 0.5 * x * x), z);
      },
      sides);
}

Mesh cylinder_mesh(double radius, double length, int n_cross, int n_axial) {
  return pipe_mesh([radius](double) { return radius; }, length, n_cross, n_axial);
}

Mesh nozzle_mesh(int n_cross, int n_axial) {
  // lengths in cm: inlet pipe, cone, throat, expanded outlet pipe
  constexpr double kInlet = 2.0, kCone = 2.0, kThroat = 2.0, kOutlet = 6.0;
  constexpr double kLength = kInlet + kCone + kThroat + kOutlet;
  constexpr double kWide = 0.6, kNarrow = 0.2;
  const auto radius = [](double z) {
    if (z <= kInlet) return kWide;
    if (z <= kInlet + kCone) return kWide + (kNarrow - kWide) * (z - kInlet) / kCone;
    if (z <= kInlet + kCone + kThroat + 1e-12) return kNarrow;
    return kWide;
  };
  return pipe_mesh(radius, kLength, n_cross, n_axial);
}

}  // namespace hemo

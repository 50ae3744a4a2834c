#include "hemo/mesh.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <unordered_map>

namespace hemo {

namespace {

using FaceKey = std::array<int, 3>;

FaceKey sorted_face(int a, int b, int c) {
  FaceKey k{a, b, c};
  std::sort(k.begin(), k.end());
  return k;
}

struct FaceKeyHash {
  std::size_t operator()(const FaceKey& k) const noexcept {
    std::size_t h = static_cast<std::size_t>(k[0]);
    h = h * 1000003u ^ static_cast<std::size_t>(k[1]);
    h = h * 1000003u ^ static_cast<std::size_t>(k[2]);
    return h;
  }
};

struct FaceInfo {
  int count = 0;
  int opposite = -1;  // node of the owning tet not on the face
  bool claimed = false;
};

Mat3 jacobian(const std::array<Vec3, 4>& x) {
  Mat3 j;
  j.col(0) = x[1] - x[0];
  j.col(1) = x[2] - x[0];
  j.col(2) = x[3] - x[0];
  return j;
}

// Reference-to-regular-simplex scaling for linear tets.
const Mat3& simplex_m() {
  static const Mat3 m = [] {
    Mat3 k;
    k << 2, 1, 1, 1, 2, 1, 1, 1, 2;
    return Mat3(0.5 * std::cbrt(2.0) * k);
  }();
  return m;
}

}  // namespace

std::string_view to_string(FacetTag tag) {
  switch (tag) {
    case FacetTag::inlet:
      return "inlet";
    case FacetTag::wall:
      return "wall";
    case FacetTag::outlet:
      return "outlet";
  }
  return "wall";
}

FacetTag parse_facet_tag(std::string_view text) {
  if (text == "inlet") return FacetTag::inlet;
  if (text == "wall") return FacetTag::wall;
  if (text == "outlet") return FacetTag::outlet;
  throw MeshError("unknown facet tag '" + std::string(text) + "'");
}

double signed_volume(const std::array<Vec3, 4>& x) { return jacobian(x).determinant() / 6.0; }

Mesh::Mesh(std::vector<Vec3> nodes, std::vector<std::array<int, 4>> tets,
           std::vector<FacetGroup> groups)
    : nodes_(std::move(nodes)), tets_(std::move(tets)), groups_(std::move(groups)) {
  validate_and_orient();
}

void Mesh::validate_and_orient() {
  const int n = static_cast<int>(nodes_.size());
  if (tets_.empty()) throw MeshError("mesh has no elements");

  inv_jac_.resize(tets_.size());
  volume_.resize(tets_.size());
  std::unordered_map<FaceKey, FaceInfo, FaceKeyHash> faces;
  faces.reserve(tets_.size() * 4);

  for (std::size_t e = 0; e < tets_.size(); ++e) {
    const auto& t = tets_[e];
    for (int v : t) {
      if (v < 0 || v >= n) {
        throw MeshError("element " + std::to_string(e) + " references unknown node " +
                        std::to_string(v));
      }
    }
    const auto x = tet_points(e);
    const Mat3 j = jacobian(x);
    const double det = j.determinant();
    const double scale = (x[1] - x[0]).norm() + (x[2] - x[0]).norm() + (x[3] - x[0]).norm();
    if (!(det > 1e-14 * scale * scale * scale)) {
      throw MeshError("inverted or degenerate element " + std::to_string(e) +
                      " (signed volume " + std::to_string(det / 6.0) + ")");
    }
    volume_[e] = det / 6.0;
    inv_jac_[e] = j.inverse();

    static constexpr int kFaces[4][4] = {{1, 2, 3, 0}, {0, 2, 3, 1}, {0, 1, 3, 2}, {0, 1, 2, 3}};
    for (const auto& f : kFaces) {
      auto& info = faces[sorted_face(t[f[0]], t[f[1]], t[f[2]])];
      ++info.count;
      info.opposite = t[f[3]];
      if (info.count > 2) throw MeshError("non-manifold face in element " + std::to_string(e));
    }
  }

  for (auto& group : groups_) {
    for (auto& tri : group.triangles) {
      for (int v : tri) {
        if (v < 0 || v >= n) {
          throw MeshError("surface '" + group.name + "' references unknown node " +
                          std::to_string(v));
        }
      }
      auto it = faces.find(sorted_face(tri[0], tri[1], tri[2]));
      if (it == faces.end() || it->second.count != 1) {
        throw MeshError("surface '" + group.name + "' contains a triangle that is not a boundary face");
      }
      if (it->second.claimed) {
        throw MeshError("boundary face claimed by more than one surface (at '" + group.name + "')");
      }
      it->second.claimed = true;
      const Vec3& a = node(tri[0]);
      const Vec3 normal = (node(tri[1]) - a).cross(node(tri[2]) - a);
      if (normal.dot(node(it->second.opposite) - a) > 0.0) std::swap(tri[1], tri[2]);
    }
  }

  std::size_t unclaimed = 0;
  for (const auto& [key, info] : faces) {
    if (info.count == 1 && !info.claimed) ++unclaimed;
  }
  if (unclaimed > 0) {
    throw MeshError("surface groups do not close the boundary: " + std::to_string(unclaimed) +
                    " boundary faces unassigned");
  }
}

std::size_t Mesh::group_index(std::string_view name) const {
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (groups_[g].name == name) return g;
  }
  throw MeshError("no surface named '" + std::string(name) + "'");
}

const FacetGroup& Mesh::group(std::string_view name) const { return groups_[group_index(name)]; }

std::vector<std::size_t> Mesh::groups_with_tag(FacetTag tag) const {
  std::vector<std::size_t> out;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (groups_[g].tag == tag) out.push_back(g);
  }
  return out;
}

Eigen::Matrix<double, 3, 4> Mesh::shape_gradients(std::size_t e) const {
  const Mat3& inv = inv_jac_[e];
  Eigen::Matrix<double, 3, 4> grad;
  grad.col(1) = inv.row(0).transpose();
  grad.col(2) = inv.row(1).transpose();
  grad.col(3) = inv.row(2).transpose();
  grad.col(0) = -(grad.col(1) + grad.col(2) + grad.col(3));
  return grad;
}

std::array<Vec3, 4> Mesh::tet_points(std::size_t e) const {
  const auto& t = tets_[e];
  return {node(t[0]), node(t[1]), node(t[2]), node(t[3])};
}

double Mesh::total_volume() const {
  double v = 0.0;
  for (double x : volume_) v += x;
  return v;
}

std::vector<int> Mesh::group_nodes(std::size_t g) const {
  std::vector<int> out;
  for (const auto& tri : groups_[g].triangles) out.insert(out.end(), tri.begin(), tri.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

MetricTensor metric_tensor(const std::array<Vec3, 4>& x) {
  const Mat3 j = jacobian(x);
  const double det = j.determinant();
  const double scale = (x[1] - x[0]).norm() + (x[2] - x[0]).norm() + (x[3] - x[0]).norm();
  if (!(std::abs(det) > 1e-14 * scale * scale * scale)) {
    throw MeshError("degenerate element: singular Jacobian");
  }
  const Mat3 dxi_dx = j.inverse();
  MetricTensor out;
  out.g = dxi_dx.transpose() * simplex_m() * dxi_dx;
  return out;
}

MetricTensor metric_tensor(const Mesh& mesh, std::size_t e) {
  const Mat3& dxi_dx = mesh.inverse_jacobian(e);
  MetricTensor out;
  out.g = dxi_dx.transpose() * simplex_m() * dxi_dx;
  return out;
}

double circumsphere_diameter(const std::array<Vec3, 4>& x) {
  Mat3 a;
  Vec3 rhs;
  for (int i = 0; i < 3; ++i) {
    a.row(i) = 2.0 * (x[i + 1] - x[0]).transpose();
    rhs(i) = x[i + 1].squaredNorm() - x[0].squaredNorm();
  }
  const Vec3 centre = a.partialPivLu().solve(rhs);
  return 2.0 * (centre - x[0]).norm();
}

Vec3 triangle_area_normal(const Mesh& mesh, const std::array<int, 3>& tri) {
  const Vec3& a = mesh.node(tri[0]);
  return (mesh.node(tri[1]) - a).cross(mesh.node(tri[2]) - a);
}

SurfacePlane fit_plane(const Mesh& mesh, std::size_t group) {
  const auto& tris = mesh.groups()[group].triangles;
  if (tris.empty()) throw MeshError("surface '" + mesh.groups()[group].name + "' is empty");
  SurfacePlane plane;
  Vec3 weighted = Vec3::Zero();
  Vec3 normal_sum = Vec3::Zero();
  for (const auto& tri : tris) {
    const Vec3 an = triangle_area_normal(mesh, tri);
    const double area = 0.5 * an.norm();
    plane.area += area;
    weighted += area * (mesh.node(tri[0]) + mesh.node(tri[1]) + mesh.node(tri[2])) / 3.0;
    normal_sum += an;
  }
  if (!(plane.area > 0.0)) throw MeshError("surface has zero area");
  plane.centroid = weighted / plane.area;
  plane.normal = normal_sum.normalized();

  const auto nodes = mesh.group_nodes(group);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Vec3& xi = mesh.node(nodes[i]);
    plane.max_deviation = std::max(plane.max_deviation, std::abs((xi - plane.centroid).dot(plane.normal)));
    for (std::size_t j = i + 1; j < nodes.size(); ++j) {
      plane.diameter = std::max(plane.diameter, (xi - mesh.node(nodes[j])).norm());
    }
  }
  return plane;
}

SurfaceField parabolic_inflow(const Mesh& mesh, std::size_t group, double flow_rate) {
  if (!std::isfinite(flow_rate)) throw MeshError("inflow rate is not finite");
  const SurfacePlane plane = fit_plane(mesh, group);
  if (plane.max_deviation > kPlanarityTolerance * plane.diameter) {
    throw MeshError("surface '" + mesh.groups()[group].name + "' is not planar");
  }

  // Boundary edges of the surface patch are those used by exactly one triangle.
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : mesh.groups()[group].triangles) {
    for (int k = 0; k < 3; ++k) {
      int a = tri[k], b = tri[(k + 1) % 3];
      if (a > b) std::swap(a, b);
      ++edge_count[{a, b}];
    }
  }
  double radius = 0.0;
  for (const auto& [edge, count] : edge_count) {
    if (count != 1) continue;
    radius = std::max(radius, (mesh.node(edge.first) - plane.centroid).norm());
    radius = std::max(radius, (mesh.node(edge.second) - plane.centroid).norm());
  }
  if (!(radius > 0.0)) throw MeshError("inlet has zero radius");

  const double v_max = 2.0 * flow_rate / (std::numbers::pi * radius * radius);
  SurfaceField field;
  field.nodes = mesh.group_nodes(group);
  field.values.reserve(field.nodes.size());
  for (int a : field.nodes) {
    const Vec3 d = mesh.node(a) - plane.centroid;
    const double axial = d.dot(plane.normal);
    const double r2 = std::max(0.0, d.squaredNorm() - axial * axial);
    const double shape = std::max(0.0, 1.0 - r2 / (radius * radius));
    field.values.push_back(-v_max * shape * plane.normal);
  }
  return field;
}

double surface_flow_rate(const Mesh& mesh, std::size_t group, const Vector& velocity) {
  if (velocity.size() != 3 * static_cast<Eigen::Index>(mesh.num_nodes())) {
    throw MeshError("velocity field size does not match mesh");
  }
  double q = 0.0;
  for (const auto& tri : mesh.groups()[group].triangles) {
    const Vec3 an = triangle_area_normal(mesh, tri);  // 2 * area * n
    Vec3 vsum = Vec3::Zero();
    for (int a : tri) vsum += velocity.segment<3>(3 * a);
    q += an.dot(vsum) / 6.0;
  }
  return q;
}

double surface_flow_rate(const Mesh& mesh, std::size_t group, const SurfaceField& field) {
  Vector full = Vector::Zero(3 * static_cast<Eigen::Index>(mesh.num_nodes()));
  std::vector<bool> present(mesh.num_nodes(), false);
  for (std::size_t i = 0; i < field.nodes.size(); ++i) {
    full.segment<3>(3 * field.nodes[i]) = field.values[i];
    present[static_cast<std::size_t>(field.nodes[i])] = true;
  }
  for (int a : mesh.group_nodes(group)) {
    if (!present[static_cast<std::size_t>(a)]) throw MeshError("velocity missing on surface node");
  }
  return surface_flow_rate(mesh, group, full);
}

Vector SurfaceWeights::to_nodal(std::size_t num_nodes) const {
  Vector out = Vector::Zero(3 * static_cast<Eigen::Index>(num_nodes));
  for (std::size_t i = 0; i < nodes.size(); ++i) out.segment<3>(3 * nodes[i]) = weights[i];
  return out;
}

SurfaceWeights surface_normal_weights(const Mesh& mesh, std::size_t group) {
  const auto& tris = mesh.groups()[group].triangles;
  if (tris.empty()) throw MeshError("surface '" + mesh.groups()[group].name + "' is empty");
  SurfaceWeights out;
  out.nodes = mesh.group_nodes(group);
  out.weights.assign(out.nodes.size(), Vec3::Zero());
  std::unordered_map<int, std::size_t> slot;
  for (std::size_t i = 0; i < out.nodes.size(); ++i) slot[out.nodes[i]] = i;
  for (const auto& tri : tris) {
    // integral of N_A over a linear triangle is area / 3
    const Vec3 contribution = triangle_area_normal(mesh, tri) / 6.0;
    for (int a : tri) out.weights[slot[a]] += contribution;
  }
  return out;
}

}  // namespace hemo

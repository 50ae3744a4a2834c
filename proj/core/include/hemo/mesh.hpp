#ifndef HEMO_MESH_HPP
#define HEMO_MESH_HPP

#include <array>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hemo/common.hpp"

namespace hemo {

enum class FacetTag { inlet, wall, outlet };

std::string_view to_string(FacetTag tag);
FacetTag parse_facet_tag(std::string_view text);

/// A named group of boundary triangles. After mesh construction every
/// triangle is ordered so that its right-hand normal points out of the fluid.
struct FacetGroup {
  std::string name;
  FacetTag tag = FacetTag::wall;
  std::vector<std::array<int, 3>> triangles;
};

/// Element-shape tensor G (units 1/length^2).
struct MetricTensor {
  Mat3 g = Mat3::Zero();

  double trace() const { return g.trace(); }
  /// G:G
  double contract() const { return g.cwiseProduct(g).sum(); }
};

/// Linear tetrahedral mesh with tagged boundary facet groups.
///
/// Immutable after construction. The constructor validates orientation,
/// facet references and that the groups partition the boundary exactly,
/// and caches per-element inverse Jacobians.
class Mesh {
 public:
  Mesh(std::vector<Vec3> nodes, std::vector<std::array<int, 4>> tets,
       std::vector<FacetGroup> groups);

  std::size_t num_nodes() const { return nodes_.size(); }
  std::size_t num_tets() const { return tets_.size(); }

  const std::vector<Vec3>& nodes() const { return nodes_; }
  const Vec3& node(int i) const { return nodes_[static_cast<std::size_t>(i)]; }
  const std::vector<std::array<int, 4>>& tets() const { return tets_; }
  const std::array<int, 4>& tet(std::size_t e) const { return tets_[e]; }
  const std::vector<FacetGroup>& groups() const { return groups_; }

  /// Index of the group called `name`; throws MeshError when absent.
  std::size_t group_index(std::string_view name) const;
  const FacetGroup& group(std::string_view name) const;

  /// Indices of groups carrying `tag`, in file order.
  std::vector<std::size_t> groups_with_tag(FacetTag tag) const;

  /// d(xi)/dx: row k holds the gradient of reference coordinate xi_k.
  const Mat3& inverse_jacobian(std::size_t e) const { return inv_jac_[e]; }
  double volume(std::size_t e) const { return volume_[e]; }
  /// Gradients of the four barycentric shape functions (columns).
  Eigen::Matrix<double, 3, 4> shape_gradients(std::size_t e) const;

  std::array<Vec3, 4> tet_points(std::size_t e) const;
  double total_volume() const;

  /// Sorted unique node indices touched by the group.
  std::vector<int> group_nodes(std::size_t g) const;

 private:
  void validate_and_orient();

  std::vector<Vec3> nodes_;
  std::vector<std::array<int, 4>> tets_;
  std::vector<FacetGroup> groups_;
  std::vector<Mat3> inv_jac_;
  std::vector<double> volume_;
};

/// Signed volume of the tet (positive for the reference orientation).
double signed_volume(const std::array<Vec3, 4>& x);

/// Metric tensor with the simplex symmetrisation matrix M applied; invariant
/// under any node ordering of the tet. Throws MeshError for degenerate input.
MetricTensor metric_tensor(const std::array<Vec3, 4>& x);
MetricTensor metric_tensor(const Mesh& mesh, std::size_t e);

/// Diameter of the circumscribed sphere, reported as the element size.
double circumsphere_diameter(const std::array<Vec3, 4>& x);

/// Outward area-weighted normal of an oriented triangle (length = 2 * area).
Vec3 triangle_area_normal(const Mesh& mesh, const std::array<int, 3>& tri);

/// Velocity values on a subset of nodes.
struct SurfaceField {
  std::vector<int> nodes;
  std::vector<Vec3> values;
};

/// Plane fitted to a facet group.
struct SurfacePlane {
  Vec3 centroid = Vec3::Zero();  ///< area centroid
  Vec3 normal = Vec3::UnitZ();   ///< outward unit normal
  double area = 0.0;
  double diameter = 0.0;
  double max_deviation = 0.0;  ///< largest node distance from the plane
};

SurfacePlane fit_plane(const Mesh& mesh, std::size_t group);

/// Relative planarity tolerance (deviation / diameter).
inline constexpr double kPlanarityTolerance = 1e-6;

/// Poiseuille profile v(r) = v_max (1 - r^2/R^2), v_max = 2Q/(pi R^2), directed
/// into the domain. R is the largest centroid distance of a node on the
/// group's boundary edges.
SurfaceField parabolic_inflow(const Mesh& mesh, std::size_t group, double flow_rate);

/// Q = integral of v.n over the group; `velocity` is a nodal field laid out as
/// [v0x v0y v0z v1x ...] over all mesh nodes.
double surface_flow_rate(const Mesh& mesh, std::size_t group, const Vector& velocity);
double surface_flow_rate(const Mesh& mesh, std::size_t group, const SurfaceField& field);

/// a_{Ai} = integral of N_A n_i over the group.
struct SurfaceWeights {
  std::vector<int> nodes;
  std::vector<Vec3> weights;

  /// Scatter into a 3 * num_nodes vector.
  Vector to_nodal(std::size_t num_nodes) const;
};

SurfaceWeights surface_normal_weights(const Mesh& mesh, std::size_t group);

// -- file formats ----------------------------------------------------------

/// Plain-text format: `nodes N tets M`, N coordinate lines, M tet lines, then
/// blocks `surface <name> <tag> K` followed by K triangle lines.
Mesh load_mesh(const std::filesystem::path& path);
Mesh parse_mesh(std::string_view text);
void save_mesh(const Mesh& mesh, const std::filesystem::path& path);
std::string format_mesh(const Mesh& mesh);

/// Legacy-VTK unstructured grid import (POINTS + tetra cells). Boundary facets
/// become one `wall` group.
Mesh import_vtk(const std::filesystem::path& path);

}  // namespace hemo

#endif  // HEMO_MESH_HPP

#ifndef HEMO_ASSEMBLY_HPP
#define HEMO_ASSEMBLY_HPP

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "hemo/common.hpp"
#include "hemo/genalpha.hpp"
#include "hemo/mesh.hpp"

namespace hemo {

/// Body force per unit mass, b(x, t).
using BodyForce = std::function<Vec3(const Vec3& x, double t)>;

struct FlowParams {
  double density = 1.065;    ///< g/cm^3
  double viscosity = 0.035;  ///< poise
  double backflow_beta = 0.2;
  /// Off forces tau_M = tau_C = 0 (plain Galerkin).
  bool stabilization = true;
  BodyForce body_force;  ///< empty means b = 0
};

inline constexpr double kStabCt = 4.0;
inline constexpr double kStabCi = 36.0;

struct StabParams {
  double tau_m = 0.0;
  double tau_c = 0.0;
};

StabParams stabilization_params(const Vec3& velocity, const MetricTensor& g, double dt,
                                double density, double viscosity);

/// Nodal fields over the whole mesh: v = [v0x v0y v0z v1x ...], p = [p0 p1 ...].
struct FlowState {
  Vector v;
  Vector p;

  static FlowState zero(std::size_t num_nodes);
};

/// Velocity unknown numbering with strong Dirichlet elimination. Pressure is
/// unconstrained, so pressure unknown i is node i.
class DofMap {
 public:
  /// Constrains every node touched by an inlet or wall group.
  explicit DofMap(const Mesh& mesh);
  /// Constrains every node touched by the listed groups.
  DofMap(const Mesh& mesh, std::span<const std::size_t> dirichlet_groups);

  /// Free velocity index of (node, component), or -1 when constrained.
  int velocity(int node, int component) const { return vel_[static_cast<std::size_t>(3 * node + component)]; }
  bool constrained(int node) const { return velocity(node, 0) < 0; }
  int num_velocity() const { return num_free_; }
  int num_pressure() const { return num_nodes_; }
  int num_nodes() const { return num_nodes_; }

  /// Full 3N nodal vector -> free velocity unknowns.
  Vector restrict_velocity(const Vector& full) const;
  /// full += free, scattered to the free slots.
  void add_velocity(const Vector& free, Vector& full) const;
  /// Constrained node indices in increasing order.
  const std::vector<int>& constrained_nodes() const { return fixed_; }

 private:
  void build(const Mesh& mesh, std::span<const std::size_t> groups);

  std::vector<int> vel_;
  std::vector<int> fixed_;
  int num_free_ = 0;
  int num_nodes_ = 0;
};

/// Load on one outlet (Neumann) group: either a uniform normal pressure,
/// h = -P n, or a prescribed traction field h(x) when `traction` is set.
struct OutletLoad {
  double pressure = 0.0;
  std::function<Vec3(const Vec3& x)> traction;
};

struct Residual {
  Vector momentum;    ///< R_m over free velocity unknowns
  Vector continuity;  ///< R_p over pressure unknowns
  Vector volume;      ///< R_m^vol
  Vector boundary;    ///< R_m^bc
  Vector backflow;    ///< R_m^bf
  std::vector<double> flow_rates;  ///< Q^k of the given velocity, per outlet

  double norm() const;
  /// [R_m; R_p]
  Vector stacked() const;
};

/// Weighted rank-one term w a a^T over free velocity unknowns.
struct RankOne {
  double weight = 0.0;
  Vector a;
};

/// [A B; C D] with A = F + sum_k w_k a_k a_k^T. The rank-one part is only
/// ever applied, never formed, except by the explicit to_dense helpers.
struct BlockTangent {
  SparseMatrix f;
  SparseMatrix b;
  SparseMatrix c;
  SparseMatrix d;
  std::vector<RankOne> rank_ones;

  Eigen::Index num_velocity() const { return f.rows(); }
  Eigen::Index num_pressure() const { return d.rows(); }
  Eigen::Index size() const { return f.rows() + d.rows(); }

  void apply_a(const Vector& x, Vector& y) const;
  /// diag(A), rank-one contributions w a_i^2 included.
  Vector diagonal_a() const;
  /// Stacked product [r_v; r_p] = [A B; C D] [x_v; x_p].
  void apply(const Vector& x, Vector& y) const;

  DenseMatrix dense_a() const;
  DenseMatrix to_dense() const;
  /// Whole block matrix with the rank-one terms added explicitly.
  SparseMatrix to_sparse() const;
};

/// Stacked block product; throws SolverError on a size mismatch.
Vector apply_block(const BlockTangent& t, const Vector& x);

/// Individual pieces of the element residual, selectable for testing.
enum AssemblyTerm : unsigned {
  kTermInertia = 1u << 0,
  kTermConvection = 1u << 1,
  kTermBodyForce = 1u << 2,
  kTermPressure = 1u << 3,
  kTermViscous = 1u << 4,
  kTermCross = 1u << 5,         ///< -grad w : (rho v' x v)
  kTermCrossAdjoint = 1u << 6,  ///< grad v : (rho w x v')
  kTermReynolds = 1u << 7,
  kTermGradDiv = 1u << 8,
  kTermContinuity = 1u << 9,
  kTermPspg = 1u << 10,
  kTermAll = (1u << 11) - 1,
};

/// Element-local vector ordering: (node a, component i) -> 3a + i, then
/// pressure for node a -> 12 + a.
using ElementVector = Eigen::Matrix<double, 16, 1>;

/// Residual and tangent evaluation for one mesh, Dirichlet layout and fluid.
///
/// Outlets are the mesh groups tagged `outlet`, in file order; every Neumann
/// load and flow rate is indexed the same way.
class Assembler {
 public:
  Assembler(const Mesh& mesh, DofMap dofs, FlowParams params);

  const Mesh& mesh() const { return *mesh_; }
  const DofMap& dofs() const { return dofs_; }
  const FlowParams& params() const { return params_; }
  std::size_t num_outlets() const { return outlets_.size(); }
  /// Mesh group index of outlet k.
  std::size_t outlet_group(std::size_t k) const { return outlets_[k]; }
  /// a^k over all 3N nodal slots, and restricted to free unknowns.
  const Vector& outlet_weights_full(std::size_t k) const { return a_full_[k]; }
  const Vector& outlet_weights(std::size_t k) const { return a_free_[k]; }

  /// Q^k = a^k . v over the full nodal velocity.
  std::vector<double> flow_rates(const Vector& v) const;

  /// y at t_{n+alpha_f}, ydot at t_{n+alpha_m}; `time` is where the body
  /// force is evaluated.
  Residual residual(const FlowState& y, const FlowState& ydot, std::span<const OutletLoad> loads,
                    double dt, double time) const;

  /// Consistent tangent with respect to the rate increment. outlet_m[k] is
  /// dP^k/dQ^k (zero for traction-loaded outlets).
  BlockTangent tangent(const FlowState& y, const FlowState& ydot, std::span<const double> outlet_m,
                       double dt, double time, const GenAlphaParams& ga) const;

  /// One element's volume residual restricted to the selected terms.
  ElementVector element_residual(std::size_t e, const FlowState& y, const FlowState& ydot, double dt,
                                 double time, unsigned terms = kTermAll) const;

 private:
  struct Element {
    Eigen::Matrix<double, 3, 4> grad;
    MetricTensor g;
    double volume = 0.0;
    std::array<Vec3, 4> qp;
  };
  struct Face {
    std::array<int, 3> nodes;
    Vec3 unit_normal;
    double area = 0.0;
    std::size_t outlet = 0;
  };

  void gather(std::size_t e, const FlowState& y, const FlowState& ydot, double* v, double* vdot,
              double* p) const;
  std::array<Vec3, 4> body_at(std::size_t e, double time) const;

  const Mesh* mesh_;
  DofMap dofs_;
  FlowParams params_;
  std::vector<Element> elements_;
  std::vector<Face> faces_;
  std::vector<std::size_t> outlets_;
  std::vector<Vector> a_full_;
  std::vector<Vector> a_free_;
  SparseMatrix pattern_f_, pattern_b_, pattern_c_, pattern_d_;
};

// Convenience wrappers.
Residual assemble_residual(const Assembler& assembler, const FlowState& y, const FlowState& ydot,
                           std::span<const OutletLoad> loads, double dt, double time = 0.0);
BlockTangent assemble_tangent(const Assembler& assembler, const FlowState& y, const FlowState& ydot,
                              std::span<const double> outlet_m, double dt, const GenAlphaParams& ga,
                              double time = 0.0);

}  // namespace hemo

#endif  // HEMO_ASSEMBLY_HPP

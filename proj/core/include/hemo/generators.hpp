#ifndef HEMO_GENERATORS_HPP
#define HEMO_GENERATORS_HPP

#include <array>
#include <functional>
#include <string>

#include "hemo/mesh.hpp"

namespace hemo {

/// Side order: x-, x+, y-, y+, z-, z+. Sides sharing a name form one group.
struct SideGroups {
  std::array<std::string, 6> names{"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"};
  std::array<FacetTag, 6> tags{FacetTag::inlet, FacetTag::outlet, FacetTag::wall,
                               FacetTag::wall,  FacetTag::wall,   FacetTag::wall};
};

/// Structured fixture: an nx*ny*nz hexahedral grid on the unit cube, each hex
/// split into six tets around its main diagonal, then pushed through `map`.
Mesh structured_mesh(int nx, int ny, int nz,
                     const std::function<Vec3(double, double, double)>& map,
                     const SideGroups& sides);

Mesh box_mesh(int nx, int ny, int nz, const Vec3& lengths, const SideGroups& sides = {});

/// Straight pipe along +z with inlet at z = 0 and outlet at z = length. The
/// cross-section is an n_cross x n_cross grid mapped onto the disk.
Mesh cylinder_mesh(double radius, double length, int n_cross, int n_axial);

/// Pipe with z-dependent radius (same topology as cylinder_mesh).
Mesh pipe_mesh(const std::function<double(double)>& radius_of_z, double length, int n_cross,
               int n_axial);

/// Converging cone, throat and sudden expansion, loosely shaped after the
/// idealised medical-device nozzle.
Mesh nozzle_mesh(int n_cross, int n_axial);

}  // namespace hemo

#endif  // HEMO_GENERATORS_HPP

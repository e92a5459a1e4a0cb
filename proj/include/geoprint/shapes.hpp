#pragma once

#include "geoprint/tet_mesh.hpp"

#include <functional>
#include <string>

namespace geoprint::shapes {

/// A procedurally meshed solid. Grids are split into tets with the six-tet Kuhn pattern.
struct Part {
    std::string name;
    TetMesh mesh;
    /// Per mesh face: 1 for boundary faces on the side walls of the generating grid,
    /// 0 for interior faces and for faces on the grid's bottom/top sheets.
    std::vector<char> lateral;
};

/// Structured grid description. Cell (i,j,k) spans grid nodes [i,i+1]x[j,j+1]x[k,k+1].
struct GridSpec {
    int ni = 1, nj = 1, nk = 1;
    bool periodic_i = false;
    std::function<bool(int, int, int)> active = [](int, int, int) { return true; };
    std::function<Vec3(int, int, int)> position;
    /// Cells in grid columns where this holds use the Kuhn pattern mirrored in i.
    std::function<bool(int)> mirror_i = [](int) { return false; };
};

Part from_grid(std::string name, const GridSpec& spec);

/// Axis-aligned box [0,wx]x[0,wy]x[0,h] with the given cell counts.
Part column(double wx, double wy, double h, int nx, int ny, int nz);
/// Ball of radius R centred at (0,0,R), from an n^3 cube grid pushed radially onto the ball.
Part sphere(double R, int n);
/// Upright cylinder of radius R on z = 0, from an n x n square grid pushed onto the disk.
Part cylinder(double R, double h, int n, int nz);
/// Square-section torus lying on z = 0: radii [R - a, R + a], height 2a.
Part torus(double R, double a, int n_theta, int n_r, int n_z);
/// Two-pronged part 44 mm tall: a 20 x 10 trunk of height 20 splits into two 6 mm prongs
/// rising a further 24 mm, sheared outward by 35 degrees.
Part y_part();
/// 90 mm tall tree: a 20 x 20 trunk forks at z = 30 into an 8 x 8 branch and an 8 x 20 arm,
/// and the arm forks again at z = 50 into two 8 x 8 branches. All gaps are 4 mm.
Part three_branch(double cell = 2.0);
/// Two separated columns standing on a common slab.
Part two_columns(double cell = 1.0);
/// 1 x 1 x 1 unit cube minimally meshed with 6 tets.
Part unit_cube();
/// A single regular tetrahedron with unit edges.
Part regular_tet();

}  // namespace geoprint::shapes

/// @file mesh.hpp
/// @brief Unit-cell meshes with a circular hole and their periodic tilings.
///
/// The cell mesh is a structured 2^L x 2^L grid (diagonals arranged in a
/// union-jack pattern about the cell centre, so the grid is mirror symmetric)
/// from which the hole is carved by cut-and-project: grid nodes close to the
/// circle are projected onto it, triangles crossing it are cut at exact
/// edge/circle intersections, and the covered part is discarded. Face nodes are
/// never touched, so they sit at dyadic coordinates k * 2^-L and opposite faces
/// match exactly.

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace perfhom {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Triangle = std::array<int, 3>;
using Edge = std::array<int, 2>;

struct CellGeometry {
    Vec2 hole_center{0.5, 0.5};
    double hole_radius = 0.25;  ///< 0 means no hole
    int refinement = 4;         ///< structured step h = 2^-refinement

    double grid_step() const;
    bool has_hole() const { return hole_radius > 0.0; }
    /// Throws InvalidGeometry unless the closed disk keeps a 2h margin to the faces.
    void validate() const;
};

enum class EdgeTag { Sigma, Gamma, CellFaceLeft, CellFaceRight, CellFaceBottom, CellFaceTop };

const char* tag_name(EdgeTag tag);

struct TriMesh {
    std::vector<Vec2> vertices;
    std::vector<Triangle> triangles;  ///< counterclockwise
    /// Boundary edges per tag, oriented as in their (single) adjacent triangle.
    std::map<EdgeTag, std::vector<Edge>> edge_groups;
    /// (master, slave) pairs; slave - master is exactly (1,0) or (0,1).
    std::vector<std::pair<int, int>> periodic_pairs;
    double h_max = 0.0;

    CellGeometry geometry;  ///< cell the mesh was built from
    int tiles = 1;          ///< N: the mesh covers N x N scaled cells
    /// Tiled meshes only: tile index (k1, k2) and source cell triangle per triangle.
    std::vector<std::array<int, 2>> triangle_tile;
    std::vector<int> cell_triangle;

    bool has_tag(EdgeTag tag) const;
    /// Throws MissingTag when the group is absent (an empty SIGMA group counts as absent).
    const std::vector<Edge>& edges(EdgeTag tag) const;

    /// Cell coordinate y = N x - k of a point inside triangle t.
    Vec2 micro(int t, const Vec2& x) const;
    /// Cell coordinate of a point on a boundary edge (tile taken from the point itself).
    Vec2 micro_on_edge(const Vec2& x) const;

    /// Stable 64-bit fingerprint of vertices and connectivity.
    std::uint64_t fingerprint() const;
};

struct QualityReport {
    double min_angle_deg = 0.0;
    double h_max = 0.0;
    double area = 0.0;
    double min_signed_area = 0.0;
    int vertex_count = 0;
    int edge_count = 0;
    int triangle_count = 0;
    int euler_characteristic = 0;
};

/// Thresholds (in units of h) controlling which grid nodes are projected onto the circle.
struct SnapParameters {
    double inside = 0.45;
    double outside = 0.3;
    double min_angle_deg = 15.0;  ///< MeshQuality is raised below this
};

TriMesh build_cell_mesh(const CellGeometry& geom, const SnapParameters& snap = {});

/// Stitches N x N copies of `cell` scaled by 1/N into a mesh of the unit square.
TriMesh tile_perforated_mesh(const TriMesh& cell, int n);

QualityReport mesh_quality_report(const TriMesh& mesh);

double triangle_area(const TriMesh& mesh, int t);
double min_angle_deg(const Vec2& a, const Vec2& b, const Vec2& c);

/// Plain-text dump: `tri-mesh v1 <nv> <nt>`, vertices, triangles, then `TAG n` edge blocks.
void write_mesh_text(const TriMesh& mesh, std::ostream& out);
TriMesh read_mesh_text(std::istream& in);

/// Legacy VTK (ASCII) unstructured grid, optionally with one point-data field.
void write_vtk(const TriMesh& mesh, std::ostream& out, std::span<const double> point_values = {},
               const char* field_name = "u");

}  // namespace perfhom

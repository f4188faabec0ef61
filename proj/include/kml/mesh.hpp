#pragma once

// Simplicial tetrahedral mesh with the full chain of oriented simplex
// tables (vertices, edges, faces, tets) and signed incidence matrices.
//
// Conventions:
//  * edges/faces/tets are stored with vertex indices sorted ascending;
//    the combinatorial orientation of every simplex is the sorted order.
//  * incidence follows the boundary of sorted simplices, so d(d(.)) = 0
//    holds exactly in integer arithmetic.
//  * the boundary complex reuses the volume simplex ids through the
//    boundary_* index maps; boundary simplices are sorted as well, which
//    makes the tangential trace a plain 0/1 restriction that commutes
//    with d exactly.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace kml {

using Vec3 = Eigen::Vector3d;
using SparseD = Eigen::SparseMatrix<double>;
using SparseI = Eigen::SparseMatrix<std::int64_t>;

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 2>> edges;   // sorted pairs
    std::vector<std::array<int, 3>> faces;   // sorted triples
    std::vector<std::array<int, 4>> tets;    // sorted quadruples

    // per-tet simplex lookup
    std::vector<std::array<int, 6>> tet_edges;
    std::vector<std::array<int, 4>> tet_faces;

    // signed incidence (rows: higher simplices, columns: lower)
    SparseI d0;  // edges x vertices
    SparseI d1;  // faces x edges
    SparseI d2;  // tets  x faces

    // boundary complex (indices into the volume tables)
    std::vector<int> boundary_faces;     // faces with exactly one tet
    std::vector<int> boundary_edges;     // edges of boundary faces
    std::vector<int> boundary_vertices;  // vertices of boundary faces
    std::vector<int> face_to_bface;      // -1 if interior
    std::vector<int> edge_to_bedge;      // -1 if interior
    std::vector<int> vertex_to_bvertex;  // -1 if interior
    std::vector<int> bface_tet;          // adjacent tet of each boundary face
    std::vector<Vec3> bface_normal;      // outward unit normals

    // boundary surface incidence, sorted-simplex convention
    SparseI bd0;  // boundary edges x boundary vertices
    SparseI bd1;  // boundary faces x boundary edges

    // boundary patch tag per boundary face: 0 lateral, 1 bottom (x1=0), 2 top
    std::vector<int> bface_patch;

    double mesh_size = 0.0;  // max edge length

    int n_simplices(int k) const;
    int n_boundary_simplices(int k) const;

    double tet_volume(int t) const;         // positive metric volume
    double signed_tet_volume(int t) const;  // sorted-order orientation
    Vec3 tet_centroid(int t) const;
    double face_area(int f) const;
    Vec3 face_centroid(int f) const;
    double edge_length(int e) const;
    double total_volume() const;
    double boundary_area() const;

    // gradients of the four barycentric coordinates of tet t
    std::array<Vec3, 4> barycentric_gradients(int t) const;

    // locate point by walking cell centroids (brute force, test helper)
    int locate_tet(const Vec3& p) const;
};

// Structured extruded-disk mesh of the cylinder [0,length] x disk(radius).
// resolution = number of concentric rings in the disk (>= 2) and of axial
// layers per unit length.
Mesh build_cylinder_mesh(double length, double radius, int resolution);

// Rebuild every derived table from vertices+tets (tets need not be sorted;
// negative-volume cells are rejected with the offending index).
Mesh build_from_cells(std::vector<Vec3> vertices,
                      std::vector<std::array<int, 4>> cells);

// Native ASCII format, header "KMLMESH 1".
Mesh read_kmlmesh(const std::string& path);
void write_kmlmesh(const Mesh& mesh, const std::string& path);

// Minimal Gmsh MSH 2.2 ASCII reader (nodes + type-4 tetrahedra).
Mesh read_gmsh22(const std::string& path);

// Cylinder mesh with a solid-torus tunnel removed (topology test helper).
// The tunnel is a ring of radius ring_r in the mid plane, tube radius tube_r.
Mesh build_excised_torus_mesh(int resolution, double ring_r, double tube_r);

}  // namespace kml

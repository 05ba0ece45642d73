#pragma once

#include "nfem/geometry.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace nfem {

// Triangle with counter-clockwise vertex order. `newest` is the local index
// (0..2) of the newest vertex; the refinement edge is the edge opposite it.
struct Triangle {
    std::array<int, 3> v{};
    int newest = 0;
    int generation = 0;
};

struct InteriorEdge {
    std::array<int, 2> v{}; // global vertex ids, v[0] < v[1]
    int tri_left = -1;      // first incident triangle
    int tri_right = -1;     // second incident triangle
    int le_left = -1;       // local edge index within tri_left
    int le_right = -1;
};

struct BoundaryEdge {
    std::array<int, 2> v{};
    int tri = -1;
    int le = -1;
};

struct EdgeGeometry {
    Vec2 normal1; // unit, outward with respect to the first incident triangle
    Vec2 normal2; // outward with respect to the second (boundary edge: -normal1)
    double length = 0.0;
    Vec2 midpoint;
};

// Conforming triangulation of a simply connected polygonal domain.
// Instances are immutable after construction; refinement returns a new mesh.
class Mesh {
public:
    std::vector<Vec2> vertices;
    std::vector<Triangle> triangles;
    std::vector<InteriorEdge> interior_edges;
    std::vector<BoundaryEdge> boundary_edges;
    // true for disk meshes: boundary vertices are snapped to the unit circle
    // after every refinement
    bool boundary_on_unit_circle = false;

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }

    // local edge le is opposite local vertex le
    std::array<int, 2> edge_vertices(int tri, int le) const {
        const auto& t = triangles[tri];
        return {t.v[(le + 1) % 3], t.v[(le + 2) % 3]};
    }

    double signed_area(int tri) const {
        const auto& t = triangles[tri];
        Vec2 a = vertices[t.v[0]], b = vertices[t.v[1]], c = vertices[t.v[2]];
        return 0.5 * cross(b - a, c - a);
    }
    double diameter(int tri) const;       // longest edge
    double inradius(int tri) const;       // area / semiperimeter
    double max_diameter() const;
    double total_area() const;

    EdgeGeometry interior_edge_geometry(int e) const;
    EdgeGeometry boundary_edge_geometry(int e) const;

    // rebuilds interior_edges/boundary_edges from the triangle list
    void build_edges();

    // Checks conformity (including hanging nodes), positive orientation,
    // two-sided interior edges with opposite unit normals, and the Euler
    // relation V - E + T = 1. Throws std::runtime_error on violation.
    void validate() const;
};

// inf over triangles of inradius / diameter
double shape_regularity(const Mesh& mesh);

struct RefineResult {
    Mesh mesh;
    std::vector<int> parent; // for each new triangle, its triangle in the input mesh
};

// Structured triangulation of the unit disk: central square of 4 triangles
// plus a ring of 12 triangles reaching the circle, uniformly red-refined
// `levels` times with boundary vertices projected onto the circle after
// every refinement. The construction is exactly symmetric under the
// dihedral group in floating point.
Mesh build_disk_mesh(int levels);

// Criss-cross triangulation of [-1,1]^2 (4 triangles per grid cell).
// Interior vertices are jittered by a displacement of norm at most
// jitter * (2/n), drawn from a seeded generator; jitter = 0 disables.
Mesh build_square_mesh(int n, std::uint64_t seed = 1, double jitter = 0.2);

// Red refinement: every triangle split into 4 similar children.
RefineResult uniform_refine(const Mesh& mesh);

// Newest-vertex bisection of the marked triangles with conforming closure.
RefineResult bisect(const Mesh& mesh, const std::vector<int>& marked);

void write_mesh(const Mesh& mesh, const std::string& path);
Mesh read_mesh(const std::string& path);

} // namespace nfem

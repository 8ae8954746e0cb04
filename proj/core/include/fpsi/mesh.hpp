#ifndef FPSI_MESH_HPP
#define FPSI_MESH_HPP

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <string>
#include <vector>

namespace fpsi {

enum class BoundaryTag { Interface, Outer };

/// Structured polar triangle mesh of the unit disk or of the annulus 1<|x|<2.
/// Nodes on |x|=1 and |x|=2 are snapped to the exact radius. Disk and annulus
/// meshes built with the same sector count share their interface node
/// positions, so traces are conforming across the interface.
struct Mesh2D {
    enum class Domain { Disk, Annulus };

    Domain domain = Domain::Disk;
    int rings   = 0;  // radial cell count
    int sectors = 0;  // angular cell count

    std::vector<Eigen::Vector2d> nodes;
    std::vector<std::array<int, 3>> tris;  // CCW vertex indices

    struct BEdge {
        int a, b;  // node indices, CCW along the boundary
        BoundaryTag tag;
    };
    std::vector<BEdge> bedges;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    int num_tris() const { return static_cast<int>(tris.size()); }

    double inner_radius() const { return domain == Domain::Disk ? 0.0 : 1.0; }
    double outer_radius() const { return domain == Domain::Disk ? 1.0 : 2.0; }

    double tri_area(int e) const;
    double total_area() const;

    /// Analytic point location using the structured layout. Points slightly
    /// outside the mesh polygon (e.g. on the circular boundary between nodes)
    /// are assigned the nearest cell; points outside the radial range of the
    /// domain return -1.
    int locate(const Eigen::Vector2d& x) const;

    /// Barycentric coordinates of x in triangle e (may be negative outside).
    Eigen::Vector3d barycentric(int e, const Eigen::Vector2d& x) const;
};

/// rings = 3*2^level radial cells, sectors = 12*2^level.
Mesh2D build_disk_mesh(int refine_level);
Mesh2D build_annulus_mesh(int refine_level);

void write_mesh(std::ostream& os, const Mesh2D& mesh);
Mesh2D read_mesh(std::istream& is);
void save_mesh(const std::string& path, const Mesh2D& mesh);
Mesh2D load_mesh(const std::string& path);

/// Consistency audit: orientation, positive areas, edge incidence counts
/// (interior edges twice, boundary edges once), snapped boundary radii,
/// boundary tag closure. Throws std::runtime_error on failure.
void audit_mesh(const Mesh2D& mesh);

}  // namespace fpsi

#endif

#include "fpsi/mesh.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fpsi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int wrap(int j, int n) { return ((j % n) + n) % n; }

}  // namespace

double Mesh2D::tri_area(int e) const {
    const auto& t = tris[e];
    Eigen::Vector2d d1 = nodes[t[1]] - nodes[t[0]];
    Eigen::Vector2d d2 = nodes[t[2]] - nodes[t[0]];
    return 0.5 * (d1.x() * d2.y() - d1.y() * d2.x());
}

double Mesh2D::total_area() const {
    double a = 0.0;
    for (int e = 0; e < num_tris(); ++e) a += tri_area(e);
    return a;
}

Eigen::Vector3d Mesh2D::barycentric(int e, const Eigen::Vector2d& x) const {
    const auto& t = tris[e];
    const Eigen::Vector2d& p0 = nodes[t[0]];
    const Eigen::Vector2d& p1 = nodes[t[1]];
    const Eigen::Vector2d& p2 = nodes[t[2]];
    double det = (p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y());
    double l1 = ((x.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (x.y() - p0.y())) / det;
    double l2 = ((p1.x() - p0.x()) * (x.y() - p0.y()) - (x.x() - p0.x()) * (p1.y() - p0.y())) / det;
    return {1.0 - l1 - l2, l1, l2};
}

int Mesh2D::locate(const Eigen::Vector2d& x) const {
    double r = x.norm();
    double theta = std::atan2(x.y(), x.x());
    if (theta < 0) theta += kTwoPi;
    int j0 = wrap(static_cast<int>(std::floor(theta / (kTwoPi / sectors))), sectors);

    const double tol = 1e-9;
    int k0;
    if (domain == Domain::Disk) {
        if (r > 1.0 + tol) return -1;
        k0 = std::min(static_cast<int>(std::floor(r * rings)), rings - 1);
    } else {
        if (r < 1.0 - tol || r > 2.0 + tol) return -1;
        k0 = std::min(std::max(static_cast<int>(std::floor((r - 1.0) * rings)), 0), rings - 1);
    }

    // The polar cell guess can be off by one ring near the polygonal ring
    // chords (and by one sector from angular roundoff), so search the
    // neighborhood and keep the best triangle. Points inside the domain radii
    // but outside the polygon (boundary sagitta region) map to the nearest
    // triangle; the caller clamps barycentric coordinates there.
    int best = -1;
    double best_min = -1e300;
    for (int dk = -1; dk <= 1; ++dk) {
        int k = k0 + dk;
        if (k < 0 || k >= rings) continue;
        for (int dj = -1; dj <= 1; ++dj) {
            int j = wrap(j0 + dj, sectors);
            int first, count;
            if (domain == Domain::Disk && k == 0) {
                first = j;
                count = 1;
            } else {
                int kk = domain == Domain::Disk ? k - 1 : k;
                first = (domain == Domain::Disk ? sectors : 0) + kk * 2 * sectors + 2 * j;
                count = 2;
            }
            for (int e = first; e < first + count; ++e) {
                double bmin = barycentric(e, x).minCoeff();
                if (bmin > best_min) {
                    best_min = bmin;
                    best = e;
                }
                if (bmin >= -1e-12) return e;
            }
        }
    }
    return best;
}

namespace {

Mesh2D build_polar(Mesh2D::Domain domain, int refine_level) {
    if (refine_level < 0) throw std::runtime_error("refine_level must be >= 0");
    Mesh2D m;
    m.domain = domain;
    m.rings = 3 << refine_level;
    m.sectors = 12 << refine_level;
    const int R = m.rings, S = m.sectors;
    const double r0 = m.inner_radius(), r1 = m.outer_radius();

    auto ring_radius = [&](int i) {  // i = 0..R radial node index
        if (domain == Mesh2D::Domain::Disk) return r1 * static_cast<double>(i) / R;
        return r0 + (r1 - r0) * static_cast<double>(i) / R;
    };

    std::vector<int> ring_start;  // node index of first node of radial ring i
    if (domain == Mesh2D::Domain::Disk) {
        m.nodes.push_back({0.0, 0.0});
        ring_start.resize(R + 1, -1);
        for (int i = 1; i <= R; ++i) {
            ring_start[i] = m.num_nodes();
            double r = ring_radius(i);
            for (int j = 0; j < S; ++j) {
                double z = kTwoPi * j / S;
                m.nodes.push_back({r * std::cos(z), r * std::sin(z)});
            }
        }
    } else {
        ring_start.resize(R + 1, -1);
        for (int i = 0; i <= R; ++i) {
            ring_start[i] = m.num_nodes();
            double r = ring_radius(i);
            for (int j = 0; j < S; ++j) {
                double z = kTwoPi * j / S;
                m.nodes.push_back({r * std::cos(z), r * std::sin(z)});
            }
        }
    }

    auto node = [&](int i, int j) {
        if (domain == Mesh2D::Domain::Disk && i == 0) return 0;
        return ring_start[i] + wrap(j, S);
    };

    if (domain == Mesh2D::Domain::Disk) {
        for (int j = 0; j < S; ++j) m.tris.push_back({0, node(1, j), node(1, j + 1)});
        for (int k = 1; k < R; ++k)
            for (int j = 0; j < S; ++j) {
                m.tris.push_back({node(k, j), node(k + 1, j), node(k + 1, j + 1)});
                m.tris.push_back({node(k, j), node(k + 1, j + 1), node(k, j + 1)});
            }
        for (int j = 0; j < S; ++j)
            m.bedges.push_back({node(R, j), node(R, j + 1), BoundaryTag::Interface});
    } else {
        for (int k = 0; k < R; ++k)
            for (int j = 0; j < S; ++j) {
                m.tris.push_back({node(k, j), node(k + 1, j), node(k + 1, j + 1)});
                m.tris.push_back({node(k, j), node(k + 1, j + 1), node(k, j + 1)});
            }
        for (int j = 0; j < S; ++j)
            m.bedges.push_back({node(0, j), node(0, j + 1), BoundaryTag::Interface});
        for (int j = 0; j < S; ++j)
            m.bedges.push_back({node(R, j), node(R, j + 1), BoundaryTag::Outer});
    }
    return m;
}

}  // namespace

Mesh2D build_disk_mesh(int refine_level) { return build_polar(Mesh2D::Domain::Disk, refine_level); }
Mesh2D build_annulus_mesh(int refine_level) { return build_polar(Mesh2D::Domain::Annulus, refine_level); }

void write_mesh(std::ostream& os, const Mesh2D& m) {
    os.precision(17);
    os << "fpsi-mesh 1\n";
    os << "domain " << (m.domain == Mesh2D::Domain::Disk ? "disk" : "annulus") << "\n";
    os << "rings " << m.rings << " sectors " << m.sectors << "\n";
    os << "nodes " << m.num_nodes() << "\n";
    for (const auto& p : m.nodes) os << p.x() << " " << p.y() << "\n";
    os << "tris " << m.num_tris() << "\n";
    for (const auto& t : m.tris) os << t[0] << " " << t[1] << " " << t[2] << "\n";
    os << "bedges " << m.bedges.size() << "\n";
    for (const auto& e : m.bedges)
        os << e.a << " " << e.b << " " << (e.tag == BoundaryTag::Interface ? "interface" : "outer")
           << "\n";
}

Mesh2D read_mesh(std::istream& is) {
    auto fail = [](const std::string& what) -> void {
        throw std::runtime_error("mesh read: " + what);
    };
    std::string word;
    int version = 0;
    is >> word >> version;
    if (word != "fpsi-mesh" || version != 1) fail("bad header");
    Mesh2D m;
    is >> word;
    if (word != "domain") fail("expected domain");
    is >> word;
    if (word == "disk")
        m.domain = Mesh2D::Domain::Disk;
    else if (word == "annulus")
        m.domain = Mesh2D::Domain::Annulus;
    else
        fail("unknown domain");
    is >> word >> m.rings >> word >> m.sectors;
    int n = 0;
    is >> word >> n;
    if (word != "nodes" || n < 0) fail("expected nodes");
    m.nodes.resize(n);
    for (auto& p : m.nodes) is >> p.x() >> p.y();
    is >> word >> n;
    if (word != "tris" || n < 0) fail("expected tris");
    m.tris.resize(n);
    for (auto& t : m.tris) is >> t[0] >> t[1] >> t[2];
    is >> word >> n;
    if (word != "bedges" || n < 0) fail("expected bedges");
    m.bedges.resize(n);
    for (auto& e : m.bedges) {
        is >> e.a >> e.b >> word;
        if (word == "interface")
            e.tag = BoundaryTag::Interface;
        else if (word == "outer")
            e.tag = BoundaryTag::Outer;
        else
            fail("unknown boundary tag");
    }
    if (!is) fail("truncated file");
    audit_mesh(m);
    return m;
}

void save_mesh(const std::string& path, const Mesh2D& mesh) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    write_mesh(os, mesh);
}

Mesh2D load_mesh(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    return read_mesh(is);
}

void audit_mesh(const Mesh2D& m) {
    auto fail = [](const std::string& what) -> void {
        throw std::runtime_error("mesh audit: " + what);
    };
    if (m.num_nodes() == 0 || m.num_tris() == 0) fail("empty mesh");

    for (int e = 0; e < m.num_tris(); ++e) {
        for (int v : m.tris[e])
            if (v < 0 || v >= m.num_nodes()) fail("triangle vertex out of range");
        if (m.tri_area(e) <= 0.0) fail("non-positive triangle area");
    }

    std::map<std::pair<int, int>, int> edge_count;
    auto key = [](int a, int b) { return std::make_pair(std::min(a, b), std::max(a, b)); };
    for (const auto& t : m.tris)
        for (int i = 0; i < 3; ++i) edge_count[key(t[i], t[(i + 1) % 3])] += 1;

    std::map<std::pair<int, int>, int> bedge_seen;
    for (const auto& e : m.bedges) {
        if (e.a < 0 || e.a >= m.num_nodes() || e.b < 0 || e.b >= m.num_nodes())
            fail("boundary edge node out of range");
        bedge_seen[key(e.a, e.b)] += 1;
    }
    for (const auto& [k, c] : edge_count) {
        if (c > 2) fail("edge shared by more than two triangles");
        if (c == 1 && !bedge_seen.count(k)) fail("untagged boundary edge");
        if (c == 2 && bedge_seen.count(k)) fail("interior edge tagged as boundary");
    }
    for (const auto& [k, c] : bedge_seen) {
        if (c != 1) fail("duplicate boundary edge");
        if (!edge_count.count(k) || edge_count.at(k) != 1) fail("boundary edge not on mesh boundary");
    }

    const double snap_tol = 1e-12;
    for (const auto& e : m.bedges) {
        double want = (e.tag == BoundaryTag::Interface)
                          ? (m.domain == Mesh2D::Domain::Disk ? 1.0 : 1.0)
                          : 2.0;
        for (int v : {e.a, e.b})
            if (std::abs(m.nodes[v].norm() - want) > snap_tol) fail("boundary node not snapped");
    }

    double exact = (m.domain == Mesh2D::Domain::Disk) ? std::numbers::pi : 3.0 * std::numbers::pi;
    if (std::abs(m.total_area() - exact) > 0.05 * exact) fail("total area off by more than 5%");
}

}  // namespace fpsi

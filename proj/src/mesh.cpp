#include "kml/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace kml {

namespace {

std::array<int, 2> sorted2(int a, int b) {
    if (a > b) std::swap(a, b);
    return {a, b};
}

std::array<int, 3> sorted3(int a, int b, int c) {
    std::array<int, 3> s{a, b, c};
    std::sort(s.begin(), s.end());
    return s;
}

}  // namespace

int Mesh::n_simplices(int k) const {
    switch (k) {
        case 0: return static_cast<int>(vertices.size());
        case 1: return static_cast<int>(edges.size());
        case 2: return static_cast<int>(faces.size());
        case 3: return static_cast<int>(tets.size());
        default: throw std::invalid_argument("simplex degree must be 0..3");
    }
}

int Mesh::n_boundary_simplices(int k) const {
    switch (k) {
        case 0: return static_cast<int>(boundary_vertices.size());
        case 1: return static_cast<int>(boundary_edges.size());
        case 2: return static_cast<int>(boundary_faces.size());
        default: throw std::invalid_argument("boundary simplex degree must be 0..2");
    }
}

double Mesh::signed_tet_volume(int t) const {
    const auto& T = tets[t];
    Eigen::Matrix3d E;
    E.col(0) = vertices[T[1]] - vertices[T[0]];
    E.col(1) = vertices[T[2]] - vertices[T[0]];
    E.col(2) = vertices[T[3]] - vertices[T[0]];
    return E.determinant() / 6.0;
}

double Mesh::tet_volume(int t) const { return std::abs(signed_tet_volume(t)); }

Vec3 Mesh::tet_centroid(int t) const {
    const auto& T = tets[t];
    return 0.25 * (vertices[T[0]] + vertices[T[1]] + vertices[T[2]] + vertices[T[3]]);
}

double Mesh::face_area(int f) const {
    const auto& F = faces[f];
    return 0.5 * (vertices[F[1]] - vertices[F[0]]).cross(vertices[F[2]] - vertices[F[0]]).norm();
}

Vec3 Mesh::face_centroid(int f) const {
    const auto& F = faces[f];
    return (vertices[F[0]] + vertices[F[1]] + vertices[F[2]]) / 3.0;
}

double Mesh::edge_length(int e) const {
    return (vertices[edges[e][1]] - vertices[edges[e][0]]).norm();
}

double Mesh::total_volume() const {
    double v = 0.0;
    for (int t = 0; t < n_simplices(3); ++t) v += tet_volume(t);
    return v;
}

double Mesh::boundary_area() const {
    double a = 0.0;
    for (int f : boundary_faces) a += face_area(f);
    return a;
}

std::array<Vec3, 4> Mesh::barycentric_gradients(int t) const {
    const auto& T = tets[t];
    Eigen::Matrix3d E;
    E.col(0) = vertices[T[1]] - vertices[T[0]];
    E.col(1) = vertices[T[2]] - vertices[T[0]];
    E.col(2) = vertices[T[3]] - vertices[T[0]];
    Eigen::Matrix3d Einv = E.inverse();
    std::array<Vec3, 4> g;
    g[1] = Einv.row(0);
    g[2] = Einv.row(1);
    g[3] = Einv.row(2);
    g[0] = -(g[1] + g[2] + g[3]);
    return g;
}

int Mesh::locate_tet(const Vec3& p) const {
    for (int t = 0; t < n_simplices(3); ++t) {
        const auto& T = tets[t];
        auto g = barycentric_gradients(t);
        bool inside = true;
        for (int i = 0; i < 4 && inside; ++i) {
            double lam = 1.0 / 4.0 + g[i].dot(p - tet_centroid(t));
            if (lam < -1e-10) inside = false;
        }
        if (inside) return t;
    }
    return -1;
}

Mesh build_from_cells(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> cells) {
    Mesh m;
    m.vertices = std::move(vertices);

    m.tets.reserve(cells.size());
    for (std::size_t c = 0; c < cells.size(); ++c) {
        std::array<int, 4> T = cells[c];
        std::sort(T.begin(), T.end());
        m.tets.push_back(T);
    }

    // zero-volume guard
    for (std::size_t t = 0; t < m.tets.size(); ++t) {
        if (m.tet_volume(static_cast<int>(t)) < 1e-14) {
            throw std::runtime_error("degenerate tetrahedron in cell " + std::to_string(t));
        }
    }

    // edge and face tables
    std::map<std::array<int, 2>, int> edge_id;
    std::map<std::array<int, 3>, int> face_id;
    m.tet_edges.resize(m.tets.size());
    m.tet_faces.resize(m.tets.size());
    static const int edge_local[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
    static const int face_local[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};
    for (std::size_t t = 0; t < m.tets.size(); ++t) {
        const auto& T = m.tets[t];
        for (int le = 0; le < 6; ++le) {
            auto key = sorted2(T[edge_local[le][0]], T[edge_local[le][1]]);
            auto [it, inserted] = edge_id.try_emplace(key, static_cast<int>(m.edges.size()));
            if (inserted) m.edges.push_back(key);
            m.tet_edges[t][le] = it->second;
        }
        for (int lf = 0; lf < 4; ++lf) {
            auto key = sorted3(T[face_local[lf][0]], T[face_local[lf][1]], T[face_local[lf][2]]);
            auto [it, inserted] = face_id.try_emplace(key, static_cast<int>(m.faces.size()));
            if (inserted) m.faces.push_back(key);
            m.tet_faces[t][lf] = it->second;
        }
    }

    // incidence matrices on sorted simplices
    {
        std::vector<Eigen::Triplet<std::int64_t>> tr;
        tr.reserve(m.edges.size() * 2);
        for (std::size_t e = 0; e < m.edges.size(); ++e) {
            tr.emplace_back(static_cast<int>(e), m.edges[e][0], -1);
            tr.emplace_back(static_cast<int>(e), m.edges[e][1], +1);
        }
        m.d0.resize(static_cast<int>(m.edges.size()), static_cast<int>(m.vertices.size()));
        m.d0.setFromTriplets(tr.begin(), tr.end());
    }
    {
        std::vector<Eigen::Triplet<std::int64_t>> tr;
        tr.reserve(m.faces.size() * 3);
        for (std::size_t f = 0; f < m.faces.size(); ++f) {
            const auto& F = m.faces[f];
            tr.emplace_back(static_cast<int>(f), edge_id.at(sorted2(F[1], F[2])), +1);
            tr.emplace_back(static_cast<int>(f), edge_id.at(sorted2(F[0], F[2])), -1);
            tr.emplace_back(static_cast<int>(f), edge_id.at(sorted2(F[0], F[1])), +1);
        }
        m.d1.resize(static_cast<int>(m.faces.size()), static_cast<int>(m.edges.size()));
        m.d1.setFromTriplets(tr.begin(), tr.end());
    }
    {
        std::vector<Eigen::Triplet<std::int64_t>> tr;
        tr.reserve(m.tets.size() * 4);
        for (std::size_t t = 0; t < m.tets.size(); ++t) {
            const auto& T = m.tets[t];
            tr.emplace_back(static_cast<int>(t), face_id.at(sorted3(T[1], T[2], T[3])), +1);
            tr.emplace_back(static_cast<int>(t), face_id.at(sorted3(T[0], T[2], T[3])), -1);
            tr.emplace_back(static_cast<int>(t), face_id.at(sorted3(T[0], T[1], T[3])), +1);
            tr.emplace_back(static_cast<int>(t), face_id.at(sorted3(T[0], T[1], T[2])), -1);
        }
        m.d2.resize(static_cast<int>(m.tets.size()), static_cast<int>(m.faces.size()));
        m.d2.setFromTriplets(tr.begin(), tr.end());
    }

    // boundary complex
    std::vector<int> face_tet_count(m.faces.size(), 0);
    std::vector<int> face_some_tet(m.faces.size(), -1);
    std::vector<int> face_opposite_vertex(m.faces.size(), -1);
    for (std::size_t t = 0; t < m.tets.size(); ++t) {
        const auto& T = m.tets[t];
        for (int lf = 0; lf < 4; ++lf) {
            int f = m.tet_faces[t][lf];
            face_tet_count[f]++;
            face_some_tet[f] = static_cast<int>(t);
            face_opposite_vertex[f] = T[lf];  // face_local[lf] omits local vertex lf
        }
    }
    m.face_to_bface.assign(m.faces.size(), -1);
    for (std::size_t f = 0; f < m.faces.size(); ++f) {
        if (face_tet_count[f] == 1) {
            m.face_to_bface[f] = static_cast<int>(m.boundary_faces.size());
            m.boundary_faces.push_back(static_cast<int>(f));
            m.bface_tet.push_back(face_some_tet[f]);
        } else if (face_tet_count[f] != 2) {
            throw std::runtime_error("non-manifold face " + std::to_string(f));
        }
    }

    m.edge_to_bedge.assign(m.edges.size(), -1);
    m.vertex_to_bvertex.assign(m.vertices.size(), -1);
    for (int f : m.boundary_faces) {
        const auto& F = m.faces[f];
        for (int i = 0; i < 3; ++i) {
            if (m.vertex_to_bvertex[F[i]] < 0) {
                m.vertex_to_bvertex[F[i]] = static_cast<int>(m.boundary_vertices.size());
                m.boundary_vertices.push_back(F[i]);
            }
        }
        for (auto pr : {sorted2(F[0], F[1]), sorted2(F[0], F[2]), sorted2(F[1], F[2])}) {
            int e = edge_id.at(pr);
            if (m.edge_to_bedge[e] < 0) {
                m.edge_to_bedge[e] = static_cast<int>(m.boundary_edges.size());
                m.boundary_edges.push_back(e);
            }
        }
    }

    // outward normals
    m.bface_normal.resize(m.boundary_faces.size());
    for (std::size_t bf = 0; bf < m.boundary_faces.size(); ++bf) {
        int f = m.boundary_faces[bf];
        const auto& F = m.faces[f];
        Vec3 n = (m.vertices[F[1]] - m.vertices[F[0]]).cross(m.vertices[F[2]] - m.vertices[F[0]]);
        n.normalize();
        Vec3 to_opp = m.vertices[face_opposite_vertex[f]] - m.face_centroid(f);
        if (n.dot(to_opp) > 0) n = -n;
        m.bface_normal[bf] = n;
    }

    // boundary incidence (same sorted-simplex convention)
    {
        std::vector<Eigen::Triplet<std::int64_t>> tr;
        for (std::size_t be = 0; be < m.boundary_edges.size(); ++be) {
            const auto& E = m.edges[m.boundary_edges[be]];
            tr.emplace_back(static_cast<int>(be), m.vertex_to_bvertex[E[0]], -1);
            tr.emplace_back(static_cast<int>(be), m.vertex_to_bvertex[E[1]], +1);
        }
        m.bd0.resize(static_cast<int>(m.boundary_edges.size()),
                     static_cast<int>(m.boundary_vertices.size()));
        m.bd0.setFromTriplets(tr.begin(), tr.end());
    }
    {
        std::vector<Eigen::Triplet<std::int64_t>> tr;
        for (std::size_t bf = 0; bf < m.boundary_faces.size(); ++bf) {
            const auto& F = m.faces[m.boundary_faces[bf]];
            tr.emplace_back(static_cast<int>(bf), m.edge_to_bedge[edge_id.at(sorted2(F[1], F[2]))], +1);
            tr.emplace_back(static_cast<int>(bf), m.edge_to_bedge[edge_id.at(sorted2(F[0], F[2]))], -1);
            tr.emplace_back(static_cast<int>(bf), m.edge_to_bedge[edge_id.at(sorted2(F[0], F[1]))], +1);
        }
        m.bd1.resize(static_cast<int>(m.boundary_faces.size()),
                     static_cast<int>(m.boundary_edges.size()));
        m.bd1.setFromTriplets(tr.begin(), tr.end());
    }

    m.bface_patch.assign(m.boundary_faces.size(), 0);

    m.mesh_size = 0.0;
    for (int e = 0; e < m.n_simplices(1); ++e) m.mesh_size = std::max(m.mesh_size, m.edge_length(e));

    return m;
}

namespace {

// Concentric-ring triangulation of the disk: ring j has 6j vertices.
struct DiskMesh {
    std::vector<Eigen::Vector2d> points;
    std::vector<std::array<int, 3>> tris;
};

DiskMesh triangulate_disk(double radius, int rings) {
    DiskMesh d;
    std::vector<std::vector<int>> ring_ids(rings + 1);
    d.points.emplace_back(0.0, 0.0);
    ring_ids[0] = {0};
    for (int j = 1; j <= rings; ++j) {
        int n = 6 * j;
        ring_ids[j].resize(n);
        for (int k = 0; k < n; ++k) {
            double ang = 2.0 * M_PI * k / n;
            ring_ids[j][k] = static_cast<int>(d.points.size());
            d.points.emplace_back(radius * j / rings * std::cos(ang),
                                  radius * j / rings * std::sin(ang));
        }
    }
    for (int j = 1; j <= rings; ++j) {
        const auto& outer = ring_ids[j];
        const auto& inner = ring_ids[j - 1];
        int no = static_cast<int>(outer.size());
        int ni = static_cast<int>(inner.size());
        for (int s = 0; s < 6; ++s) {
            int o0 = s * j, i0 = s * (j - 1);
            for (int k = 0; k < j; ++k) {
                d.tris.push_back({outer[(o0 + k) % no], outer[(o0 + k + 1) % no],
                                  inner[(i0 + k) % ni]});
            }
            for (int k = 0; k + 1 < j; ++k) {
                d.tris.push_back({outer[(o0 + k + 1) % no], inner[(i0 + k + 1) % ni],
                                  inner[(i0 + k) % ni]});
            }
        }
    }
    return d;
}

}  // namespace

Mesh build_cylinder_mesh(double length, double radius, int resolution) {
    if (resolution < 2) throw std::invalid_argument("resolution must be >= 2");
    if (length <= 0 || radius <= 0) throw std::invalid_argument("positive length and radius required");

    DiskMesh disk = triangulate_disk(radius, resolution);
    int layers = std::max(1, static_cast<int>(std::lround(length * resolution / radius)));
    int npts = static_cast<int>(disk.points.size());

    std::vector<Vec3> verts;
    verts.reserve(static_cast<std::size_t>(npts) * (layers + 1));
    for (int l = 0; l <= layers; ++l) {
        double x1 = length * l / layers;
        for (const auto& q : disk.points) verts.emplace_back(x1, q.x(), q.y());
    }

    // split each prism into 3 tets; diagonal choice from global indices keeps
    // the decomposition conforming across prisms
    std::vector<std::array<int, 4>> cells;
    cells.reserve(disk.tris.size() * layers * 3);
    for (int l = 0; l < layers; ++l) {
        for (const auto& tri : disk.tris) {
            int a = tri[0] + l * npts, b = tri[1] + l * npts, c = tri[2] + l * npts;
            int A = a + npts, B = b + npts, C = c + npts;
            // rotate so the smallest bottom index comes first
            std::array<int, 3> bot{a, b, c}, top{A, B, C};
            int rot = static_cast<int>(std::min_element(bot.begin(), bot.end()) - bot.begin());
            std::array<int, 3> rb{bot[rot], bot[(rot + 1) % 3], bot[(rot + 2) % 3]};
            std::array<int, 3> rt{top[rot], top[(rot + 1) % 3], top[(rot + 2) % 3]};
            // standard 3-tet prism split along the diagonal through rb[0]/rt[0];
            // the middle quad diagonal follows the smaller of rb[1], rb[2]
            if (std::min(rb[1], rt[2]) < std::min(rb[2], rt[1])) {
                cells.push_back({rb[0], rb[1], rb[2], rt[2]});
                cells.push_back({rb[0], rb[1], rt[1], rt[2]});
                cells.push_back({rb[0], rt[0], rt[1], rt[2]});
            } else {
                cells.push_back({rb[0], rb[1], rb[2], rt[1]});
                cells.push_back({rb[0], rb[2], rt[1], rt[2]});
                cells.push_back({rb[0], rt[0], rt[1], rt[2]});
            }
        }
    }

    Mesh m = build_from_cells(std::move(verts), std::move(cells));

    // classify boundary patches
    for (std::size_t bf = 0; bf < m.boundary_faces.size(); ++bf) {
        Vec3 c = m.face_centroid(m.boundary_faces[bf]);
        if (std::abs(c.x()) < 1e-12)
            m.bface_patch[bf] = 1;
        else if (std::abs(c.x() - length) < 1e-12)
            m.bface_patch[bf] = 2;
        else
            m.bface_patch[bf] = 0;
    }
    return m;
}

Mesh build_excised_torus_mesh(int resolution, double ring_r, double tube_r) {
    Mesh base = build_cylinder_mesh(1.0, 1.0, resolution);
    std::vector<std::array<int, 4>> kept;
    for (int t = 0; t < base.n_simplices(3); ++t) {
        Vec3 c = base.tet_centroid(t);
        double rho = std::hypot(c.y(), c.z());
        double d = std::hypot(rho - ring_r, c.x() - 0.5);
        if (d > tube_r) kept.push_back(base.tets[t]);
    }
    // drop unused vertices
    std::vector<int> remap(base.vertices.size(), -1);
    std::vector<Vec3> verts;
    for (auto& T : kept) {
        for (int& v : T) {
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(verts.size());
                verts.push_back(base.vertices[v]);
            }
            v = remap[v];
        }
    }
    return build_from_cells(std::move(verts), std::move(kept));
}

void write_kmlmesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.precision(17);
    out << "KMLMESH 1\n";
    out << mesh.vertices.size() << "\n";
    for (const auto& v : mesh.vertices) out << v.x() << " " << v.y() << " " << v.z() << "\n";
    out << mesh.tets.size() << "\n";
    for (const auto& T : mesh.tets) out << T[0] << " " << T[1] << " " << T[2] << " " << T[3] << "\n";
}

Mesh read_kmlmesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh file " + path);
    std::string magic;
    int version = 0;
    in >> magic >> version;
    if (magic != "KMLMESH" || version != 1)
        throw std::runtime_error(path + ": not a KMLMESH 1 file");
    std::size_t nv = 0, nt = 0;
    in >> nv;
    std::vector<Vec3> verts(nv);
    for (auto& v : verts) in >> v.x() >> v.y() >> v.z();
    in >> nt;
    std::vector<std::array<int, 4>> cells(nt);
    for (auto& T : cells) in >> T[0] >> T[1] >> T[2] >> T[3];
    if (!in) throw std::runtime_error(path + ": truncated KMLMESH file");
    return build_from_cells(std::move(verts), std::move(cells));
}

Mesh read_gmsh22(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open mesh file " + path);
    std::string line;
    std::vector<Vec3> verts;
    std::map<long, int> node_id;
    std::vector<std::array<int, 4>> cells;
    while (std::getline(in, line)) {
        if (line.rfind("$MeshFormat", 0) == 0) {
            std::getline(in, line);
            std::istringstream fmt(line);
            double ver;
            fmt >> ver;
            if (ver < 2.0 || ver >= 3.0) throw std::runtime_error("only MSH 2.x ASCII supported");
        } else if (line.rfind("$Nodes", 0) == 0) {
            std::size_t n;
            in >> n;
            for (std::size_t i = 0; i < n; ++i) {
                long id;
                double x, y, z;
                in >> id >> x >> y >> z;
                node_id[id] = static_cast<int>(verts.size());
                verts.emplace_back(x, y, z);
            }
        } else if (line.rfind("$Elements", 0) == 0) {
            std::size_t n;
            in >> n;
            std::getline(in, line);
            for (std::size_t i = 0; i < n; ++i) {
                std::getline(in, line);
                std::istringstream el(line);
                long id;
                int type, ntags;
                el >> id >> type >> ntags;
                for (int k = 0; k < ntags; ++k) {
                    long tag;
                    el >> tag;
                }
                if (type == 4) {
                    long a, b, c, d;
                    el >> a >> b >> c >> d;
                    cells.push_back({node_id.at(a), node_id.at(b), node_id.at(c), node_id.at(d)});
                }
            }
        }
    }
    if (cells.empty()) throw std::runtime_error(path + ": no tetrahedra found");
    return build_from_cells(std::move(verts), std::move(cells));
}

}  // namespace kml

#include "kml/dec.hpp"

#include <cmath>

#include "kml/quadrature.hpp"

namespace kml {

namespace {

constexpr int kEdgeLocal[6][2] = {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}};
constexpr int kFaceLocal[4][3] = {{1, 2, 3}, {0, 2, 3}, {0, 1, 3}, {0, 1, 2}};

// ∫_T λ_i λ_j dV = V (1 + δ_ij) / 20
inline double lambda_pair_integral(double vol, int i, int j) {
    return vol * (i == j ? 2.0 : 1.0) / 20.0;
}

// in-plane barycentric gradients of a triangle embedded in R^3
std::array<Vec3, 3> triangle_gradients(const Vec3& q0, const Vec3& q1, const Vec3& q2) {
    Eigen::Matrix<double, 3, 2> E;
    E.col(0) = q1 - q0;
    E.col(1) = q2 - q0;
    Eigen::Matrix2d EtE = E.transpose() * E;
    Eigen::Matrix<double, 3, 2> G = E * EtE.inverse();
    std::array<Vec3, 3> g;
    g[1] = G.col(0);
    g[2] = G.col(1);
    g[0] = -(g[1] + g[2]);
    return g;
}

}  // namespace

WhitneyCell::WhitneyCell(const Mesh& m, int t) : mesh(&m), tet(t) {
    grad = m.barycentric_gradients(t);
    volume = m.tet_volume(t);
    signed_volume = m.signed_tet_volume(t);
}

std::array<double, 4> WhitneyCell::barycentric(const Vec3& x) const {
    const auto& T = mesh->tets[tet];
    Vec3 rel = x - mesh->vertices[T[0]];
    std::array<double, 4> l;
    l[1] = grad[1].dot(rel);
    l[2] = grad[2].dot(rel);
    l[3] = grad[3].dot(rel);
    l[0] = 1.0 - l[1] - l[2] - l[3];
    return l;
}

Vec3 WhitneyCell::basis1(int le, const std::array<double, 4>& l) const {
    int a = kEdgeLocal[le][0], b = kEdgeLocal[le][1];
    return l[a] * grad[b] - l[b] * grad[a];
}

Vec3 WhitneyCell::curl_basis1(int le) const {
    int a = kEdgeLocal[le][0], b = kEdgeLocal[le][1];
    return 2.0 * grad[a].cross(grad[b]);
}

Vec3 WhitneyCell::basis2(int lf, const std::array<double, 4>& l) const {
    int a = kFaceLocal[lf][0], b = kFaceLocal[lf][1], c = kFaceLocal[lf][2];
    return 2.0 * (l[a] * grad[b].cross(grad[c]) + l[b] * grad[c].cross(grad[a]) +
                  l[c] * grad[a].cross(grad[b]));
}

double WhitneyCell::basis3() const { return 1.0 / signed_volume; }

Complex WhitneyCell::eval0(const VecC& u, const std::array<double, 4>& l) const {
    const auto& T = mesh->tets[tet];
    Complex v = 0.0;
    for (int i = 0; i < 4; ++i) v += l[i] * u[T[i]];
    return v;
}

Vec3c WhitneyCell::eval1(const VecC& u, const std::array<double, 4>& l) const {
    Vec3c v = Vec3c::Zero();
    for (int le = 0; le < 6; ++le) v += u[mesh->tet_edges[tet][le]] * basis1(le, l).cast<Complex>();
    return v;
}

Vec3c WhitneyCell::eval2(const VecC& u, const std::array<double, 4>& l) const {
    Vec3c v = Vec3c::Zero();
    for (int lf = 0; lf < 4; ++lf) v += u[mesh->tet_faces[tet][lf]] * basis2(lf, l).cast<Complex>();
    return v;
}

Complex WhitneyCell::eval3(const VecC& u) const { return u[tet] * basis3(); }

Vec3c WhitneyCell::curl1(const VecC& u) const {
    Vec3c v = Vec3c::Zero();
    for (int le = 0; le < 6; ++le) v += u[mesh->tet_edges[tet][le]] * curl_basis1(le).cast<Complex>();
    return v;
}

VecC solve_complex(const Eigen::SimplicialLDLT<SparseD>& ldlt, const VecC& rhs) {
    VecD re = ldlt.solve(rhs.real());
    VecD im = ldlt.solve(rhs.imag());
    return re + Complex(0, 1) * im;
}

DecSpace::DecSpace(const Mesh& mesh, double conformal_c) : mesh_(&mesh), conformal_c_(conformal_c) {
    if (conformal_c_ <= 0) throw std::invalid_argument("conformal factor must be positive");
    assemble();
}

void DecSpace::assemble() {
    const Mesh& m = *mesh_;
    d0_ = m.d0.cast<double>();
    d1_ = m.d1.cast<double>();
    d2_ = m.d2.cast<double>();
    bd0_ = m.bd0.cast<double>();
    bd1_ = m.bd1.cast<double>();

    // trace (restriction) matrices
    for (int k = 0; k < 3; ++k) {
        std::vector<Eigen::Triplet<double>> tr;
        int nb = m.n_boundary_simplices(k);
        for (int b = 0; b < nb; ++b) {
            int vol_id = k == 0   ? m.boundary_vertices[b]
                         : k == 1 ? m.boundary_edges[b]
                                  : m.boundary_faces[b];
            tr.emplace_back(b, vol_id, 1.0);
        }
        trace_[k].resize(nb, m.n_simplices(k));
        trace_[k].setFromTriplets(tr.begin(), tr.end());
    }

    const double c = conformal_c_;
    const double cpow[4] = {std::pow(c, 1.5), std::pow(c, 0.5), std::pow(c, -0.5),
                            std::pow(c, -1.5)};

    // volume masses
    {
        std::vector<Eigen::Triplet<double>> t0, t1, t2, t3;
        std::vector<Eigen::Triplet<double>> w0, w1;
        for (int t = 0; t < m.n_simplices(3); ++t) {
            WhitneyCell wc(m, t);
            const auto& T = m.tets[t];
            double V = wc.volume;
            // M0
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    t0.emplace_back(T[i], T[j], cpow[0] * lambda_pair_integral(V, i, j));
            // M1
            for (int le = 0; le < 6; ++le) {
                int a = kEdgeLocal[le][0], b = kEdgeLocal[le][1];
                for (int lf = 0; lf < 6; ++lf) {
                    int p = kEdgeLocal[lf][0], q = kEdgeLocal[lf][1];
                    double val = lambda_pair_integral(V, a, p) * wc.grad[b].dot(wc.grad[q]) -
                                 lambda_pair_integral(V, a, q) * wc.grad[b].dot(wc.grad[p]) -
                                 lambda_pair_integral(V, b, p) * wc.grad[a].dot(wc.grad[q]) +
                                 lambda_pair_integral(V, b, q) * wc.grad[a].dot(wc.grad[p]);
                    t1.emplace_back(m.tet_edges[t][le], m.tet_edges[t][lf], cpow[1] * val);
                }
            }
            // M2
            for (int lf = 0; lf < 4; ++lf) {
                const int* F = kFaceLocal[lf];
                Vec3 u[3] = {wc.grad[F[1]].cross(wc.grad[F[2]]), wc.grad[F[2]].cross(wc.grad[F[0]]),
                             wc.grad[F[0]].cross(wc.grad[F[1]])};
                for (int lg = 0; lg < 4; ++lg) {
                    const int* G = kFaceLocal[lg];
                    Vec3 v[3] = {wc.grad[G[1]].cross(wc.grad[G[2]]),
                                 wc.grad[G[2]].cross(wc.grad[G[0]]),
                                 wc.grad[G[0]].cross(wc.grad[G[1]])};
                    double val = 0.0;
                    for (int i = 0; i < 3; ++i)
                        for (int j = 0; j < 3; ++j)
                            val += 4.0 * lambda_pair_integral(V, F[i], G[j]) * u[i].dot(v[j]);
                    t2.emplace_back(m.tet_faces[t][lf], m.tet_faces[t][lg], cpow[2] * val);
                }
            }
            // M3
            t3.emplace_back(t, t, cpow[3] / V);

            // wedge C0: ∫ λ_v ∧ W_T
            double sigma = wc.signed_volume > 0 ? 1.0 : -1.0;
            for (int i = 0; i < 4; ++i) w0.emplace_back(t, T[i], sigma / 4.0);
            // wedge C1: ∫ W_e ∧ W_F (metric-free)
            for (int lf = 0; lf < 4; ++lf) {
                const int* F = kFaceLocal[lf];
                Vec3 u[3] = {wc.grad[F[1]].cross(wc.grad[F[2]]), wc.grad[F[2]].cross(wc.grad[F[0]]),
                             wc.grad[F[0]].cross(wc.grad[F[1]])};
                for (int le = 0; le < 6; ++le) {
                    int a = kEdgeLocal[le][0], b = kEdgeLocal[le][1];
                    double val = 0.0;
                    for (int j = 0; j < 3; ++j) {
                        val += 2.0 * (lambda_pair_integral(V, a, F[j]) * wc.grad[b].dot(u[j]) -
                                      lambda_pair_integral(V, b, F[j]) * wc.grad[a].dot(u[j]));
                    }
                    w1.emplace_back(m.tet_faces[t][lf], m.tet_edges[t][le], val);
                }
            }
        }
        auto build = [&](SparseD& M, int rows, int cols, std::vector<Eigen::Triplet<double>>& tr) {
            M.resize(rows, cols);
            M.setFromTriplets(tr.begin(), tr.end());
        };
        int nv = m.n_simplices(0), ne = m.n_simplices(1), nf = m.n_simplices(2),
            nt = m.n_simplices(3);
        build(mass_[0], nv, nv, t0);
        build(mass_[1], ne, ne, t1);
        build(mass_[2], nf, nf, t2);
        build(mass_[3], nt, nt, t3);
        build(wedge0_, nt, nv, w0);
        build(wedge1_, nf, ne, w1);
    }

    // boundary masses (2D Whitney on embedded triangles); conformal scale c^{1-k}
    {
        const Mesh& msh = m;
        const double bc[3] = {c, 1.0, 1.0 / c};
        std::vector<Eigen::Triplet<double>> b0, b1, b2;
        for (std::size_t bf = 0; bf < msh.boundary_faces.size(); ++bf) {
            int f = msh.boundary_faces[bf];
            const auto& F = msh.faces[f];
            double A = msh.face_area(f);
            auto g = triangle_gradients(msh.vertices[F[0]], msh.vertices[F[1]], msh.vertices[F[2]]);
            // P1 mass
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j)
                    b0.emplace_back(msh.vertex_to_bvertex[F[i]], msh.vertex_to_bvertex[F[j]],
                                    bc[0] * A * (i == j ? 2.0 : 1.0) / 12.0);
            // Whitney edge mass; local edges of the sorted face
            const int fe[3][2] = {{0, 1}, {0, 2}, {1, 2}};
            // global edge ids through the edge table of the adjacent tet
            int t = msh.bface_tet[bf];
            auto edge_id_of = [&](int va, int vb) {
                if (va > vb) std::swap(va, vb);
                for (int le = 0; le < 6; ++le) {
                    int e = msh.tet_edges[t][le];
                    if (msh.edges[e][0] == va && msh.edges[e][1] == vb) return e;
                }
                throw std::logic_error("boundary edge not found in adjacent tet");
            };
            int eid[3];
            for (int k = 0; k < 3; ++k) eid[k] = msh.edge_to_bedge[edge_id_of(F[fe[k][0]], F[fe[k][1]])];
            // quadrature-exact (degree 2) integration of Whitney-edge products
            for (int ke = 0; ke < 3; ++ke) {
                int a = fe[ke][0], b = fe[ke][1];
                for (int le = 0; le < 3; ++le) {
                    int p = fe[le][0], q = fe[le][1];
                    auto lint = [&](int i, int j) { return A * (i == j ? 2.0 : 1.0) / 12.0; };
                    double val = lint(a, p) * g[b].dot(g[q]) - lint(a, q) * g[b].dot(g[p]) -
                                 lint(b, p) * g[a].dot(g[q]) + lint(b, q) * g[a].dot(g[p]);
                    b1.emplace_back(eid[ke], eid[le], bc[1] * val);
                }
            }
            b2.emplace_back(static_cast<int>(bf), static_cast<int>(bf), bc[2] / A);
        }
        bmass_[0].resize(m.n_boundary_simplices(0), m.n_boundary_simplices(0));
        bmass_[0].setFromTriplets(b0.begin(), b0.end());
        bmass_[1].resize(m.n_boundary_simplices(1), m.n_boundary_simplices(1));
        bmass_[1].setFromTriplets(b1.begin(), b1.end());
        bmass_[2].resize(m.n_boundary_simplices(2), m.n_boundary_simplices(2));
        bmass_[2].setFromTriplets(b2.begin(), b2.end());
    }

    for (int k = 0; k < 4; ++k) {
        mass_ldlt_[k] = std::make_unique<Eigen::SimplicialLDLT<SparseD>>();
        mass_ldlt_[k]->compute(mass_[k]);
        if (mass_ldlt_[k]->info() != Eigen::Success)
            throw std::runtime_error("mass matrix factorization failed (degenerate mesh)");
    }
    for (int k = 0; k < 3; ++k) {
        bmass_ldlt_[k] = std::make_unique<Eigen::SimplicialLDLT<SparseD>>();
        bmass_ldlt_[k]->compute(bmass_[k]);
        if (bmass_ldlt_[k]->info() != Eigen::Success)
            throw std::runtime_error("boundary mass factorization failed");
    }
}

const SparseD& DecSpace::d_matrix(int k) const {
    switch (k) {
        case 0: return d0_;
        case 1: return d1_;
        case 2: return d2_;
        default: throw std::invalid_argument("d acts on degrees 0..2");
    }
}

const SparseD& DecSpace::bd_matrix(int k) const {
    switch (k) {
        case 0: return bd0_;
        case 1: return bd1_;
        default: throw std::invalid_argument("boundary d acts on degrees 0..1");
    }
}

const SparseD& DecSpace::trace_matrix(int k) const {
    if (k < 0 || k > 2) throw std::invalid_argument("trace acts on degrees 0..2");
    return trace_[k];
}

const SparseD& DecSpace::mass(int k) const {
    if (k < 0 || k > 3) throw std::invalid_argument("mass degree must be 0..3");
    return mass_[k];
}

const SparseD& DecSpace::boundary_mass(int k) const {
    if (k < 0 || k > 2) throw std::invalid_argument("boundary mass degree must be 0..2");
    return bmass_[k];
}

const SparseD& DecSpace::wedge(int k) const {
    switch (k) {
        case 0: return wedge0_;
        case 1: return wedge1_;
        default: throw std::invalid_argument("wedge matrices stored for degrees 0 and 1");
    }
}

VecC DecSpace::mass_solve(int k, const VecC& rhs) const { return solve_complex(*mass_ldlt_[k], rhs); }

VecC DecSpace::boundary_mass_solve(int k, const VecC& rhs) const {
    return solve_complex(*bmass_ldlt_[k], rhs);
}

DiscreteForm DecSpace::exterior_derivative(const DiscreteForm& u) const {
    if (u.on_boundary) {
        if (u.degree > 1) throw std::invalid_argument("boundary d rejects degree > 1");
        DiscreteForm out(*mesh_, u.degree + 1, true);
        out.coeffs = bd_matrix(u.degree) * u.coeffs;
        return out;
    }
    if (u.degree > 2) throw std::invalid_argument("d rejects degree-3 input");
    DiscreteForm out(*mesh_, u.degree + 1);
    out.coeffs = d_matrix(u.degree) * u.coeffs;
    return out;
}

DiscreteForm DecSpace::tangential_trace(const DiscreteForm& u) const {
    if (u.on_boundary) throw std::invalid_argument("trace of a boundary form");
    if (u.degree > 2) throw std::invalid_argument("trace acts on degrees 0..2");
    DiscreteForm out(*mesh_, u.degree, true);
    out.coeffs = trace_[u.degree] * u.coeffs;
    return out;
}

DiscreteForm DecSpace::hodge_star(const DiscreteForm& u) const {
    if (u.on_boundary) throw std::invalid_argument("volume star only");
    DiscreteForm out(*mesh_, 3 - u.degree);
    switch (u.degree) {
        case 0: out.coeffs = mass_solve(3, wedge0_ * u.coeffs); break;
        case 1: out.coeffs = mass_solve(2, wedge1_ * u.coeffs); break;
        case 2: out.coeffs = mass_solve(1, SparseD(wedge1_.transpose()) * u.coeffs); break;
        case 3: out.coeffs = mass_solve(0, SparseD(wedge0_.transpose()) * u.coeffs); break;
    }
    return out;
}

DiscreteForm DecSpace::normal_trace(const DiscreteForm& u) const {
    if (u.on_boundary || u.degree < 1) throw std::invalid_argument("normal trace needs a volume form of degree >= 1");
    const Mesh& m = *mesh_;
    int out_deg = u.degree - 1;
    VecC rhs = VecC::Zero(m.n_boundary_simplices(out_deg));
    const auto& quad = tri_quadrature(2);
    for (std::size_t bf = 0; bf < m.boundary_faces.size(); ++bf) {
        int f = m.boundary_faces[bf];
        const auto& F = m.faces[f];
        int t = m.bface_tet[bf];
        WhitneyCell wc(m, t);
        const Vec3 nu = m.bface_normal[bf];
        double A = m.face_area(f);
        auto tri_g = triangle_gradients(m.vertices[F[0]], m.vertices[F[1]], m.vertices[F[2]]);
        // local boundary edge ids of the face
        const int fe[3][2] = {{0, 1}, {0, 2}, {1, 2}};
        int beid[3] = {-1, -1, -1};
        if (out_deg == 1) {
            for (int k = 0; k < 3; ++k) {
                int va = F[fe[k][0]], vb = F[fe[k][1]];
                if (va > vb) std::swap(va, vb);
                for (int le = 0; le < 6; ++le) {
                    int e = m.tet_edges[t][le];
                    if (m.edges[e][0] == va && m.edges[e][1] == vb) beid[k] = m.edge_to_bedge[e];
                }
            }
        }
        double sigma_f =
            ((m.vertices[F[1]] - m.vertices[F[0]]).cross(m.vertices[F[2]] - m.vertices[F[0]]))
                        .dot(nu) > 0
                ? 1.0
                : -1.0;
        for (const auto& qp : quad) {
            Vec3 x = qp.lambda[0] * m.vertices[F[0]] + qp.lambda[1] * m.vertices[F[1]] +
                     qp.lambda[2] * m.vertices[F[2]];
            auto l = wc.barycentric(x);
            double w = qp.weight * A;
            if (u.degree == 1) {
                Complex s = (wc.eval1(u.coeffs, l).transpose() * nu.cast<Complex>())(0);
                for (int i = 0; i < 3; ++i)
                    rhs[m.vertex_to_bvertex[F[i]]] += w * s * qp.lambda[i];
            } else if (u.degree == 2) {
                Vec3c B = wc.eval2(u.coeffs, l);
                Vec3c tangential = B.cross(nu.cast<Complex>());
                for (int k = 0; k < 3; ++k) {
                    int a = fe[k][0], b = fe[k][1];
                    Vec3 wb = qp.lambda[a] * tri_g[b] - qp.lambda[b] * tri_g[a];
                    rhs[beid[k]] += w * (tangential.transpose() * wb.cast<Complex>())(0);
                }
            } else {
                Complex rho = wc.eval3(u.coeffs);
                rhs[bf] += w * rho * sigma_f / A;
            }
        }
    }
    DiscreteForm out(m, out_deg, true);
    out.coeffs = boundary_mass_solve(out_deg, rhs);
    // conformal scale: the flat rhs fed through the scaled boundary mass needs
    // c^{1/2-k} to realize t(i_ν ·) in the metric c·g
    out.coeffs *= std::pow(conformal_c_, 0.5 - out_deg);
    return out;
}

DiscreteForm DecSpace::codifferential(const DiscreteForm& u) const {
    if (u.on_boundary) throw std::invalid_argument("volume codifferential only");
    if (u.degree < 1) throw std::invalid_argument("codifferential rejects degree-0 input");
    int k = u.degree;
    DiscreteForm nt = normal_trace(u);
    VecC rhs = SparseD(d_matrix(k - 1).transpose()) * (mass_[k] * u.coeffs) -
               SparseD(trace_[k - 1].transpose()) * (bmass_[k - 1] * nt.coeffs);
    DiscreteForm out(*mesh_, k - 1);
    out.coeffs = mass_solve(k - 1, rhs);
    return out;
}

DiscreteForm DecSpace::codifferential_via_star(const DiscreteForm& u) const {
    if (u.degree < 1) throw std::invalid_argument("codifferential rejects degree-0 input");
    int mdeg = u.degree, n = 3;
    // δ = (-1)^{m(n-m)-n+m-1} * d * (Eq. 2.3); in R^3 the sign is (-1)^m
    double sign = ((mdeg * (n - mdeg) - n + mdeg - 1) % 2 == 0) ? 1.0 : -1.0;
    DiscreteForm v = hodge_star(exterior_derivative(hodge_star(u)));
    v.coeffs *= sign;
    return v;
}

DiscreteForm DecSpace::interior_product(const DiscreteForm& xi, const DiscreteForm& u) const {
    if (xi.degree != 1) throw std::invalid_argument("contraction direction must be a 1-form");
    if (u.degree < 1) throw std::invalid_argument("interior product needs degree >= 1");
    const double cinv = 1.0 / conformal_c_;
    int mdeg = u.degree;
    // pointwise (2.4): i_ξ u = (-1)^{n(m-1)} * (ξ ∧ * u) on flat proxies
    double sign = ((3 * (mdeg - 1)) % 2 == 0) ? 1.0 : -1.0;
    if (mdeg == 1) {
        auto f = [&](int t, const Vec3& x) -> Complex {
            WhitneyCell wc(*mesh_, t);
            auto l = wc.barycentric(x);
            Vec3c xiv = wc.eval1(xi.coeffs, l);
            Vec3c uv = wc.eval1(u.coeffs, l);
            return sign * cinv * (xiv.transpose() * uv)(0);
        };
        return project_scalar_field(f);
    }
    if (mdeg == 2) {
        auto f = [&](int t, const Vec3& x) -> Vec3c {
            WhitneyCell wc(*mesh_, t);
            auto l = wc.barycentric(x);
            Vec3c xiv = wc.eval1(xi.coeffs, l);
            Vec3c B = wc.eval2(u.coeffs, l);  // * u proxy equals B
            return sign * cinv * xiv.cross(B);
        };
        return project_field(1, f);
    }
    auto f = [&](int t, const Vec3& x) -> Vec3c {
        WhitneyCell wc(*mesh_, t);
        auto l = wc.barycentric(x);
        Vec3c xiv = wc.eval1(xi.coeffs, l);
        Complex rho = wc.eval3(u.coeffs);
        return sign * cinv * rho * xiv;
    };
    return project_field(2, f);
}

DiscreteForm DecSpace::interior_product_oracle(const DiscreteForm& xi, const DiscreteForm& u) const {
    if (xi.degree != 1 || u.degree < 1) throw std::invalid_argument("bad degrees");
    const Eigen::Matrix3d Ginv = Eigen::Matrix3d::Identity() / conformal_c_;
    auto eps = [](int i, int j, int k) -> double {
        return ((i - j) * (j - k) * (k - i)) / 2.0;  // Levi-Civita for 0/1/2 indices
    };
    int mdeg = u.degree;
    if (mdeg == 1) {
        auto f = [&](int t, const Vec3& x) -> Complex {
            WhitneyCell wc(*mesh_, t);
            auto l = wc.barycentric(x);
            Vec3c xiv = wc.eval1(xi.coeffs, l), uv = wc.eval1(u.coeffs, l);
            Complex s = 0;
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) s += Ginv(i, j) * xiv[i] * uv[j];
            return s;
        };
        return project_scalar_field(f);
    }
    if (mdeg == 2) {
        auto f = [&](int t, const Vec3& x) -> Vec3c {
            WhitneyCell wc(*mesh_, t);
            auto l = wc.barycentric(x);
            Vec3c xiv = wc.eval1(xi.coeffs, l), B = wc.eval2(u.coeffs, l);
            // coordinate components eta_{jk} = eps_{jkl} B_l
            Vec3c raised = Ginv * xiv;
            Vec3c out = Vec3c::Zero();
            for (int k = 0; k < 3; ++k)
                for (int j = 0; j < 3; ++j)
                    for (int lidx = 0; lidx < 3; ++lidx)
                        out[k] += raised[j] * eps(j, k, lidx) * B[lidx];
            return out;
        };
        return project_field(1, f);
    }
    auto f = [&](int t, const Vec3& x) -> Vec3c {
        WhitneyCell wc(*mesh_, t);
        auto l = wc.barycentric(x);
        Vec3c xiv = wc.eval1(xi.coeffs, l);
        Complex rho = wc.eval3(u.coeffs);
        // (i_ξ u)_{kl} = rho eps_{jkl} (G ξ)_j; convert to the 2-form proxy
        Vec3c raised = Ginv * xiv;
        Eigen::Matrix3cd A = Eigen::Matrix3cd::Zero();
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                for (int lidx = 0; lidx < 3; ++lidx) A(k, lidx) += rho * eps(j, k, lidx) * raised[j];
        Vec3c proxy;
        proxy[0] = A(1, 2);
        proxy[1] = A(2, 0);
        proxy[2] = A(0, 1);
        return proxy;
    };
    return project_field(2, f);
}

DiscreteForm DecSpace::surface_divergence(const DiscreteForm& f, const DiscreteForm& lift) const {
    if (!f.on_boundary || f.degree != 1) throw std::invalid_argument("f must be a boundary 1-form");
    if (lift.on_boundary || lift.degree != 1) throw std::invalid_argument("lift must be a volume 1-form");
    DiscreteForm tl = tangential_trace(lift);
    if ((tl.coeffs - f.coeffs).norm() > 1e-10 * (1.0 + f.coeffs.norm()))
        throw std::invalid_argument("lift trace does not match f");
    // Div(f) = i_ν * d(lift) restricted to the boundary (Eq. 2.6)
    const Mesh& m = *mesh_;
    VecC rhs = VecC::Zero(m.n_boundary_simplices(0));
    const auto& quad = tri_quadrature(2);
    for (std::size_t bf = 0; bf < m.boundary_faces.size(); ++bf) {
        int face = m.boundary_faces[bf];
        const auto& F = m.faces[face];
        int t = m.bface_tet[bf];
        WhitneyCell wc(m, t);
        Vec3c curl = wc.curl1(lift.coeffs);  // proxy of * d(lift)
        const Vec3 nu = m.bface_normal[bf];
        double A = m.face_area(face);
        Complex s = (curl.transpose() * nu.cast<Complex>())(0);
        for (const auto& qp : quad) {
            double w = qp.weight * A;
            for (int i = 0; i < 3; ++i) rhs[m.vertex_to_bvertex[F[i]]] += w * s * qp.lambda[i];
        }
    }
    DiscreteForm out(m, 0, true);
    out.coeffs = boundary_mass_solve(0, rhs);
    return out;
}

double DecSpace::integration_by_parts_residual(const DiscreteForm& eta,
                                               const DiscreteForm& zeta) const {
    if (zeta.degree != eta.degree + 1) throw std::invalid_argument("degree mismatch");
    Complex boundary = boundary_inner(tangential_trace(eta), normal_trace(zeta));
    Complex volume = inner(exterior_derivative(eta), zeta) - inner(eta, codifferential(zeta));
    return std::abs(boundary - volume);
}

Complex DecSpace::inner(const DiscreteForm& u, const DiscreteForm& v) const {
    u.require_compatible(v);
    if (u.on_boundary) return boundary_inner(u, v);
    return (u.coeffs.transpose() * (mass_[u.degree] * v.coeffs.conjugate()))(0);
}

double DecSpace::norm(const DiscreteForm& u) const { return std::sqrt(std::abs(inner(u, u))); }

Complex DecSpace::boundary_inner(const DiscreteForm& u, const DiscreteForm& v) const {
    u.require_compatible(v);
    return (u.coeffs.transpose() * (bmass_[u.degree] * v.coeffs.conjugate()))(0);
}

double DecSpace::boundary_norm(const DiscreteForm& u) const {
    return std::sqrt(std::abs(boundary_inner(u, u)));
}

DiscreteForm DecSpace::project_field(int degree,
                                     const std::function<Vec3c(int, const Vec3&)>& field,
                                     int quad_degree) const {
    if (degree != 1 && degree != 2) throw std::invalid_argument("project_field handles degrees 1, 2");
    const Mesh& m = *mesh_;
    VecC rhs = VecC::Zero(m.n_simplices(degree));
    const auto& quad = tet_quadrature(quad_degree);
    for (int t = 0; t < m.n_simplices(3); ++t) {
        WhitneyCell wc(m, t);
        const auto& T = m.tets[t];
        for (const auto& qp : quad) {
            Vec3 x = qp.lambda[0] * m.vertices[T[0]] + qp.lambda[1] * m.vertices[T[1]] +
                     qp.lambda[2] * m.vertices[T[2]] + qp.lambda[3] * m.vertices[T[3]];
            Vec3c val = field(t, x);
            double w = qp.weight * wc.volume;
            if (degree == 1) {
                for (int le = 0; le < 6; ++le)
                    rhs[m.tet_edges[t][le]] +=
                        w * (val.transpose() * wc.basis1(le, qp.lambda).cast<Complex>())(0);
            } else {
                for (int lf = 0; lf < 4; ++lf)
                    rhs[m.tet_faces[t][lf]] +=
                        w * (val.transpose() * wc.basis2(lf, qp.lambda).cast<Complex>())(0);
            }
        }
    }
    DiscreteForm out(m, degree);
    // rhs was integrated in the flat metric; the scaled mass needs the matching
    // metric factor so that projection is metric-independent, as it should be
    out.coeffs = mass_solve(degree, rhs * std::pow(conformal_c_, 1.5 - degree));
    return out;
}

DiscreteForm DecSpace::project_scalar_field(const std::function<Complex(int, const Vec3&)>& field,
                                            int quad_degree) const {
    const Mesh& m = *mesh_;
    VecC rhs = VecC::Zero(m.n_simplices(0));
    const auto& quad = tet_quadrature(quad_degree);
    for (int t = 0; t < m.n_simplices(3); ++t) {
        WhitneyCell wc(m, t);
        const auto& T = m.tets[t];
        for (const auto& qp : quad) {
            Vec3 x = qp.lambda[0] * m.vertices[T[0]] + qp.lambda[1] * m.vertices[T[1]] +
                     qp.lambda[2] * m.vertices[T[2]] + qp.lambda[3] * m.vertices[T[3]];
            Complex val = field(t, x);
            double w = qp.weight * wc.volume;
            for (int i = 0; i < 4; ++i) rhs[T[i]] += w * val * qp.lambda[i];
        }
    }
    DiscreteForm out(m, 0);
    out.coeffs = mass_solve(0, rhs * std::pow(conformal_c_, 1.5));
    return out;
}

DiscreteForm DecSpace::interpolate_one_form(const std::function<Vec3c(const Vec3&)>& field,
                                            int gauss_points) const {
    const Mesh& m = *mesh_;
    DiscreteForm out(m, 1);
    auto rule = gauss_legendre_01(gauss_points);
    for (int e = 0; e < m.n_simplices(1); ++e) {
        const Vec3& a = m.vertices[m.edges[e][0]];
        const Vec3& b = m.vertices[m.edges[e][1]];
        Vec3 dl = b - a;
        Complex acc = 0;
        for (auto [s, w] : rule) {
            Vec3 x = a + s * dl;
            acc += w * (field(x).transpose() * dl.cast<Complex>())(0);
        }
        out.coeffs[e] = acc;
    }
    return out;
}

DiscreteForm DecSpace::interpolate_boundary_one_form(
    const std::function<Vec3c(const Vec3&)>& field, int gauss_points) const {
    const Mesh& m = *mesh_;
    DiscreteForm out(m, 1, true);
    auto rule = gauss_legendre_01(gauss_points);
    for (int be = 0; be < m.n_boundary_simplices(1); ++be) {
        int e = m.boundary_edges[be];
        const Vec3& a = m.vertices[m.edges[e][0]];
        const Vec3& b = m.vertices[m.edges[e][1]];
        Vec3 dl = b - a;
        Complex acc = 0;
        for (auto [s, w] : rule) {
            Vec3 x = a + s * dl;
            acc += w * (field(x).transpose() * dl.cast<Complex>())(0);
        }
        out.coeffs[be] = acc;
    }
    return out;
}

DiscreteForm DecSpace::sample_vertex_form(const std::function<Complex(const Vec3&)>& f) const {
    DiscreteForm out(*mesh_, 0);
    for (int v = 0; v < mesh_->n_simplices(0); ++v) out.coeffs[v] = f(mesh_->vertices[v]);
    return out;
}

}  // namespace kml

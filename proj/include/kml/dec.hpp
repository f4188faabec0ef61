#pragma once

// Discrete exterior calculus on lowest-order Whitney spaces.
//
// The inner product convention is sesquilinear in the second slot,
// (η|ζ) = ∫ ⟨η, ζ̄⟩_g dVol_g, and the bilinear ⟨·,·⟩_g never conjugates.
// The Hodge star is the Galerkin star: M_{3-k} (*u) = C_k u with
// C_k the wedge-pairing matrix ∫ W_σ ∧ W_τ. The codifferential is the
// L² adjoint of d plus the boundary term of the integration-by-parts
// formula, which makes that formula hold to solver precision on every
// pair of cochains; the sign-formula route δ = ± * d * is kept as an
// independent cross-check.

#include <array>
#include <functional>
#include <memory>

#include <Eigen/SparseCholesky>

#include "kml/forms.hpp"
#include "kml/mesh.hpp"

namespace kml {

// cellwise evaluation of Whitney interpolants and basis functions
struct WhitneyCell {
    const Mesh* mesh;
    int tet;
    std::array<Vec3, 4> grad;  // barycentric gradients
    double volume;
    double signed_volume;

    WhitneyCell(const Mesh& m, int t);

    std::array<double, 4> barycentric(const Vec3& x) const;
    // interpolated values of a volume cochain at barycentric point l
    Complex eval0(const VecC& u, const std::array<double, 4>& l) const;
    Vec3c eval1(const VecC& u, const std::array<double, 4>& l) const;
    Vec3c eval2(const VecC& u, const std::array<double, 4>& l) const;
    Complex eval3(const VecC& u) const;
    Vec3c curl1(const VecC& u) const;  // constant per cell

    // basis values (local index, barycentric point)
    Vec3 basis1(int le, const std::array<double, 4>& l) const;
    Vec3 basis2(int lf, const std::array<double, 4>& l) const;
    Vec3 curl_basis1(int le) const;
    double basis3() const;  // constant 1/signed_volume
};

class DecSpace {
  public:
    explicit DecSpace(const Mesh& mesh, double conformal_c = 1.0);

    const Mesh& mesh() const { return *mesh_; }
    double conformal_factor() const { return conformal_c_; }

    // incidence as double matrices (entries from the exact integer tables)
    const SparseD& d_matrix(int k) const;       // k -> k+1
    const SparseD& bd_matrix(int k) const;      // boundary k -> k+1
    const SparseD& trace_matrix(int k) const;   // volume k -> boundary k
    const SparseD& mass(int k) const;           // volume k-form mass
    const SparseD& boundary_mass(int k) const;  // boundary k-form mass
    const SparseD& wedge(int k) const;          // C_k: ∫ W^k ∧ W^{3-k}

    VecC mass_solve(int k, const VecC& rhs) const;
    VecC boundary_mass_solve(int k, const VecC& rhs) const;

    // ---- operators ----------------------------------------------------
    DiscreteForm exterior_derivative(const DiscreteForm& u) const;
    DiscreteForm tangential_trace(const DiscreteForm& u) const;
    DiscreteForm hodge_star(const DiscreteForm& u) const;
    DiscreteForm codifferential(const DiscreteForm& u) const;           // adjoint + boundary
    DiscreteForm codifferential_via_star(const DiscreteForm& u) const;  // sign formula (2.3)
    DiscreteForm normal_trace(const DiscreteForm& u) const;             // t(i_ν u)

    // interior product with a 1-form; xi interpolated cellwise
    DiscreteForm interior_product(const DiscreteForm& xi, const DiscreteForm& u) const;
    // independent oracle: dense index contraction through the antisymmetric
    // coordinate representation
    DiscreteForm interior_product_oracle(const DiscreteForm& xi, const DiscreteForm& u) const;

    // Div(f) = i_ν * d(lift) on the boundary; requires t(lift) = f
    DiscreteForm surface_divergence(const DiscreteForm& f, const DiscreteForm& lift) const;

    double integration_by_parts_residual(const DiscreteForm& eta,
                                         const DiscreteForm& zeta) const;

    // ---- pairings ------------------------------------------------------
    Complex inner(const DiscreteForm& u, const DiscreteForm& v) const;  // (u|v)
    double norm(const DiscreteForm& u) const;
    Complex boundary_inner(const DiscreteForm& u, const DiscreteForm& v) const;
    double boundary_norm(const DiscreteForm& u) const;

    // L² projection of a cellwise field onto k-cochains (k = 0 or 1 or 2)
    DiscreteForm project_field(int degree,
                               const std::function<Vec3c(int, const Vec3&)>& field,
                               int quad_degree = 2) const;
    DiscreteForm project_scalar_field(const std::function<Complex(int, const Vec3&)>& field,
                                      int quad_degree = 2) const;

    // cochain of a smooth 1-form by edge integrals (Gauss rule per edge)
    DiscreteForm interpolate_one_form(const std::function<Vec3c(const Vec3&)>& field,
                                      int gauss_points = 5) const;
    // boundary 1-cochain by line integrals over boundary edges
    DiscreteForm interpolate_boundary_one_form(const std::function<Vec3c(const Vec3&)>& field,
                                               int gauss_points = 5) const;
    // vertex cochain by pointwise sampling
    DiscreteForm sample_vertex_form(const std::function<Complex(const Vec3&)>& f) const;

  private:
    const Mesh* mesh_;
    double conformal_c_;
    SparseD d0_, d1_, d2_, bd0_, bd1_;
    std::array<SparseD, 3> trace_;
    std::array<SparseD, 4> mass_;
    std::array<SparseD, 3> bmass_;
    SparseD wedge0_, wedge1_;  // C_0 (N3 x N0), C_1 (N2 x N1)
    std::array<std::unique_ptr<Eigen::SimplicialLDLT<SparseD>>, 4> mass_ldlt_;
    std::array<std::unique_ptr<Eigen::SimplicialLDLT<SparseD>>, 3> bmass_ldlt_;

    void assemble();
};

// solve a real SPD factorization against a complex right-hand side
VecC solve_complex(const Eigen::SimplicialLDLT<SparseD>& ldlt, const VecC& rhs);

}  // namespace kml

#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

#include "kml/mesh.hpp"

namespace kml {

using Complex = std::complex<double>;
using VecC = Eigen::VectorXcd;
using VecD = Eigen::VectorXd;
using Vec3c = Eigen::Vector3cd;

// Complex cochain of degree k on the volume mesh or on its boundary surface.
struct DiscreteForm {
    int degree = 0;
    bool on_boundary = false;
    VecC coeffs;
    const Mesh* mesh = nullptr;

    DiscreteForm() = default;
    DiscreteForm(const Mesh& m, int k, bool boundary = false)
        : degree(k), on_boundary(boundary), mesh(&m) {
        int n = boundary ? m.n_boundary_simplices(k) : m.n_simplices(k);
        coeffs = VecC::Zero(n);
    }

    int size() const { return static_cast<int>(coeffs.size()); }

    DiscreteForm& operator+=(const DiscreteForm& o) {
        require_compatible(o);
        coeffs += o.coeffs;
        return *this;
    }
    DiscreteForm& operator-=(const DiscreteForm& o) {
        require_compatible(o);
        coeffs -= o.coeffs;
        return *this;
    }
    DiscreteForm& operator*=(Complex s) {
        coeffs *= s;
        return *this;
    }

    friend DiscreteForm operator+(DiscreteForm a, const DiscreteForm& b) { return a += b; }
    friend DiscreteForm operator-(DiscreteForm a, const DiscreteForm& b) { return a -= b; }
    friend DiscreteForm operator*(Complex s, DiscreteForm a) { return a *= s; }

    void require_compatible(const DiscreteForm& o) const {
        if (degree != o.degree || on_boundary != o.on_boundary || mesh != o.mesh)
            throw std::invalid_argument("incompatible discrete forms");
    }
};

}  // namespace kml

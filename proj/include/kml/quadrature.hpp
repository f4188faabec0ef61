#pragma once

// Quadrature rules on reference simplices (barycentric weights sum to the
// measure of the physical cell when scaled by volume/area).

#include <array>
#include <vector>

namespace kml {

struct TetQuadPoint {
    std::array<double, 4> lambda;
    double weight;  // fraction of the cell volume
};

struct TriQuadPoint {
    std::array<double, 3> lambda;
    double weight;
};

// degree: polynomial exactness requested (1, 2, 3 or 5 supported)
const std::vector<TetQuadPoint>& tet_quadrature(int degree);
const std::vector<TriQuadPoint>& tri_quadrature(int degree);

// Gauss-Legendre on [0,1]
std::vector<std::pair<double, double>> gauss_legendre_01(int n);

}  // namespace kml

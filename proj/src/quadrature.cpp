#include "kml/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace kml {

namespace {

// Grundmann-Moller simplex rule of degree 2s+1, weights normalized to sum
// to 1 (fraction of the cell volume). Has negative weights for s >= 1, which
// is harmless on the polynomial/smooth integrands used here.
std::vector<TetQuadPoint> grundmann_moller_tet(int s) {
    const int n = 3;
    const int d = 2 * s + 1;
    std::vector<TetQuadPoint> pts;
    auto factorial = [](int k) {
        double f = 1.0;
        for (int i = 2; i <= k; ++i) f *= i;
        return f;
    };
    for (int i = 0; i <= s; ++i) {
        double w = std::pow(2.0, -2.0 * s) * std::pow(double(d + n - 2 * i), double(d)) /
                   (factorial(i) * factorial(d + n - i));
        if (i % 2 == 1) w = -w;
        int rem = s - i;
        // all beta with beta0+..+beta3 = rem
        for (int b0 = 0; b0 <= rem; ++b0)
            for (int b1 = 0; b1 <= rem - b0; ++b1)
                for (int b2 = 0; b2 <= rem - b0 - b1; ++b2) {
                    int b3 = rem - b0 - b1 - b2;
                    double denom = d + n - 2 * i;
                    std::array<double, 4> l{(2 * b0 + 1) / denom, (2 * b1 + 1) / denom,
                                            (2 * b2 + 1) / denom, (2 * b3 + 1) / denom};
                    pts.push_back({l, w * 6.0});  // 6 = 1/vol(standard simplex)
                }
    }
    return pts;
}

std::vector<TetQuadPoint> make_tet_rule(int degree) {
    std::vector<TetQuadPoint> pts;
    if (degree <= 1) {
        pts.push_back({{0.25, 0.25, 0.25, 0.25}, 1.0});
    } else if (degree <= 2) {
        const double a = 0.5854101966249685, b = 0.1381966011250105;
        for (int i = 0; i < 4; ++i) {
            std::array<double, 4> l{b, b, b, b};
            l[i] = a;
            pts.push_back({l, 0.25});
        }
    } else if (degree <= 3) {
        pts = grundmann_moller_tet(1);
    } else if (degree <= 5) {
        pts = grundmann_moller_tet(2);
    } else {
        throw std::invalid_argument("tet quadrature degree not supported");
    }
    return pts;
}

std::vector<TriQuadPoint> make_tri_rule(int degree) {
    std::vector<TriQuadPoint> pts;
    if (degree <= 1) {
        pts.push_back({{1.0 / 3, 1.0 / 3, 1.0 / 3}, 1.0});
    } else if (degree <= 2) {
        for (int i = 0; i < 3; ++i) {
            std::array<double, 3> l{1.0 / 6, 1.0 / 6, 1.0 / 6};
            l[i] = 2.0 / 3;
            pts.push_back({l, 1.0 / 3});
        }
    } else if (degree <= 4) {
        // 6-point degree-4 (Dunavant)
        const double a1 = 0.445948490915965, w1 = 0.223381589678011;
        const double a2 = 0.091576213509771, w2 = 0.109951743655322;
        for (int i = 0; i < 3; ++i) {
            std::array<double, 3> l{a1, a1, a1};
            l[i] = 1.0 - 2 * a1;
            pts.push_back({l, w1});
        }
        for (int i = 0; i < 3; ++i) {
            std::array<double, 3> l{a2, a2, a2};
            l[i] = 1.0 - 2 * a2;
            pts.push_back({l, w2});
        }
    } else {
        throw std::invalid_argument("tri quadrature degree not supported");
    }
    return pts;
}

}  // namespace

const std::vector<TetQuadPoint>& tet_quadrature(int degree) {
    static const std::vector<TetQuadPoint> r1 = make_tet_rule(1);
    static const std::vector<TetQuadPoint> r2 = make_tet_rule(2);
    static const std::vector<TetQuadPoint> r3 = make_tet_rule(3);
    static const std::vector<TetQuadPoint> r5 = make_tet_rule(5);
    if (degree <= 1) return r1;
    if (degree <= 2) return r2;
    if (degree <= 3) return r3;
    if (degree <= 5) return r5;
    throw std::invalid_argument("tet quadrature degree not supported");
}

const std::vector<TriQuadPoint>& tri_quadrature(int degree) {
    static const std::vector<TriQuadPoint> r1 = make_tri_rule(1);
    static const std::vector<TriQuadPoint> r2 = make_tri_rule(2);
    static const std::vector<TriQuadPoint> r4 = make_tri_rule(4);
    if (degree <= 1) return r1;
    if (degree <= 2) return r2;
    if (degree <= 4) return r4;
    throw std::invalid_argument("tri quadrature degree not supported");
}

std::vector<std::pair<double, double>> gauss_legendre_01(int n) {
    // Newton iteration on Legendre polynomials, mapped from [-1,1] to [0,1]
    std::vector<std::pair<double, double>> out(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            double dp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        double dp = n * (x * p1 - p0) / (x * x - 1.0);
        double w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[n - 1 - i] = {0.5 * (x + 1.0), 0.5 * w};
    }
    return out;
}

}  // namespace kml

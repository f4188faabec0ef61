#pragma once

// Product metric c(e ⊕ g0) on the cylinder, with the global polar chart
// (r, θ) of the disk factor centered at an external point p. The default is
// flat (c ≡ 1, Euclidean disk), where m(r,θ) = r² and the polar-chart
// density |g|^{1/2} equals r.

#include <Eigen/Dense>

#include "kml/mesh.hpp"

namespace kml {

enum class Chart { Cartesian, Polar };

struct PolarCoords {
    double x1;
    double r;
    double theta;
};

class ProductMetric {
  public:
    // polar_center is a point of the disk factor (coordinates in the (y,z)
    // plane); it must lie strictly outside the disk of the given radius.
    ProductMetric(Eigen::Vector2d polar_center, double disk_radius,
                  double conformal_factor = 1.0);

    double conformal_factor() const { return c_; }
    const Eigen::Vector2d& polar_center() const { return p_; }

    PolarCoords polar_coords(const Vec3& point) const;
    Vec3 from_polar(const PolarCoords& pc) const;

    // |g|^{1/2} at a point, in the requested chart
    double density(const Vec3& point, Chart chart) const;

    // polar factor of the metric block: m(r,θ) = c·r² in the flat default
    double polar_factor(double r, double theta) const;

    // unit covector fields of the polar chart (flat proxies): dr and r·dθ
    Vec3 dr_covector(const Vec3& point) const;
    Vec3 dtheta_unit_covector(const Vec3& point) const;

    // distance from p to the nearest point of the disk
    double r_min() const { return r_min_; }

    void check_mesh(const Mesh& mesh) const;  // all disk points at r >= r_min

  private:
    Eigen::Vector2d p_;
    double disk_radius_;
    double c_;
    double r_min_;
};

}  // namespace kml

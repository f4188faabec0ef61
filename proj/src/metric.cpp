#include "kml/metric.hpp"

#include <cmath>
#include <stdexcept>

namespace kml {

ProductMetric::ProductMetric(Eigen::Vector2d polar_center, double disk_radius,
                             double conformal_factor)
    : p_(std::move(polar_center)), disk_radius_(disk_radius), c_(conformal_factor) {
    if (c_ <= 0) throw std::invalid_argument("conformal factor must be positive");
    r_min_ = p_.norm() - disk_radius_;
    if (r_min_ <= 0)
        throw std::invalid_argument("polar center must lie strictly outside the disk");
}

PolarCoords ProductMetric::polar_coords(const Vec3& point) const {
    Eigen::Vector2d q(point.y(), point.z());
    Eigen::Vector2d d = q - p_;
    double r = d.norm();
    if (r < 1e-14) throw std::invalid_argument("point coincides with the polar center");
    // θ measured against the ray from p through the disk center
    Eigen::Vector2d axis = -p_.normalized();
    double ct = axis.dot(d) / r;
    double st = (axis.x() * d.y() - axis.y() * d.x()) / r;
    return {point.x(), r, std::atan2(st, ct)};
}

Vec3 ProductMetric::from_polar(const PolarCoords& pc) const {
    Eigen::Vector2d axis = -p_.normalized();
    Eigen::Vector2d perp(-axis.y(), axis.x());
    Eigen::Vector2d q = p_ + pc.r * (std::cos(pc.theta) * axis + std::sin(pc.theta) * perp);
    return {pc.x1, q.x(), q.y()};
}

double ProductMetric::density(const Vec3& point, Chart chart) const {
    switch (chart) {
        case Chart::Cartesian: return std::pow(c_, 1.5);
        case Chart::Polar: return std::pow(c_, 1.5) * polar_coords(point).r;
    }
    throw std::invalid_argument("unknown chart");
}

double ProductMetric::polar_factor(double r, double /*theta*/) const { return c_ * r * r; }

Vec3 ProductMetric::dr_covector(const Vec3& point) const {
    Eigen::Vector2d d(point.y() - p_.x(), point.z() - p_.y());
    double r = d.norm();
    if (r < 1e-14) throw std::invalid_argument("point coincides with the polar center");
    d /= r;
    return {0.0, d.x(), d.y()};
}

Vec3 ProductMetric::dtheta_unit_covector(const Vec3& point) const {
    // rotate dr by +90 degrees in the disk plane: the direction of increasing θ
    Vec3 dr = dr_covector(point);
    return {0.0, -dr.z(), dr.y()};
}

void ProductMetric::check_mesh(const Mesh& mesh) const {
    for (const auto& v : mesh.vertices) {
        Eigen::Vector2d q(v.y(), v.z());
        if ((q - p_).norm() < r_min_ - 1e-9)
            throw std::runtime_error("mesh point closer to the polar center than r_min");
    }
}

}  // namespace kml

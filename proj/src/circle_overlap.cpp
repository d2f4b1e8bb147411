#include "shapeflow/circle_overlap.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "shapeflow/errors.hpp"

namespace shapeflow {

namespace {

double cross2(const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    return u.x() * v.y() - u.y() * v.x();
}

/** Area of the circular sector swept from direction u to direction v, signed. */
double sector_area(const Eigen::Vector2d& u, const Eigen::Vector2d& v, double r) {
    return 0.5 * r * r * std::atan2(cross2(u, v), u.dot(v));
}

/**
 * Signed area of disk(origin, r) intersected with triangle (origin, a, b).
 * The sign follows the orientation of (a, b) seen from the origin. Where the
 * chord a-b leaves the disk, the boundary is replaced by the arc, which gives
 * sector terms around the straight chord piece between the circle crossings.
 */
double wedge_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b, double r) {
    const Eigen::Vector2d d = b - a;
    const double dd = d.squaredNorm();
    if (dd == 0.0) return 0.0;

    const double ad = a.dot(d);
    const double disc = ad * ad - dd * (a.squaredNorm() - r * r);
    // Half-chord length is sqrt(disc/dd); below 1e-12 r counts as grazing.
    const double graze = 1e-12 * r;
    if (disc <= dd * graze * graze) return sector_area(a, b, r);

    const double sq = std::sqrt(disc);
    const double t1 = (-ad - sq) / dd;
    const double t2 = (-ad + sq) / dd;
    if (t2 <= 0.0 || t1 >= 1.0) return sector_area(a, b, r); // chord misses the segment

    const double s1 = std::max(t1, 0.0);
    const double s2 = std::min(t2, 1.0);
    const Eigen::Vector2d p1 = a + s1 * d; // equals a when a is already inside
    const Eigen::Vector2d p2 = a + s2 * d;
    return sector_area(a, p1, r) + 0.5 * cross2(p1, p2) + sector_area(p2, b, r);
}

double point_segment_distance(const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
    const Eigen::Vector2d d = v - u;
    const double dd = d.squaredNorm();
    const double t = dd == 0.0 ? 0.0 : std::clamp(-u.dot(d) / dd, 0.0, 1.0);
    return (u + t * d).norm();
}

} // namespace

double triangle_circle_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                            const Eigen::Vector2d& c, const ObstacleCircle& circle,
                            bool* degenerate) {
    if (degenerate) *degenerate = false;
    if (!(circle.radius > 0.0)) throw ContractError("obstacle radius must be positive");

    // Work relative to the circle center; normalize to counterclockwise.
    Eigen::Vector2d va = a - circle.center;
    Eigen::Vector2d vb = b - circle.center;
    Eigen::Vector2d vc = c - circle.center;
    const double doubled = cross2(vb - va, vc - va);
    if (doubled == 0.0) {
        if (degenerate) *degenerate = true;
        return 0.0;
    }
    if (doubled < 0.0) std::swap(vb, vc);
    const double tri_area = 0.5 * std::abs(doubled);

    const double r = circle.radius;
    const double r2 = r * r;
    if (va.squaredNorm() <= r2 && vb.squaredNorm() <= r2 && vc.squaredNorm() <= r2)
        return tri_area; // triangle inside the disk (convexity)

    const bool center_inside = cross2(vb - va, -va) >= 0.0 && cross2(vc - vb, -vb) >= 0.0 &&
                               cross2(va - vc, -vc) >= 0.0;
    const double edge_dist = std::min({point_segment_distance(va, vb),
                                       point_segment_distance(vb, vc),
                                       point_segment_distance(vc, va)});
    if (center_inside) {
        if (edge_dist >= r) return std::numbers::pi * r2; // disk inside the triangle
    } else if (edge_dist >= r) {
        return 0.0; // disjoint
    }

    return wedge_area(va, vb, r) + wedge_area(vb, vc, r) + wedge_area(vc, va, r);
}

double shape_circle_area(const MeshGrid& mesh, const ObstacleCircle& circle) {
    double total = 0.0;
    for (const auto& tri : mesh.triangles)
        total += triangle_circle_area(mesh.nodes[tri[0]], mesh.nodes[tri[1]],
                                      mesh.nodes[tri[2]], circle);
    return total;
}

} // namespace shapeflow

#ifndef SHAPEFLOW_CIRCLE_OVERLAP_HPP
#define SHAPEFLOW_CIRCLE_OVERLAP_HPP

#include <Eigen/Core>

#include "shapeflow/shape_grid.hpp"

namespace shapeflow {

/** Circular obstacle region. */
struct ObstacleCircle {
    Eigen::Vector2d center;
    double radius = 0.0; // meters, > 0
};

/**
 * Exact area of the intersection between triangle (a, b, c) and the disk,
 * up to floating-point rounding. Works for either vertex orientation.
 *
 * Analytically disjoint and fully-contained configurations return exactly
 * 0.0, the triangle area, or pi r^2; partial overlaps decompose each edge
 * into chord and circular-sector contributions. A grazing contact (chord
 * half-length below 1e-12 r) counts as no intersection.
 *
 * A degenerate (zero-area) triangle contributes 0; if degenerate is non-null
 * it is set accordingly.
 */
double triangle_circle_area(const Eigen::Vector2d& a, const Eigen::Vector2d& b,
                            const Eigen::Vector2d& c, const ObstacleCircle& circle,
                            bool* degenerate = nullptr);

/** Sum of triangle_circle_area over all mesh elements. */
double shape_circle_area(const MeshGrid& mesh, const ObstacleCircle& circle);

} // namespace shapeflow

#endif

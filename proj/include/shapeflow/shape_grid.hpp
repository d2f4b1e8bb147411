#ifndef SHAPEFLOW_SHAPE_GRID_HPP
#define SHAPEFLOW_SHAPE_GRID_HPP

#include <array>
#include <vector>

#include <Eigen/Core>

#include "shapeflow/bspline.hpp"

namespace shapeflow {

/**
 * Spline coefficients describing a rod-like shape by its meanline (centerline
 * height) and thickness along x. Coefficients marked free in free_mask are
 * optimization variables; the others are pinned by the boundary conditions
 * and never move. The mask covers the meanline block first, then thickness.
 */
struct ShapeParams {
    Eigen::VectorXd meanline;  // n_basis coefficients, meters
    Eigen::VectorXd thickness; // n_basis coefficients, meters, each > 0
    std::vector<bool> free_mask; // size 2 * n_basis

    int n_coeffs() const { return static_cast<int>(meanline.size()); }
    int n_free() const;
};

enum class EdgeTag { Dirichlet, NeumannFixed, NeumannFree };

struct BoundaryEdge {
    int a, b; // node indices, ordered along the boundary edge
    EdgeTag tag;
};

/**
 * Structured triangulation of a shape. Node columns share fixed x positions
 * across all shapes of the same resolution; only the y coordinates follow the
 * spline coefficients. Node ids are column-major: id = column * n_y + row.
 */
struct MeshGrid {
    int n_x = 0, n_y = 0;
    std::vector<Eigen::Vector2d> nodes;
    std::vector<std::array<int, 3>> triangles; // counterclockwise
    std::vector<BoundaryEdge> boundary;

    int node_id(int column, int row) const { return column * n_y + row; }
    int n_nodes() const { return static_cast<int>(nodes.size()); }

    /** Node indices on the Dirichlet (left) edge, ascending. */
    std::vector<int> dirichlet_nodes() const;

    double triangle_area(int t) const;
};

/**
 * Discretizes the shape described by params on an n_x-by-n_y grid over
 * [0, length]. Column i sits at x = i * length / (n_x - 1); its n_y nodes are
 * equispaced between meanline - thickness/2 and meanline + thickness/2. Each
 * grid cell is split into two triangles along the lower-left to upper-right
 * diagonal. Boundary tags: left Dirichlet, right NeumannFixed, top and bottom
 * NeumannFree.
 *
 * Throws DegenerateShapeError if the thickness evaluates non-positive at any
 * column.
 */
MeshGrid shape_from_params(const ShapeParams& params, const BSplineBasis& basis,
                           int n_x, int n_y, double length);

/** Free coefficients of params, meanline block first. */
Eigen::VectorXd params_to_flat(const ShapeParams& params);

/** Rebuilds full params from a free-coefficient vector; pinned entries are
 *  taken from the template. Throws ContractError on dimension mismatch. */
ShapeParams flat_to_params(const Eigen::VectorXd& flat, const ShapeParams& pinned_template);

/**
 * Sensitivity of node y coordinates with respect to the free coefficients:
 * S(node, j) = d y_node / d flat_j. The map from coefficients to node
 * positions is affine, so S depends only on the basis, the mask and the grid
 * resolution, not on the coefficient values. x coordinates do not move.
 */
Eigen::MatrixXd node_y_sensitivity(const ShapeParams& params, const BSplineBasis& basis,
                                   int n_x, int n_y);

} // namespace shapeflow

#endif

#ifndef SHAPEFLOW_OBJECTIVES_HPP
#define SHAPEFLOW_OBJECTIVES_HPP

#include <memory>

#include <Eigen/Core>

#include "shapeflow/bspline.hpp"
#include "shapeflow/circle_overlap.hpp"
#include "shapeflow/elasticity.hpp"
#include "shapeflow/shape_grid.hpp"

namespace shapeflow {

/** Scalarization weights and the penetration penalty coefficient. */
struct ObjectiveWeights {
    double lambda1 = 0.0, lambda2 = 0.0, lambda3 = 0.0;
    double penalty = 0.0; // multiplies the obstacle overlap area

    /** Validates strict positivity and lambda1+lambda2+lambda3 = 1 (1e-12). */
    static ObjectiveWeights make(double lambda1, double lambda2, double lambda3,
                                 double penalty);
};

struct ObjectiveValue {
    double j1 = 0.0, j2 = 0.0, j3 = 0.0;
    double j_lambda = 0.0; // stored exactly as recombined from the weights
};

/**
 * Failure-intensity functional: mean over the unit circle of the positive
 * normal-stress ratio raised to the Weibull module, integrated over the
 * shape. Stresses are piecewise constant, so the element integral is the
 * element area times the angular mean, evaluated with n_angles equispaced
 * angles (exact for trigonometric polynomials of degree < n_angles).
 */
double eval_J1(const MeshGrid& mesh, const FemSolution& sol, const MaterialParams& mat,
               int n_angles = 64);

/** Shape volume (area in 2D): sum of triangle areas. */
double eval_J2(const MeshGrid& mesh);

/** Penalty times the shape/obstacle overlap area. */
double eval_J3(const MeshGrid& mesh, const ObstacleCircle& circle, double penalty);

/** Per-objective gradients over the free coefficients. */
struct GradientDetail {
    Eigen::VectorXd g1, g2, g3;
    bool one_sided_j3 = false; // an FD probe hit the thickness-positivity boundary
};

/**
 * Evaluates J_lambda and its gradient as functions of the free coefficient
 * vector. Holds the problem data (basis, pinned coefficients, mesh
 * resolution, material, loads, obstacle, weights) and caches the mesh and
 * FEM solve of the most recent q, so value followed by gradient at the same
 * point costs one solve. Instances are not safe for concurrent use; distinct
 * instances are independent.
 *
 * Gradients: J1 by the discrete adjoint (one extra solve with the cached
 * factorization), J2 analytically, both mapped through the exact spline
 * sensitivity of node heights; J3 by central finite differences with step
 * max(1e-6 |q_k|, 1e-8), falling back to one-sided at the feasibility
 * boundary.
 */
class ObjectiveEvaluator {
  public:
    ObjectiveEvaluator(BSplineBasis basis, ShapeParams pinned, int n_x, int n_y,
                       double length, MaterialParams material, BoundaryLoads loads,
                       ObstacleCircle obstacle, ObjectiveWeights weights, int n_angles = 64);
    ~ObjectiveEvaluator();
    ObjectiveEvaluator(ObjectiveEvaluator&&) noexcept;

    ObjectiveValue value(const Eigen::VectorXd& q) const;
    /** J_lambda only; +infinity for infeasible q (line-search probing). */
    double value_or_inf(const Eigen::VectorXd& q) const;
    Eigen::VectorXd gradient(const Eigen::VectorXd& q) const;
    GradientDetail gradient_detail(const Eigen::VectorXd& q) const;

    /** Sub-scalarization w J1 + (1-w) J2 and its gradient (front tracing). */
    double biobjective(const Eigen::VectorXd& q, double w) const;
    double biobjective_or_inf(const Eigen::VectorXd& q, double w) const;
    Eigen::VectorXd biobjective_gradient(const Eigen::VectorXd& q, double w) const;

    /**
     * Finite-difference gradient of the penalty term alone.  Purely geometric:
     * needs no elastic solve, so it works even where the state problem is too
     * ill-conditioned to factor.  Probes that would invert the shape drop to a
     * one-sided difference, reported through one_sided.
     */
    Eigen::VectorXd penalty_gradient(const Eigen::VectorXd& q, bool* one_sided) const;

    MeshGrid mesh_at(const Eigen::VectorXd& q) const;
    ShapeParams params_at(const Eigen::VectorXd& q) const;

    const ShapeParams& pinned() const { return pinned_; }
    const BSplineBasis& basis() const { return basis_; }
    const ObjectiveWeights& weights() const { return weights_; }
    const ObstacleCircle& obstacle() const { return obstacle_; }
    const MaterialParams& material() const { return material_; }
    int n_x() const { return n_x_; }
    int n_y() const { return n_y_; }
    double length() const { return length_; }

  private:
    struct Cache;

    void ensure(const Eigen::VectorXd& q) const;

    BSplineBasis basis_;
    ShapeParams pinned_;
    int n_x_, n_y_;
    double length_;
    MaterialParams material_;
    BoundaryLoads loads_;
    ObstacleCircle obstacle_;
    ObjectiveWeights weights_;
    int n_angles_;
    mutable std::unique_ptr<Cache> cache_;
};

} // namespace shapeflow

#endif

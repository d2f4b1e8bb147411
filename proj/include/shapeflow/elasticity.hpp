#ifndef SHAPEFLOW_ELASTICITY_HPP
#define SHAPEFLOW_ELASTICITY_HPP

#include <array>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "shapeflow/shape_grid.hpp"

namespace shapeflow {

/**
 * Material constants. The Lame pair is derived from (E, nu) with the plane
 * strain formulas lambda = nu E / ((1+nu)(1-2nu)), mu = E / (2(1+nu)).
 */
struct MaterialParams {
    double youngs_modulus = 0.0; // Pa
    double poisson_ratio = 0.0;
    double lame_lambda = 0.0; // Pa, derived
    double lame_mu = 0.0;     // Pa, derived
    double weibull_module = 0.0;
    double sigma0 = 0.0; // Pa, reference strength in the failure integrand

    /** Validates E > 0, 0 <= nu < 0.5, m >= 1, sigma0 > 0 and derives the
     *  Lame constants. nu = 0 is allowed: the clamped-edge patch test admits
     *  an exact constant-stress solution only there. */
    static MaterialParams make(double youngs_modulus, double poisson_ratio,
                               double weibull_module, double sigma0);
};

/** Loads of the pull problem: traction on NeumannFixed edges, body force. */
struct BoundaryLoads {
    Eigen::Vector2d traction = Eigen::Vector2d::Zero();     // Pa
    Eigen::Vector2d volume_force = Eigen::Vector2d::Zero(); // Pa/m
};

/**
 * Assembled linear system before Dirichlet elimination. Dof numbering is
 * (2*node, 2*node+1) for the x and y displacement components.
 */
struct FemSystem {
    Eigen::SparseMatrix<double> stiffness; // 2N x 2N, symmetric
    Eigen::VectorXd load;                  // 2N
    std::vector<int> free_dofs;            // ascending, excludes Dirichlet dofs
};

struct FemSolution {
    Eigen::VectorXd displacement;        // 2N, zero at Dirichlet dofs
    std::vector<Eigen::Matrix2d> strain; // per element, symmetric
    std::vector<Eigen::Matrix2d> stress; // per element, symmetric, Pa
};

/**
 * Per-element strain-displacement data for one P1 triangle, with derivatives
 * with respect to the vertex y coordinates (x coordinates are fixed by the
 * grid, so only y enters shape sensitivities). Strain components are ordered
 * (e_xx, e_yy, gamma_xy) with the engineering shear gamma = 2 e_xy.
 */
struct ElementGeometry {
    std::array<int, 3> verts{};
    double area = 0.0;
    Eigen::Matrix<double, 3, 6> b_matrix;
    std::array<double, 3> darea_dy{};
    std::array<Eigen::Matrix<double, 3, 6>, 3> db_dy;

    static ElementGeometry from_mesh(const MeshGrid& mesh, int t);
};

/** Constitutive matrix mapping (e_xx, e_yy, gamma_xy) to (s_xx, s_yy, s_xy). */
Eigen::Matrix3d constitutive_matrix(const MaterialParams& mat);

/**
 * Assembles stiffness and load for the state equation: traction on
 * NeumannFixed edges (two-point Gauss per edge), body force by centroid
 * quadrature, homogeneous Dirichlet on the left edge handled by free_dofs.
 * Throws ContractError when the mesh has no Dirichlet edge (singular system).
 */
FemSystem assemble_system(const MeshGrid& mesh, const MaterialParams& mat,
                          const BoundaryLoads& loads);

/**
 * Direct factorization of the free-dof block, reusable across right-hand
 * sides (the state and adjoint solves share one factorization).
 */
class ReducedSolver {
  public:
    /** Throws NumericalError when the factorization fails. */
    explicit ReducedSolver(const FemSystem& system);

    /** Solves on the free dofs and scatters back; pinned entries are zero.
     *  Throws NumericalError when the relative residual exceeds 1e-10. */
    Eigen::VectorXd solve(const Eigen::VectorXd& rhs_full) const;

  private:
    int n_dofs_;
    std::vector<int> free_dofs_;
    Eigen::SparseMatrix<double> k_red_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
};

/** Per-element strain and stress recovery from a nodal displacement field. */
FemSolution recover_solution(const MeshGrid& mesh, const MaterialParams& mat,
                             const Eigen::VectorXd& displacement);

/**
 * Direct sparse solve of the reduced system, then per-element strain and
 * stress recovery. Throws NumericalError on factorization failure or when the
 * reduced residual exceeds 1e-10 relative.
 */
FemSolution solve_state(const FemSystem& system, const MeshGrid& mesh,
                        const MaterialParams& mat);

} // namespace shapeflow

#endif

#include "shapeflow/elasticity.hpp"

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/SparseCholesky>

#include "shapeflow/errors.hpp"

namespace shapeflow {

MaterialParams MaterialParams::make(double youngs_modulus, double poisson_ratio,
                                    double weibull_module, double sigma0) {
    if (!(youngs_modulus > 0.0))
        throw ConfigError("material.youngs_modulus must be positive");
    if (!(poisson_ratio >= 0.0 && poisson_ratio < 0.5))
        throw ConfigError("material.poisson_ratio must lie in [0, 0.5)");
    if (!(weibull_module >= 1.0))
        throw ConfigError("material.weibull_module must be >= 1");
    if (!(sigma0 > 0.0)) throw ConfigError("material.sigma0 must be positive");

    MaterialParams mat;
    mat.youngs_modulus = youngs_modulus;
    mat.poisson_ratio = poisson_ratio;
    mat.lame_lambda = poisson_ratio * youngs_modulus /
                      ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
    mat.lame_mu = youngs_modulus / (2.0 * (1.0 + poisson_ratio));
    mat.weibull_module = weibull_module;
    mat.sigma0 = sigma0;
    return mat;
}

Eigen::Matrix3d constitutive_matrix(const MaterialParams& mat) {
    Eigen::Matrix3d d = Eigen::Matrix3d::Zero();
    d(0, 0) = d(1, 1) = mat.lame_lambda + 2.0 * mat.lame_mu;
    d(0, 1) = d(1, 0) = mat.lame_lambda;
    d(2, 2) = mat.lame_mu;
    return d;
}

ElementGeometry ElementGeometry::from_mesh(const MeshGrid& mesh, int t) {
    ElementGeometry geo;
    geo.verts = mesh.triangles[t];
    const Eigen::Vector2d z1 = mesh.nodes[geo.verts[0]];
    const Eigen::Vector2d z2 = mesh.nodes[geo.verts[1]];
    const Eigen::Vector2d z3 = mesh.nodes[geo.verts[2]];

    const double b1 = z2.y() - z3.y(), b2 = z3.y() - z1.y(), b3 = z1.y() - z2.y();
    const double c1 = z3.x() - z2.x(), c2 = z1.x() - z3.x(), c3 = z2.x() - z1.x();
    geo.area = 0.5 * ((z2.x() - z1.x()) * (z3.y() - z1.y()) -
                      (z3.x() - z1.x()) * (z2.y() - z1.y()));
    if (!(geo.area > 0.0))
        throw ContractError("element " + std::to_string(t) + " has non-positive area");

    const double inv2a = 1.0 / (2.0 * geo.area);
    Eigen::Matrix<double, 3, 6> bhat = Eigen::Matrix<double, 3, 6>::Zero();
    bhat(0, 0) = b1; bhat(0, 2) = b2; bhat(0, 4) = b3;
    bhat(1, 1) = c1; bhat(1, 3) = c2; bhat(1, 5) = c3;
    bhat(2, 0) = c1; bhat(2, 1) = b1;
    bhat(2, 2) = c2; bhat(2, 3) = b2;
    bhat(2, 4) = c3; bhat(2, 5) = b3;
    geo.b_matrix = inv2a * bhat;

    geo.darea_dy = {0.5 * c1, 0.5 * c2, 0.5 * c3};
    // b_i depend linearly on the vertex y's; the c_i and the x grid are fixed.
    const std::array<std::array<double, 3>, 3> db = {{
        {0.0, -1.0, 1.0},  // d(b1,b2,b3)/dy1
        {1.0, 0.0, -1.0},  // d(b1,b2,b3)/dy2
        {-1.0, 1.0, 0.0},  // d(b1,b2,b3)/dy3
    }};
    for (int v = 0; v < 3; ++v) {
        Eigen::Matrix<double, 3, 6> dbhat = Eigen::Matrix<double, 3, 6>::Zero();
        dbhat(0, 0) = db[v][0]; dbhat(0, 2) = db[v][1]; dbhat(0, 4) = db[v][2];
        dbhat(2, 1) = db[v][0]; dbhat(2, 3) = db[v][1]; dbhat(2, 5) = db[v][2];
        geo.db_dy[v] = inv2a * dbhat - (geo.darea_dy[v] / geo.area) * geo.b_matrix;
    }
    return geo;
}

FemSystem assemble_system(const MeshGrid& mesh, const MaterialParams& mat,
                          const BoundaryLoads& loads) {
    const int n_dofs = 2 * mesh.n_nodes();
    const Eigen::Matrix3d d = constitutive_matrix(mat);

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.triangles.size() * 36);
    FemSystem system;
    system.load = Eigen::VectorXd::Zero(n_dofs);

    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
        const auto geo = ElementGeometry::from_mesh(mesh, t);
        Eigen::Matrix<double, 6, 6> ke = geo.area * geo.b_matrix.transpose() * d * geo.b_matrix;
        ke = 0.5 * (ke + ke.transpose().eval()); // bitwise symmetry for the scatter
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b)
                        triplets.emplace_back(2 * geo.verts[i] + a, 2 * geo.verts[j] + b,
                                              ke(2 * i + a, 2 * j + b));
            }
        }
        // Centroid quadrature of the body force: A/3 per vertex.
        for (int i = 0; i < 3; ++i)
            system.load.segment<2>(2 * geo.verts[i]) += (geo.area / 3.0) * loads.volume_force;
    }

    bool has_dirichlet = false;
    std::vector<bool> pinned(mesh.n_nodes(), false);
    for (const auto& edge : mesh.boundary) {
        if (edge.tag == EdgeTag::Dirichlet) {
            has_dirichlet = true;
            pinned[edge.a] = pinned[edge.b] = true;
        } else if (edge.tag == EdgeTag::NeumannFixed) {
            // Two-point Gauss on the edge; for constant traction this is the
            // half-length split between the end nodes.
            const double len = (mesh.nodes[edge.b] - mesh.nodes[edge.a]).norm();
            system.load.segment<2>(2 * edge.a) += 0.5 * len * loads.traction;
            system.load.segment<2>(2 * edge.b) += 0.5 * len * loads.traction;
        }
    }
    if (!has_dirichlet)
        throw ContractError("mesh has no Dirichlet edge; the system would be singular");

    system.stiffness.resize(n_dofs, n_dofs);
    system.stiffness.setFromTriplets(triplets.begin(), triplets.end());

    system.free_dofs.reserve(n_dofs);
    for (int node = 0; node < mesh.n_nodes(); ++node) {
        if (pinned[node]) continue;
        system.free_dofs.push_back(2 * node);
        system.free_dofs.push_back(2 * node + 1);
    }
    return system;
}

ReducedSolver::ReducedSolver(const FemSystem& system)
    : n_dofs_(static_cast<int>(system.load.size())), free_dofs_(system.free_dofs) {
    const int n_free = static_cast<int>(free_dofs_.size());
    std::vector<int> full_to_free(n_dofs_, -1);
    for (int k = 0; k < n_free; ++k) full_to_free[free_dofs_[k]] = k;

    // Keep only the free-dof block; homogeneous Dirichlet contributes nothing
    // to any right-hand side.
    std::vector<Eigen::Triplet<double>> triplets;
    for (int col = 0; col < system.stiffness.outerSize(); ++col) {
        const int jc = full_to_free[col];
        if (jc < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(system.stiffness, col); it; ++it) {
            const int ir = full_to_free[it.row()];
            if (ir >= 0) triplets.emplace_back(ir, jc, it.value());
        }
    }
    k_red_.resize(n_free, n_free);
    k_red_.setFromTriplets(triplets.begin(), triplets.end());

    ldlt_.compute(k_red_);
    if (ldlt_.info() != Eigen::Success)
        throw NumericalError("stiffness factorization failed (matrix not SPD?)");
}

Eigen::VectorXd ReducedSolver::solve(const Eigen::VectorXd& rhs_full) const {
    const int n_free = static_cast<int>(free_dofs_.size());
    Eigen::VectorXd rhs_red(n_free);
    for (int k = 0; k < n_free; ++k) rhs_red[k] = rhs_full[free_dofs_[k]];

    const Eigen::VectorXd u_red = ldlt_.solve(rhs_red);
    if (ldlt_.info() != Eigen::Success) throw NumericalError("stiffness solve failed");

    const double rhs_norm = rhs_red.norm();
    if (rhs_norm > 0.0) {
        const double rel_residual = (k_red_ * u_red - rhs_red).norm() / rhs_norm;
        if (!(rel_residual <= 1e-10))
            throw NumericalError("solve residual " + std::to_string(rel_residual) +
                                 " exceeds 1e-10");
    }

    Eigen::VectorXd full = Eigen::VectorXd::Zero(n_dofs_);
    for (int k = 0; k < n_free; ++k) full[free_dofs_[k]] = u_red[k];
    return full;
}

FemSolution recover_solution(const MeshGrid& mesh, const MaterialParams& mat,
                             const Eigen::VectorXd& displacement) {
    FemSolution sol;
    sol.displacement = displacement;
    const int n_elems = static_cast<int>(mesh.triangles.size());
    sol.strain.resize(n_elems);
    sol.stress.resize(n_elems);
    for (int t = 0; t < n_elems; ++t) {
        const auto geo = ElementGeometry::from_mesh(mesh, t);
        Eigen::Matrix<double, 6, 1> ue;
        for (int i = 0; i < 3; ++i)
            ue.segment<2>(2 * i) = displacement.segment<2>(2 * geo.verts[i]);
        const Eigen::Vector3d voigt = geo.b_matrix * ue; // (e_xx, e_yy, gamma)
        Eigen::Matrix2d eps;
        eps << voigt[0], 0.5 * voigt[2], 0.5 * voigt[2], voigt[1];
        sol.strain[t] = eps;
        sol.stress[t] = mat.lame_lambda * eps.trace() * Eigen::Matrix2d::Identity() +
                        2.0 * mat.lame_mu * eps;
    }
    return sol;
}

FemSolution solve_state(const FemSystem& system, const MeshGrid& mesh,
                        const MaterialParams& mat) {
    const ReducedSolver solver(system);
    return recover_solution(mesh, mat, solver.solve(system.load));
}

} // namespace shapeflow

#pragma once

#include <Eigen/Dense>
#include <vector>

#include "shapeflow/objectives.hpp"

namespace shapeflow {

/** One converged (or flagged) point of the biobjective sweep. */
struct FrontPoint {
    double weight = 0.0; // weight on the failure objective
    Eigen::VectorXd q_opt;
    double j1 = 0.0;
    double j2 = 0.0;
    bool converged = false;
};

/** count weights equispaced strictly inside (0,1): k/(count+1), k = 1..count. */
std::vector<double> equispaced_weights(int count = 21);

/**
 * Sweeps the scalarization w J1 + (1-w) J2 across the given strictly monotone
 * weights, solving each with Armijo descent and warm-starting from the last
 * converged optimum.  Non-converged weights are flagged, never fatal; a solve
 * that fails outright yields a flagged point with NaN objectives.
 */
std::vector<FrontPoint> trace_front(const ObjectiveEvaluator& evaluator,
                                    const Eigen::VectorXd& q_start,
                                    const std::vector<double>& weights, double tol = 1e-5,
                                    int max_iter_each = 500);

/**
 * Maximal non-dominated subset (minimizing both objectives); output is in
 * stable order by j2.  Exact duplicates do not dominate each other.
 */
std::vector<FrontPoint> dominance_filter(const std::vector<FrontPoint>& points);

} // namespace shapeflow

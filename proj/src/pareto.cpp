#include "shapeflow/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "shapeflow/errors.hpp"
#include "shapeflow/optimize.hpp"

namespace shapeflow {

std::vector<double> equispaced_weights(int count) {
    if (count < 1) throw ContractError("weight count must be positive");
    std::vector<double> weights(count);
    for (int k = 0; k < count; ++k) weights[k] = (k + 1) / static_cast<double>(count + 1);
    return weights;
}

std::vector<FrontPoint> trace_front(const ObjectiveEvaluator& evaluator,
                                    const Eigen::VectorXd& q_start,
                                    const std::vector<double>& weights, double tol,
                                    int max_iter_each) {
    if (weights.empty()) throw ContractError("weight sweep is empty");
    for (const double w : weights)
        if (!(w > 0.0 && w < 1.0))
            throw ContractError("sweep weights must lie strictly inside (0,1)");
    const bool increasing = weights.back() > weights.front();
    for (size_t k = 1; k < weights.size(); ++k)
        if (increasing ? !(weights[k] > weights[k - 1]) : !(weights[k] < weights[k - 1]))
            throw ContractError("sweep weights must be strictly monotone");

    std::vector<FrontPoint> front;
    front.reserve(weights.size());
    Eigen::VectorXd warm = q_start;
    for (const double w : weights) {
        FrontPoint point;
        point.weight = w;
        try {
            const auto run = gradient_descent_armijo(
                warm, [&](const Eigen::VectorXd& q) { return evaluator.biobjective_or_inf(q, w); },
                [&](const Eigen::VectorXd& q) { return evaluator.biobjective_gradient(q, w); },
                tol, max_iter_each);
            point.q_opt = run.q;
            const ObjectiveValue value = evaluator.value(run.q);
            point.j1 = value.j1;
            point.j2 = value.j2;
            point.converged = run.reason == StopReason::converged;
            if (point.converged) warm = run.q;
        } catch (const std::exception&) {
            point.q_opt = warm;
            point.j1 = point.j2 = std::numeric_limits<double>::quiet_NaN();
            point.converged = false;
        }
        front.push_back(std::move(point));
    }
    return front;
}

std::vector<FrontPoint> dominance_filter(const std::vector<FrontPoint>& points) {
    const size_t n = points.size();
    std::vector<size_t> order(n);
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return points[a].j2 < points[b].j2; });

    // Staircase sweep over groups of equal j2: a point survives unless some
    // strictly-lower-j2 point has j1 <= its own, or a same-j2 point has
    // strictly smaller j1.
    std::vector<char> keep(n, 1);
    double best_prev = std::numeric_limits<double>::infinity();
    size_t i = 0;
    while (i < n) {
        size_t j = i;
        double group_min = std::numeric_limits<double>::infinity();
        while (j < n && !(points[order[j]].j2 > points[order[i]].j2)) {
            group_min = std::min(group_min, points[order[j]].j1);
            ++j;
        }
        for (size_t k = i; k < j; ++k) {
            const double j1 = points[order[k]].j1;
            if (best_prev <= j1 || group_min < j1) keep[order[k]] = 0;
        }
        best_prev = std::min(best_prev, group_min);
        i = j;
    }

    std::vector<FrontPoint> out;
    for (size_t k = 0; k < n; ++k)
        if (keep[order[k]]) out.push_back(points[order[k]]);
    return out;
}

} // namespace shapeflow

#include "shapeflow/objectives.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "shapeflow/errors.hpp"

namespace shapeflow {

namespace {

/** Equispaced angles on [0, 2pi): exact for trig polynomials of degree < n. */
struct AngularRule {
    std::vector<double> cos2, sin2, sincos;

    explicit AngularRule(int n) : cos2(n), sin2(n), sincos(n) {
        for (int i = 0; i < n; ++i) {
            const double phi = 2.0 * std::numbers::pi * i / n;
            const double c = std::cos(phi), s = std::sin(phi);
            cos2[i] = c * c;
            sin2[i] = s * s;
            sincos[i] = s * c;
        }
    }

    int size() const { return static_cast<int>(cos2.size()); }
};

/** Angular mean of ((n' sigma n)+ / sigma0)^m. */
double failure_mean(const Eigen::Matrix2d& sigma, double m, double sigma0,
                    const AngularRule& rule) {
    double acc = 0.0;
    for (int i = 0; i < rule.size(); ++i) {
        const double sn = sigma(0, 0) * rule.cos2[i] + sigma(1, 1) * rule.sin2[i] +
                          2.0 * sigma(0, 1) * rule.sincos[i];
        if (sn > 0.0) acc += std::pow(sn / sigma0, m);
    }
    return acc / rule.size();
}

/** Derivative of failure_mean with respect to (s_xx, s_yy, s_xy). */
Eigen::Vector3d failure_mean_grad(const Eigen::Matrix2d& sigma, double m, double sigma0,
                                  const AngularRule& rule) {
    Eigen::Vector3d grad = Eigen::Vector3d::Zero();
    for (int i = 0; i < rule.size(); ++i) {
        const double sn = sigma(0, 0) * rule.cos2[i] + sigma(1, 1) * rule.sin2[i] +
                          2.0 * sigma(0, 1) * rule.sincos[i];
        if (sn > 0.0) {
            const double f = m * std::pow(sn / sigma0, m - 1.0) / sigma0;
            grad[0] += f * rule.cos2[i];
            grad[1] += f * rule.sin2[i];
            grad[2] += f * 2.0 * rule.sincos[i];
        }
    }
    return grad / rule.size();
}

} // namespace

ObjectiveWeights ObjectiveWeights::make(double lambda1, double lambda2, double lambda3,
                                        double penalty) {
    if (!(lambda1 > 0.0 && lambda2 > 0.0 && lambda3 > 0.0))
        throw ConfigError("weights.lambda components must be strictly positive");
    if (std::abs(lambda1 + lambda2 + lambda3 - 1.0) > 1e-12)
        throw ConfigError("weights.lambda components must sum to 1");
    if (!(penalty > 0.0)) throw ConfigError("weights.penalty must be positive");
    return {lambda1, lambda2, lambda3, penalty};
}

double eval_J1(const MeshGrid& mesh, const FemSolution& sol, const MaterialParams& mat,
               int n_angles) {
    if (sol.stress.size() != mesh.triangles.size())
        throw ContractError("eval_J1 needs a solved state for this mesh");
    if (n_angles < 4) throw ContractError("eval_J1 needs at least 4 quadrature angles");

    const AngularRule rule(n_angles);
    double total = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t)
        total += mesh.triangle_area(t) *
                 failure_mean(sol.stress[t], mat.weibull_module, mat.sigma0, rule);
    return total;
}

double eval_J2(const MeshGrid& mesh) {
    double total = 0.0;
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t)
        total += mesh.triangle_area(t);
    return total;
}

double eval_J3(const MeshGrid& mesh, const ObstacleCircle& circle, double penalty) {
    return penalty * shape_circle_area(mesh, circle);
}

struct ObjectiveEvaluator::Cache {
    Eigen::VectorXd q;
    ShapeParams params;
    MeshGrid mesh;
    FemSystem system;
    std::unique_ptr<ReducedSolver> solver;
    FemSolution sol;
    ObjectiveValue value;
};

ObjectiveEvaluator::ObjectiveEvaluator(BSplineBasis basis, ShapeParams pinned, int n_x,
                                       int n_y, double length, MaterialParams material,
                                       BoundaryLoads loads, ObstacleCircle obstacle,
                                       ObjectiveWeights weights, int n_angles)
    : basis_(std::move(basis)), pinned_(std::move(pinned)), n_x_(n_x), n_y_(n_y),
      length_(length), material_(material), loads_(loads), obstacle_(obstacle),
      weights_(weights), n_angles_(n_angles) {
    if (pinned_.n_coeffs() != basis_.size())
        throw ContractError("pinned coefficient template does not match the basis");
}

ObjectiveEvaluator::~ObjectiveEvaluator() = default;
ObjectiveEvaluator::ObjectiveEvaluator(ObjectiveEvaluator&&) noexcept = default;

void ObjectiveEvaluator::ensure(const Eigen::VectorXd& q) const {
    if (cache_ && cache_->q.size() == q.size() && (cache_->q.array() == q.array()).all())
        return;

    auto next = std::make_unique<Cache>();
    next->q = q;
    next->params = flat_to_params(q, pinned_);
    next->mesh = shape_from_params(next->params, basis_, n_x_, n_y_, length_);
    next->system = assemble_system(next->mesh, material_, loads_);
    next->solver = std::make_unique<ReducedSolver>(next->system);
    next->sol = recover_solution(next->mesh, material_, next->solver->solve(next->system.load));

    ObjectiveValue value;
    value.j1 = eval_J1(next->mesh, next->sol, material_, n_angles_);
    value.j2 = eval_J2(next->mesh);
    value.j3 = eval_J3(next->mesh, obstacle_, weights_.penalty);
    value.j_lambda = weights_.lambda1 * value.j1 + weights_.lambda2 * value.j2 +
                     weights_.lambda3 * value.j3;
    next->value = value;
    cache_ = std::move(next);
}

ObjectiveValue ObjectiveEvaluator::value(const Eigen::VectorXd& q) const {
    ensure(q);
    return cache_->value;
}

double ObjectiveEvaluator::value_or_inf(const Eigen::VectorXd& q) const {
    try {
        return value(q).j_lambda;
    } catch (const DegenerateShapeError&) {
        return std::numeric_limits<double>::infinity();
    } catch (const NumericalError&) {
        // A probe too distorted to factor reliably counts as infeasible.
        return std::numeric_limits<double>::infinity();
    }
}

Eigen::VectorXd ObjectiveEvaluator::gradient(const Eigen::VectorXd& q) const {
    const GradientDetail detail = gradient_detail(q);
    return weights_.lambda1 * detail.g1 + weights_.lambda2 * detail.g2 +
           weights_.lambda3 * detail.g3;
}

GradientDetail ObjectiveEvaluator::gradient_detail(const Eigen::VectorXd& q) const {
    ensure(q);
    const Cache& c = *cache_;
    const int n_nodes = c.mesh.n_nodes();
    const int n_elems = static_cast<int>(c.mesh.triangles.size());
    const AngularRule rule(n_angles_);
    const Eigen::Matrix3d d = constitutive_matrix(material_);

    // Nodal shape derivatives with respect to the y coordinate of each node;
    // x coordinates are fixed by the grid and never enter.
    Eigen::VectorXd dj1_dy = Eigen::VectorXd::Zero(n_nodes);
    Eigen::VectorXd dj2_dy = Eigen::VectorXd::Zero(n_nodes);
    Eigen::VectorXd adjoint_rhs = Eigen::VectorXd::Zero(2 * n_nodes);

    std::vector<ElementGeometry> geos;
    geos.reserve(n_elems);
    std::vector<Eigen::Vector3d> dmeans(n_elems);

    for (int t = 0; t < n_elems; ++t) {
        geos.push_back(ElementGeometry::from_mesh(c.mesh, t));
        const ElementGeometry& geo = geos.back();
        Eigen::Matrix<double, 6, 1> ue;
        for (int i = 0; i < 3; ++i)
            ue.segment<2>(2 * i) = c.sol.displacement.segment<2>(2 * geo.verts[i]);

        const double mean = failure_mean(c.sol.stress[t], material_.weibull_module,
                                         material_.sigma0, rule);
        dmeans[t] = failure_mean_grad(c.sol.stress[t], material_.weibull_module,
                                      material_.sigma0, rule);

        // dJ1/du restricted to this element: A * dmean' D B.
        const Eigen::Matrix<double, 1, 6> du_row =
            geo.area * dmeans[t].transpose() * d * geo.b_matrix;
        for (int i = 0; i < 3; ++i)
            adjoint_rhs.segment<2>(2 * geo.verts[i]) += du_row.segment<2>(2 * i).transpose();

        for (int v = 0; v < 3; ++v) {
            dj2_dy[geo.verts[v]] += geo.darea_dy[v];
            // Explicit y-dependence of J1: element area and the strain map B.
            dj1_dy[geo.verts[v]] += geo.darea_dy[v] * mean +
                                    geo.area * dmeans[t].dot(d * (geo.db_dy[v] * ue));
        }
    }

    // One extra solve with the cached factorization gives the adjoint field.
    const Eigen::VectorXd mult = c.solver->solve(adjoint_rhs);

    for (int t = 0; t < n_elems; ++t) {
        const ElementGeometry& geo = geos[t];
        Eigen::Matrix<double, 6, 1> ue, le;
        for (int i = 0; i < 3; ++i) {
            ue.segment<2>(2 * i) = c.sol.displacement.segment<2>(2 * geo.verts[i]);
            le.segment<2>(2 * i) = mult.segment<2>(2 * geo.verts[i]);
        }
        const Eigen::Vector3d bu = geo.b_matrix * ue;
        const Eigen::Vector3d bl = geo.b_matrix * le;
        const double mult_dot_f = (le.segment<2>(0) + le.segment<2>(2) + le.segment<2>(4))
                                      .dot(loads_.volume_force);

        for (int v = 0; v < 3; ++v) {
            // mult' (dK/dy) u for this element and vertex.
            const double dk_term =
                geo.darea_dy[v] * bl.dot(d * bu) +
                geo.area * ((geo.db_dy[v] * le).dot(d * bu) + bl.dot(d * (geo.db_dy[v] * ue)));
            // Body-force part of dF/dy (zero here: the model has no body forces).
            const double df_term = geo.darea_dy[v] / 3.0 * mult_dot_f;
            dj1_dy[geo.verts[v]] += df_term - dk_term;
        }
    }

    // Traction edges: the load scales with the edge length |y_b - y_a|.
    for (const auto& edge : c.mesh.boundary) {
        if (edge.tag != EdgeTag::NeumannFixed) continue;
        const double dy = c.mesh.nodes[edge.b].y() - c.mesh.nodes[edge.a].y();
        const double sign = dy >= 0.0 ? 1.0 : -1.0;
        const double halved = 0.5 * (mult.segment<2>(2 * edge.a) + mult.segment<2>(2 * edge.b))
                                        .dot(loads_.traction);
        dj1_dy[edge.a] -= sign * halved;
        dj1_dy[edge.b] += sign * halved;
    }

    const Eigen::MatrixXd sens = node_y_sensitivity(c.params, basis_, n_x_, n_y_);

    GradientDetail detail;
    detail.g1 = sens.transpose() * dj1_dy;
    detail.g2 = sens.transpose() * dj2_dy;
    detail.g3 = penalty_gradient(q, &detail.one_sided_j3);
    return detail;
}

Eigen::VectorXd ObjectiveEvaluator::penalty_gradient(const Eigen::VectorXd& q,
                                                     bool* one_sided) const {
    *one_sided = false;
    const auto j3_at = [&](const Eigen::VectorXd& probe, double* out) {
        try {
            const MeshGrid mesh =
                shape_from_params(flat_to_params(probe, pinned_), basis_, n_x_, n_y_, length_);
            *out = eval_J3(mesh, obstacle_, weights_.penalty);
            return true;
        } catch (const DegenerateShapeError&) {
            return false;
        }
    };

    double center = 0.0;
    bool center_ok = false;
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(q.size());
    for (int k = 0; k < q.size(); ++k) {
        const double h = std::max(1e-6 * std::abs(q[k]), 1e-8);
        Eigen::VectorXd probe = q;
        double plus = 0.0, minus = 0.0;
        probe[k] = q[k] + h;
        const bool plus_ok = j3_at(probe, &plus);
        probe[k] = q[k] - h;
        const bool minus_ok = j3_at(probe, &minus);

        if (plus_ok && minus_ok) {
            grad[k] = (plus - minus) / (2.0 * h);
            continue;
        }
        // A probe crossed the thickness-positivity boundary: one-sided.
        *one_sided = true;
        if (!center_ok) center_ok = j3_at(q, &center);
        if (plus_ok)
            grad[k] = (plus - center) / h;
        else if (minus_ok)
            grad[k] = (center - minus) / h;
        else
            grad[k] = 0.0;
    }
    return grad;
}

double ObjectiveEvaluator::biobjective(const Eigen::VectorXd& q, double w) const {
    if (!(w >= 0.0 && w <= 1.0)) throw ContractError("biobjective weight must be in [0, 1]");
    ensure(q);
    return w * cache_->value.j1 + (1.0 - w) * cache_->value.j2;
}

double ObjectiveEvaluator::biobjective_or_inf(const Eigen::VectorXd& q, double w) const {
    try {
        return biobjective(q, w);
    } catch (const DegenerateShapeError&) {
        return std::numeric_limits<double>::infinity();
    } catch (const NumericalError&) {
        return std::numeric_limits<double>::infinity();
    }
}

Eigen::VectorXd ObjectiveEvaluator::biobjective_gradient(const Eigen::VectorXd& q,
                                                         double w) const {
    if (!(w >= 0.0 && w <= 1.0)) throw ContractError("biobjective weight must be in [0, 1]");
    const GradientDetail detail = gradient_detail(q);
    return w * detail.g1 + (1.0 - w) * detail.g2;
}

MeshGrid ObjectiveEvaluator::mesh_at(const Eigen::VectorXd& q) const {
    ensure(q);
    return cache_->mesh;
}

ShapeParams ObjectiveEvaluator::params_at(const Eigen::VectorXd& q) const {
    return flat_to_params(q, pinned_);
}

} // namespace shapeflow

#include "shapeflow/optimize.hpp"

#include <cmath>
#include <limits>

#include "shapeflow/errors.hpp"

namespace shapeflow {

namespace {

double kinetic_energy(const Eigen::VectorXd& p, double mass) {
    return p.squaredNorm() / (2.0 * mass);
}

void record(OptimizerResult& result, const Eigen::VectorXd& q, int k, double t,
            double e_pot, double e_kin, const BreakdownFn& breakdown) {
    result.trajectory.push_back(q);
    result.energy.push_back({k, t, e_pot, e_kin, e_pot + e_kin});
    if (breakdown) result.breakdown.push_back(breakdown(q));
}

/** The two update lines with the gradient already evaluated at state.q. */
HamiltonianState apply_step(const HamiltonianState& state, const HamiltonianParams& params,
                            const Eigen::VectorXd& g) {
    HamiltonianState next;
    next.p = state.p - params.alpha * g - (params.alpha * params.friction_rate()) * state.p;
    next.q = state.q - (params.alpha * params.kappa) * g + (params.alpha / params.mass) * next.p;
    next.k = state.k + 1;
    next.t = next.k * params.alpha;
    return next;
}

} // namespace

int HamiltonianParams::steps() const {
    return static_cast<int>(std::llround(horizon / alpha));
}

double HamiltonianParams::friction_rate() const {
    return friction / (friction_exponent == 2 ? mass * mass : mass);
}

HamiltonianParams HamiltonianParams::make(double mass, double friction, double kappa,
                                          double alpha, double horizon,
                                          int friction_exponent) {
    if (!(mass > 0.0)) throw ConfigError("flow mass must be positive");
    if (!(friction >= 0.0)) throw ConfigError("flow friction must be non-negative");
    if (!(kappa >= 0.0)) throw ConfigError("flow kappa must be non-negative");
    if (!(alpha > 0.0)) throw ConfigError("flow step alpha must be positive");
    if (!(horizon > 0.0)) throw ConfigError("flow horizon must be positive");
    if (friction_exponent != 1 && friction_exponent != 2)
        throw ConfigError("friction_exponent must be 1 or 2");
    HamiltonianParams params{mass, friction, kappa, alpha, horizon, friction_exponent};
    const int n = params.steps();
    if (n < 1 || std::abs(n * alpha - horizon) > 1e-9 * std::max(1.0, horizon))
        throw ConfigError("flow step alpha must tile the horizon with a whole "
                          "number of steps");
    return params;
}

const char* stop_reason_name(StopReason reason) {
    switch (reason) {
        case StopReason::converged: return "converged";
        case StopReason::max_steps: return "max_steps";
        case StopReason::horizon_reached: return "horizon_reached";
        case StopReason::error: return "error";
    }
    return "unknown";
}

OptimizerResult gradient_descent_armijo(const Eigen::VectorXd& q0, const ScalarFn& f,
                                        const GradFn& grad, double tol, int max_iter,
                                        const BreakdownFn& breakdown,
                                        const ArmijoParams& armijo) {
    if (!(tol > 0.0)) throw ContractError("descent tolerance must be positive");
    if (max_iter < 0) throw ContractError("iteration budget must be non-negative");

    OptimizerResult result;
    Eigen::VectorXd q = q0;
    double fq = f(q);
    if (!std::isfinite(fq)) throw ContractError("objective is not finite at the start point");
    record(result, q, 0, 0.0, fq, 0.0, breakdown);

    int accepted = 0;
    while (true) {
        const Eigen::VectorXd g = grad(q);
        if (!g.allFinite()) {
            result.reason = StopReason::error;
            result.diagnostics = "gradient not finite at iteration " + std::to_string(accepted);
            break;
        }
        const double gnorm = g.norm();
        if (gnorm <= tol) {
            result.reason = StopReason::converged;
            break;
        }
        if (accepted >= max_iter) {
            result.reason = StopReason::max_steps;
            break;
        }

        const double decrease = armijo.c1 * g.squaredNorm();
        double step = armijo.initial_step;
        bool found = false;
        for (int b = 0; b < armijo.max_backtracks; ++b) {
            const Eigen::VectorXd trial = q - step * g;
            const double ft = f(trial);
            if (ft <= fq - step * decrease) {
                q = trial;
                fq = ft;
                found = true;
                break;
            }
            step *= armijo.shrink;
        }
        if (!found) {
            result.reason = StopReason::error;
            result.diagnostics = "line search exhausted " +
                                 std::to_string(armijo.max_backtracks) +
                                 " backtracks at iteration " + std::to_string(accepted) +
                                 " (gradient norm " + std::to_string(gnorm) + ")";
            break;
        }
        ++accepted;
        record(result, q, accepted, static_cast<double>(accepted), fq, 0.0, breakdown);
    }

    result.q = q;
    return result;
}

HamiltonianState symplectic_euler_step(const HamiltonianState& state,
                                       const HamiltonianParams& params, const GradFn& grad) {
    if (state.p.size() != state.q.size())
        throw ContractError("momentum dimension does not match position");
    const Eigen::VectorXd g = grad(state.q);
    if (!g.allFinite())
        throw NumericalError("gradient not finite at flow step " + std::to_string(state.k));
    return apply_step(state, params, g);
}

OptimizerResult hamiltonian_flow(const Eigen::VectorXd& q0, const Eigen::VectorXd& p0,
                                 const HamiltonianParams& params, const ScalarFn& f,
                                 const GradFn& grad, const BreakdownFn& breakdown,
                                 double early_stop_tol) {
    if (p0.size() != q0.size())
        throw ContractError("momentum dimension does not match position");

    OptimizerResult result;
    HamiltonianState state{q0, p0, 0.0, 0};

    const double f0 = f(q0);
    if (!std::isfinite(f0)) throw ContractError("objective is not finite at the start point");
    record(result, q0, 0, 0.0, f0, kinetic_energy(p0, params.mass), breakdown);

    result.reason = StopReason::horizon_reached;
    const int steps = params.steps();
    for (int k = 0; k < steps; ++k) {
        Eigen::VectorXd g;
        try {
            g = grad(state.q);
        } catch (const std::exception& ex) {
            result.reason = StopReason::error;
            result.diagnostics = std::string("gradient failed at step ") +
                                 std::to_string(state.k) + ": " + ex.what();
            break;
        }
        if (!g.allFinite()) {
            result.reason = StopReason::error;
            result.diagnostics = "gradient not finite at step " + std::to_string(state.k);
            break;
        }
        if (early_stop_tol > 0.0 && g.norm() <= early_stop_tol) {
            result.reason = StopReason::converged;
            break;
        }

        state = apply_step(state, params, g);

        double e_pot;
        try {
            e_pot = f(state.q);
        } catch (const std::exception& ex) {
            result.reason = StopReason::error;
            result.diagnostics = std::string("objective failed at step ") +
                                 std::to_string(state.k) + ": " + ex.what();
            state.q = result.trajectory.back();
            break;
        }
        if (!std::isfinite(e_pot)) {
            result.reason = StopReason::error;
            result.diagnostics = "objective not finite at step " + std::to_string(state.k);
            state.q = result.trajectory.back();
            break;
        }
        record(result, state.q, state.k, state.t, e_pot,
               kinetic_energy(state.p, params.mass), breakdown);
    }

    result.q = state.q;
    return result;
}

std::vector<EnergyRecord> energy_history(const OptimizerResult& result) {
    if (result.energy.empty()) throw ContractError("no energy records: run not recorded");
    return result.energy;
}

} // namespace shapeflow

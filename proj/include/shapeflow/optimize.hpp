#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "shapeflow/objectives.hpp"

namespace shapeflow {

using ScalarFn = std::function<double(const Eigen::VectorXd&)>;
using GradFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using BreakdownFn = std::function<ObjectiveValue(const Eigen::VectorXd&)>;

/** Position/momentum pair advanced by the dissipative flow; t = k * alpha. */
struct HamiltonianState {
    Eigen::VectorXd q;
    Eigen::VectorXd p;
    double t = 0.0;
    int k = 0;
};

/**
 * Flow parameters.  friction_exponent selects the momentum damping scale:
 * 2 divides the friction by mass^2 (the update scheme that produced the
 * reference results, the default), 1 divides by mass (the scaling of the
 * underlying continuous system).
 */
struct HamiltonianParams {
    double mass = 1.0;
    double friction = 0.0;
    double kappa = 0.0;
    double alpha = 1e-2;
    double horizon = 1.0;
    int friction_exponent = 2;

    /** Number of steps alpha must tile the horizon with (validated by make). */
    int steps() const;
    /** Damping rate applied to p each step: friction / mass^friction_exponent. */
    double friction_rate() const;

    static HamiltonianParams make(double mass, double friction, double kappa,
                                  double alpha, double horizon, int friction_exponent = 2);
};

struct EnergyRecord {
    int k = 0;
    double t = 0.0;
    double e_pot = 0.0;
    double e_kin = 0.0;
    double e_tot = 0.0;
};

enum class StopReason { converged, max_steps, horizon_reached, error };

const char* stop_reason_name(StopReason reason);

/**
 * Shared result of both drivers.  trajectory and energy always have one entry
 * per recorded iterate (the initial point included); breakdown matches them
 * when a breakdown oracle was supplied and is empty otherwise.
 */
struct OptimizerResult {
    Eigen::VectorXd q;
    std::vector<Eigen::VectorXd> trajectory;
    std::vector<EnergyRecord> energy;
    std::vector<ObjectiveValue> breakdown;
    StopReason reason = StopReason::error;
    std::string diagnostics;
};

struct ArmijoParams {
    double c1 = 1e-4;
    double shrink = 0.5;
    double initial_step = 1.0;
    int max_backtracks = 50;
};

/**
 * Steepest descent with backtracking line search.  f may return +infinity for
 * points it cannot evaluate; such trials are rejected and the step shrinks.
 * Stops when the gradient norm drops to tol (converged), after max_iter
 * accepted steps (max_steps), or when the backtracking budget is exhausted
 * (error, with diagnostics).  The objective sequence is strictly decreasing.
 */
OptimizerResult gradient_descent_armijo(const Eigen::VectorXd& q0, const ScalarFn& f,
                                        const GradFn& grad, double tol, int max_iter,
                                        const BreakdownFn& breakdown = nullptr,
                                        const ArmijoParams& armijo = {});

/**
 * One step of the dissipative flow: momentum first, then position using the
 * fresh momentum; the single gradient evaluation is shared by both lines.
 *   p' = p - alpha grad(q) - alpha friction_rate p
 *   q' = q - alpha kappa grad(q) + (alpha / mass) p'
 * A non-finite gradient raises NumericalError with the state untouched.
 */
HamiltonianState symplectic_euler_step(const HamiltonianState& state,
                                       const HamiltonianParams& params, const GradFn& grad);

/**
 * Runs steps = horizon/alpha symplectic Euler steps, recording an EnergyRecord
 * per step (e_pot = f, e_kin = |p|^2/2m).  No early stopping by default; a
 * positive early_stop_tol stops once the gradient norm falls below it.  An
 * evaluation failure mid-flow truncates the result with reason error.
 */
OptimizerResult hamiltonian_flow(const Eigen::VectorXd& q0, const Eigen::VectorXd& p0,
                                 const HamiltonianParams& params, const ScalarFn& f,
                                 const GradFn& grad, const BreakdownFn& breakdown = nullptr,
                                 double early_stop_tol = 0.0);

/** The per-step energy records of a finished run. */
std::vector<EnergyRecord> energy_history(const OptimizerResult& result);

} // namespace shapeflow

#include <doctest.h>

#include <cmath>
#include <limits>

#include "shapeflow/errors.hpp"
#include "shapeflow/optimize.hpp"
#include "support/rk4.hpp"

using namespace shapeflow;
using Eigen::VectorXd;

namespace {

VectorXd vec1(double x) {
    VectorXd v(1);
    v[0] = x;
    return v;
}

const ScalarFn half_sq = [](const VectorXd& q) { return 0.5 * q.squaredNorm(); };
const GradFn half_sq_grad = [](const VectorXd& q) { return VectorXd(q); };

const ScalarFn double_well = [](const VectorXd& q) {
    const double s = q[0] * q[0] - 1.0;
    return s * s;
};
const GradFn double_well_grad = [](const VectorXd& q) {
    return vec1(4.0 * q[0] * (q[0] * q[0] - 1.0));
};

} // namespace

TEST_SUITE("optimize") {

TEST_CASE("descent on a quadratic decreases strictly and converges") {
    const VectorXd q0 = VectorXd::Ones(3);
    const auto result = gradient_descent_armijo(q0, half_sq, half_sq_grad, 1e-8, 500);

    CHECK(result.reason == StopReason::converged);
    CHECK(result.q.norm() <= 1e-8);
    CHECK(result.trajectory.size() == result.energy.size());
    CHECK(result.breakdown.empty());
    for (size_t k = 1; k < result.energy.size(); ++k) {
        CHECK(result.energy[k].e_pot < result.energy[k - 1].e_pot);
        CHECK(result.energy[k].e_kin == 0.0);
    }
}

TEST_CASE("descent takes the exact Newton step on the unit quadratic") {
    // grad = q, so the first unit trial step lands exactly at the minimum.
    const auto result = gradient_descent_armijo(vec1(1.0), half_sq, half_sq_grad, 1e-10, 50);
    CHECK(result.reason == StopReason::converged);
    CHECK(result.q[0] == 0.0);
    CHECK(result.trajectory.size() == 2);
}

TEST_CASE("infinite tolerance stops immediately at the start point") {
    const VectorXd q0 = VectorXd::Ones(4);
    const auto result = gradient_descent_armijo(
        q0, half_sq, half_sq_grad, std::numeric_limits<double>::infinity(), 100);
    CHECK(result.reason == StopReason::converged);
    CHECK((result.q - q0).norm() == 0.0);
    CHECK(result.trajectory.size() == 1);
}

TEST_CASE("iteration budget reports max_steps") {
    // Anisotropic quadratic: converges only linearly, so three iterations
    // cannot reach the tolerance.
    const ScalarFn f = [](const VectorXd& q) {
        return 0.5 * (q[0] * q[0] + 3.0 * q[1] * q[1]);
    };
    const GradFn g = [](const VectorXd& q) {
        VectorXd out(2);
        out << q[0], 3.0 * q[1];
        return out;
    };
    const auto result = gradient_descent_armijo(VectorXd::Ones(2), f, g, 1e-14, 3);
    CHECK(result.reason == StopReason::max_steps);
    CHECK(result.energy.size() == 4);
}

TEST_CASE("exhausted line search reports an error with diagnostics") {
    // |q| at the kink: no descent step from 0 can satisfy sufficient decrease.
    const ScalarFn f = [](const VectorXd& q) { return std::abs(q[0]); };
    const GradFn g = [](const VectorXd&) { return vec1(1.0); };
    const auto result = gradient_descent_armijo(vec1(0.0), f, g, 1e-10, 10);
    CHECK(result.reason == StopReason::error);
    CHECK(result.diagnostics.find("backtracks") != std::string::npos);
    CHECK(result.q[0] == 0.0);
}

TEST_CASE("infeasible trials are rejected instead of accepted") {
    // +infinity to the right of 0.5: the search must shrink past it.
    const ScalarFn f = [](const VectorXd& q) {
        if (q[0] < -0.5) return std::numeric_limits<double>::infinity();
        return 0.5 * q[0] * q[0];
    };
    const auto result = gradient_descent_armijo(vec1(0.4), f, half_sq_grad, 1e-8, 200);
    CHECK(result.reason == StopReason::converged);
    for (const auto& q : result.trajectory) CHECK(q[0] >= -0.5);
}

TEST_CASE("breakdown oracle is recorded alongside the energies") {
    const BreakdownFn breakdown = [](const VectorXd& q) {
        return ObjectiveValue{0.0, 0.0, 0.0, 0.5 * q.squaredNorm()};
    };
    const auto result =
        gradient_descent_armijo(VectorXd::Ones(2), half_sq, half_sq_grad, 1e-8, 500, breakdown);
    REQUIRE(result.breakdown.size() == result.energy.size());
    for (size_t k = 0; k < result.energy.size(); ++k)
        CHECK(result.breakdown[k].j_lambda == result.energy[k].e_pot);
}

TEST_CASE("flow parameters are validated") {
    CHECK_NOTHROW(HamiltonianParams::make(10.0, 100.0, 1e-3, 1.0 / 250.0, 1.0));
    CHECK(HamiltonianParams::make(10.0, 100.0, 1e-3, 1.0 / 250.0, 1.0).steps() == 250);
    CHECK_THROWS_AS(HamiltonianParams::make(0.0, 1.0, 0.0, 0.1, 1.0), ConfigError);
    CHECK_THROWS_AS(HamiltonianParams::make(1.0, -1.0, 0.0, 0.1, 1.0), ConfigError);
    CHECK_THROWS_AS(HamiltonianParams::make(1.0, 1.0, -0.1, 0.1, 1.0), ConfigError);
    CHECK_THROWS_AS(HamiltonianParams::make(1.0, 1.0, 0.0, 0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(HamiltonianParams::make(1.0, 1.0, 0.0, 0.1, 1.0, 3), ConfigError);
    // 0.3 does not tile a unit horizon.
    CHECK_THROWS_AS(HamiltonianParams::make(1.0, 1.0, 0.0, 0.3, 1.0), ConfigError);
}

TEST_CASE("one flow step matches the hand-computed update") {
    // q = 1, p = 0, f = q^2/2, alpha = 0.1, m = 1, gamma = 1, kappa = 0:
    // p' = -0.1, q' = 1 - 0.01.
    const auto params = HamiltonianParams::make(1.0, 1.0, 0.0, 0.1, 1.0);
    const HamiltonianState next =
        symplectic_euler_step({vec1(1.0), vec1(0.0), 0.0, 0}, params, half_sq_grad);
    CHECK(next.p[0] == -0.1);
    CHECK(next.q[0] == doctest::Approx(0.99).epsilon(1e-15));
    CHECK(next.k == 1);
    CHECK(next.t == 0.1);
}

TEST_CASE("stationary points are fixed points of the step") {
    const GradFn zero_grad = [](const VectorXd& q) { return VectorXd(VectorXd::Zero(q.size())); };
    const auto params = HamiltonianParams::make(2.0, 3.0, 0.5, 0.1, 1.0);
    const VectorXd q0 = VectorXd::Constant(4, 0.75);
    const HamiltonianState next =
        symplectic_euler_step({q0, VectorXd::Zero(4), 0.0, 0}, params, zero_grad);
    CHECK((next.q - q0).norm() == 0.0);
    CHECK(next.p.norm() == 0.0);
}

TEST_CASE("a non-finite gradient aborts the step with the state preserved") {
    const GradFn bad = [](const VectorXd& q) {
        return vec1(std::numeric_limits<double>::quiet_NaN() * q[0]);
    };
    const auto params = HamiltonianParams::make(1.0, 1.0, 0.0, 0.1, 1.0);
    CHECK_THROWS_AS(symplectic_euler_step({vec1(1.0), vec1(0.0), 0.0, 0}, params, bad),
                    NumericalError);
}

TEST_CASE("frictionless harmonic energy stays in a step-size band") {
    // Symplectic signature: no drift over 1e4 steps, oscillation amplitude
    // O(alpha).  Measured band/(alpha e0) = 1.001; frozen at 2.
    const double w = 2.0, alpha = 1e-3;
    const auto params = HamiltonianParams::make(1.0, 0.0, 0.0, alpha, 10.0);
    const ScalarFn f = [&](const VectorXd& q) { return 0.5 * w * w * q.squaredNorm(); };
    const GradFn g = [&](const VectorXd& q) { return VectorXd(w * w * q); };
    const auto result = hamiltonian_flow(vec1(1.0), vec1(0.0), params, f, g);

    REQUIRE(result.energy.size() == 10001u);
    CHECK(result.reason == StopReason::horizon_reached);
    const double e0 = result.energy.front().e_tot;
    for (const auto& r : result.energy) CHECK(std::abs(r.e_tot - e0) <= 2.0 * alpha * e0);
}

TEST_CASE("flow bookkeeping is exact") {
    const auto params = HamiltonianParams::make(1.0, 1.0, 0.0, 0.05, 2.0);
    const auto result = hamiltonian_flow(vec1(1.0), vec1(0.0), params, half_sq, half_sq_grad);
    REQUIRE(result.energy.size() == 41u);
    CHECK(result.trajectory.size() == 41u);
    CHECK(result.energy.front().e_kin == 0.0);
    for (size_t k = 0; k < result.energy.size(); ++k) {
        const auto& r = result.energy[k];
        CHECK(r.k == static_cast<int>(k));
        CHECK(r.t == r.k * params.alpha);
        CHECK(r.e_tot == r.e_pot + r.e_kin);
        CHECK(r.e_kin >= 0.0);
    }
    CHECK(energy_history(result).size() == 41u);
    CHECK_THROWS_AS(energy_history(OptimizerResult{}), ContractError);
}

TEST_CASE("momentum flow settles a double well near a critical point") {
    const auto params = HamiltonianParams::make(10.0, 50.0, 0.0, 0.01, 100.0);
    const auto result =
        hamiltonian_flow(vec1(1.5), vec1(0.0), params, double_well, double_well_grad);

    CHECK(result.reason == StopReason::horizon_reached);
    CHECK(std::abs(double_well_grad(result.q)[0]) <= 1e-3);

    // Discrete dissipation, banded: measured max rise 0; frozen at alpha^2.
    for (size_t k = 1; k < result.energy.size(); ++k)
        CHECK(result.energy[k].e_tot <= result.energy[k - 1].e_tot +
                                            params.alpha * params.alpha);
}

TEST_CASE("flow tracks the continuous dissipative dynamics at first order") {
    // RK4 reference on qdot = p/m, pdot = -f'(q) - (gamma/m^2) p. Measured
    // |q(T) - ref| / alpha = 0.1976 across alpha = 0.01 .. 0.0025; frozen 0.5.
    const double alpha = 0.01;
    const auto params = HamiltonianParams::make(10.0, 50.0, 0.0, alpha, 5.0);
    const auto result =
        hamiltonian_flow(vec1(1.5), vec1(0.0), params, double_well, double_well_grad);

    const double rate = params.friction_rate();
    const auto rhs = [&](double q, double p) {
        return testsupport::MechDeriv{p / params.mass, -4.0 * q * (q * q - 1.0) - rate * p};
    };
    const auto ref = testsupport::rk4_integrate(1.5, 0.0, 5.0, 1e-5, rhs);
    CHECK(std::abs(result.q[0] - ref[0]) <= 0.5 * alpha);
}

TEST_CASE("overdamped flow follows the downhill direction") {
    const auto params = HamiltonianParams::make(1.0, 5e3, 0.0, 1e-4, 0.05);
    Eigen::Matrix2d a;
    a << 1.0, 0.0, 0.0, 3.0;
    const ScalarFn f = [&](const VectorXd& q) { return 0.5 * q.dot(a * q); };
    const GradFn g = [&](const VectorXd& q) { return VectorXd(a * q); };
    VectorXd q0(2);
    q0 << 1.0, 1.0;
    const auto result = hamiltonian_flow(q0, VectorXd::Zero(2), params, f, g);

    for (size_t k = 50; k < result.trajectory.size(); ++k) {
        const VectorXd dq = result.trajectory[k] - result.trajectory[k - 1];
        const VectorXd grad = g(result.trajectory[k - 1]);
        for (int i = 0; i < 2; ++i)
            if (std::abs(grad[i]) > 1e-12) CHECK(dq[i] * -grad[i] > 0.0);
    }
}

TEST_CASE("optional gradient-norm early stop cuts the horizon short") {
    const auto params = HamiltonianParams::make(1.0, 2.0, 0.0, 0.05, 50.0);
    const auto result = hamiltonian_flow(vec1(1.0), vec1(0.0), params, half_sq,
                                         half_sq_grad, nullptr, 1e-6);
    CHECK(result.reason == StopReason::converged);
    CHECK(result.energy.size() < 1001u);
    CHECK(half_sq_grad(result.q).norm() <= 1e-6);
}

TEST_CASE("a mid-flow failure truncates the run and keeps the last good state") {
    int calls = 0;
    const GradFn flaky = [&calls](const VectorXd& q) {
        if (++calls > 6) return vec1(std::numeric_limits<double>::quiet_NaN());
        return VectorXd(q);
    };
    const auto params = HamiltonianParams::make(1.0, 1.0, 0.0, 0.1, 10.0);
    const auto result = hamiltonian_flow(vec1(1.0), vec1(0.0), params, half_sq, flaky);
    CHECK(result.reason == StopReason::error);
    CHECK(result.diagnostics.find("step 6") != std::string::npos);
    CHECK(result.energy.size() == 7u); // k = 0..6 recorded before the failure
    CHECK((result.q - result.trajectory.back()).norm() == 0.0);

    const ScalarFn throwing = [](const VectorXd& q) {
        if (q[0] < 0.97) throw NumericalError("probe failure");
        return 0.5 * q.squaredNorm();
    };
    const auto truncated = hamiltonian_flow(vec1(1.0), vec1(0.0), params, throwing,
                                            half_sq_grad);
    CHECK(truncated.reason == StopReason::error);
    CHECK(truncated.diagnostics.find("objective failed") != std::string::npos);
    CHECK((truncated.q - truncated.trajectory.back()).norm() == 0.0);
}

TEST_CASE("two-line update reproduces the heavy-ball recursion") {
    // Exponent-1 friction, kappa = 0; substitutions p = (m/alpha)(q_k -
    // q_{k-1}), step 0.02 = alpha^2/m, momentum weight 0.9 = 1 - alpha
    // gamma/m.
    const double alpha = 0.1, m = 0.5, gamma = 0.5;
    const double hb_step = alpha * alpha / m, hb_beta = 1.0 - alpha * gamma / m;
    const auto params = HamiltonianParams::make(m, gamma, 0.0, alpha, alpha * 100, 1);

    Eigen::Matrix2d a;
    a << 2.0, 0.5, 0.5, 1.0;
    const GradFn g = [&](const VectorXd& q) { return VectorXd(a * q); };
    VectorXd q0(2);
    q0 << 1.0, -1.0;

    HamiltonianState state{q0, VectorXd::Zero(2), 0.0, 0};
    VectorXd hb_prev = q0, hb_curr = q0;
    for (int k = 0; k < 100; ++k) {
        state = symplectic_euler_step(state, params, g);
        const VectorXd hb_next = hb_curr - hb_step * g(hb_curr) + hb_beta * (hb_curr - hb_prev);
        hb_prev = hb_curr;
        hb_curr = hb_next;
        CHECK((state.q - hb_curr).norm() <= 1e-12 * std::max(1.0, hb_curr.norm()));
    }
}

} // TEST_SUITE

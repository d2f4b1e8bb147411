#include "shapeflow/app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>

#include "shapeflow/artifacts.hpp"
#include "shapeflow/circle_overlap.hpp"
#include "shapeflow/errors.hpp"

namespace shapeflow {

namespace {

std::string zero_pad(int k) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d", k);
    return buf;
}

void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
}

void write_snapshots(const ObjectiveEvaluator& evaluator, const ProblemConfig& config,
                     const OptimizerResult& run, const std::string& dir,
                     const std::string& prefix) {
    if (!config.write_svg) return;
    const int last = static_cast<int>(run.trajectory.size()) - 1;
    for (int k = 0; k <= last; ++k) {
        if (k % config.snapshot_every != 0 && k != last) continue;
        export_shape_svg(evaluator.mesh_at(run.trajectory[static_cast<std::size_t>(k)]),
                         config.obstacle, dir + "/" + prefix + "_" + zero_pad(k) + ".svg");
    }
}

} // namespace

ShapeParams build_initial_shape(const ProblemConfig& config) {
    const BSplineBasis basis = BSplineBasis::clamped_uniform(config.n_basis, config.degree);
    const int n = config.n_basis;

    ShapeParams params;
    params.thickness = Eigen::VectorXd::Constant(n, config.boundary_height);
    params.meanline.resize(n);
    // Coefficients sampled from a line at the Greville abscissae make the
    // meanline exactly that line between the pinned end centers.
    for (int j = 0; j < n; ++j)
        params.meanline[j] = config.left_center + config.right_offset * basis.greville(j);
    params.free_mask.assign(static_cast<std::size_t>(2 * n), true);
    params.free_mask[0] = params.free_mask[static_cast<std::size_t>(n - 1)] = false;
    params.free_mask[static_cast<std::size_t>(n)] =
        params.free_mask[static_cast<std::size_t>(2 * n - 1)] = false;

    // Obstacle footprint in spline parameter, widened by one mesh column so
    // every boundary chord with x-overlap against the circle has both of its
    // endpoints above the required height.
    const double h_x = config.length / (config.n_x - 1);
    const double t_lo =
        std::max(0.0, (config.obstacle.center.x() - config.obstacle.radius - h_x) / config.length);
    const double t_hi =
        std::min(1.0, (config.obstacle.center.x() + config.obstacle.radius + h_x) / config.length);

    if (t_lo <= t_hi) {
        // The lower boundary is meanline - thickness/2 with constant thickness,
        // so the clearance constraint is a bound on the meanline alone.
        const double y_need = config.obstacle.center.y() + config.obstacle.radius +
                              config.clearance_margin + 0.5 * config.boundary_height;
        double lift = 0.0;
        const int samples = 8192;
        for (int s = 0; s <= samples; ++s) {
            const double t = t_lo + (t_hi - t_lo) * s / samples;
            const double line = config.left_center + config.right_offset * t;
            const double deficit = y_need - line;
            if (deficit <= 0.0) continue;
            const Eigen::VectorXd theta = basis.eval(t);
            const double interior_weight = 1.0 - theta[0] - theta[n - 1];
            if (interior_weight <= 1e-9)
                throw ConfigError(
                    "initial shape: the obstacle footprint reaches a pinned boundary that sits " +
                    std::to_string(deficit) + " m below the required clearance height");
            lift = std::max(lift, deficit / interior_weight);
        }
        if (lift > 0.0) {
            // Uniform interior lift; the pad absorbs the sampling gaps.
            lift *= 1.0 + 1e-6;
            lift += 1e-9;
            for (int j = 1; j < n - 1; ++j) params.meanline[j] += lift;
            if (params.meanline.maxCoeff() > config.length)
                throw ConfigError("initial shape: clearing the obstacle needs meanline height " +
                                  std::to_string(params.meanline.maxCoeff()) +
                                  " m, beyond the domain scale of " +
                                  std::to_string(config.length) + " m");
        }
    }

    const MeshGrid mesh = shape_from_params(params, basis, config.n_x, config.n_y, config.length);
    if (shape_circle_area(mesh, config.obstacle) != 0.0)
        throw ContractError("initial shape construction left nonzero obstacle overlap");
    return params;
}

ObjectiveEvaluator make_evaluator(const ProblemConfig& config, const ShapeParams& pinned) {
    return ObjectiveEvaluator(BSplineBasis::clamped_uniform(config.n_basis, config.degree), pinned,
                              config.n_x, config.n_y, config.length, config.material, config.loads,
                              config.obstacle, config.weights);
}

std::string resolve_output_dir(const ProblemConfig& config, const std::string& output_root) {
    if (output_root.empty()) return config.output_dir;
    return output_root + "/" + config.output_dir;
}

RunOutcome run_problem(const ProblemConfig& config, const std::string& output_root) {
    RunOutcome outcome;
    outcome.directory = resolve_output_dir(config, output_root);
    ensure_directory(outcome.directory);
    write_text_file(outcome.directory + "/manifest.toml", manifest_text(config));

    const ShapeParams initial = build_initial_shape(config);
    write_coefficients(initial, outcome.directory + "/initial_coefficients.txt");

    ObjectiveEvaluator evaluator = make_evaluator(config, initial);
    const Eigen::VectorXd q0 = params_to_flat(initial);
    if (config.write_svg)
        export_shape_svg(evaluator.mesh_at(q0), config.obstacle,
                         outcome.directory + "/initial_shape.svg");

    std::string error_report;
    const BreakdownFn breakdown = [&evaluator](const Eigen::VectorXd& q) {
        return evaluator.value(q);
    };

    if (config.mode == RunMode::gd || config.mode == RunMode::both) {
        // The descent driver propagates gradient exceptions; map them onto its
        // non-finite-gradient stop so the partial history survives.
        std::string gradient_failure;
        const GradFn guarded_grad = [&evaluator,
                                     &gradient_failure](const Eigen::VectorXd& q) -> Eigen::VectorXd {
            try {
                return evaluator.gradient(q);
            } catch (const std::exception& e) {
                gradient_failure = e.what();
                return Eigen::VectorXd::Constant(q.size(),
                                                 std::numeric_limits<double>::quiet_NaN());
            }
        };
        const ScalarFn f = [&evaluator](const Eigen::VectorXd& q) {
            return evaluator.value_or_inf(q);
        };
        OptimizerResult run = gradient_descent_armijo(q0, f, guarded_grad, config.gd_tol,
                                                      config.gd_max_iter, breakdown);
        if (!gradient_failure.empty())
            run.diagnostics += (run.diagnostics.empty() ? "" : "; ") + gradient_failure;
        write_energy_csv(run, outcome.directory + "/gd_history.csv");
        write_snapshots(evaluator, config, run, outcome.directory, "gd");
        write_coefficients(evaluator.params_at(run.q),
                           outcome.directory + "/gd_final_coefficients.txt");
        if (run.reason == StopReason::error)
            error_report += "gd: " + run.diagnostics + "\n";
        const ObjectiveValue final_value = evaluator.value(run.q);
        outcome.descent = ModeArtifacts{std::move(run), final_value};
    }

    if (config.mode == RunMode::hamiltonian || config.mode == RunMode::both) {
        const ScalarFn f = [&evaluator](const Eigen::VectorXd& q) {
            return evaluator.value(q).j_lambda;
        };
        const GradFn grad = [&evaluator](const Eigen::VectorXd& q) {
            return evaluator.gradient(q);
        };
        OptimizerResult run = hamiltonian_flow(q0, Eigen::VectorXd::Zero(q0.size()), config.flow,
                                               f, grad, breakdown);
        write_energy_csv(run, outcome.directory + "/hamiltonian_energy.csv");
        write_snapshots(evaluator, config, run, outcome.directory, "hamiltonian");
        write_coefficients(evaluator.params_at(run.q),
                           outcome.directory + "/hamiltonian_final_coefficients.txt");
        if (run.reason == StopReason::error)
            error_report += "hamiltonian: " + run.diagnostics + "\n";
        const ObjectiveValue final_value = evaluator.value(run.q);
        outcome.flow = ModeArtifacts{std::move(run), final_value};
    }

    if (!error_report.empty()) {
        write_text_file(outcome.directory + "/error_manifest.txt", error_report);
        outcome.error = error_report;
        outcome.exit_code = 3;
    }
    return outcome;
}

TraceOutcome trace_problem(const ProblemConfig& config, const std::string& start_path,
                           const std::string& output_root, int n_weights) {
    TraceOutcome outcome;
    outcome.directory = resolve_output_dir(config, output_root);
    ensure_directory(outcome.directory);

    const ShapeParams start = read_coefficients(start_path);
    if (start.n_coeffs() != config.n_basis)
        throw ConfigError("start coefficients carry " + std::to_string(start.n_coeffs()) +
                          " basis functions, the config expects " +
                          std::to_string(config.n_basis));
    if (start.n_free() == 0)
        throw ConfigError("start coefficients pin every degree of freedom");

    ObjectiveEvaluator evaluator = make_evaluator(config, start);
    outcome.front = trace_front(evaluator, params_to_flat(start), equispaced_weights(n_weights),
                                config.gd_tol, 500);
    outcome.filtered = dominance_filter(outcome.front);
    write_front_csv(outcome.front, outcome.directory + "/front.csv");
    write_front_csv(outcome.filtered, outcome.directory + "/front_filtered.csv");
    return outcome;
}

void check_problem(const ProblemConfig& config) {
    // Manifest echo closure: the resolved-parameter echo must itself parse
    // back to the identical echo.
    const std::string manifest = manifest_text(config);
    if (manifest_text(parse_config(manifest)) != manifest)
        throw ConfigError("manifest echo does not reproduce itself");

    // Feasible initial shape with exactly zero obstacle overlap.
    const ShapeParams initial = build_initial_shape(config);
    ObjectiveEvaluator evaluator = make_evaluator(config, initial);
    const Eigen::VectorXd q0 = params_to_flat(initial);
    const ObjectiveValue v0 = evaluator.value(q0);
    if (v0.j3 != 0.0) throw NumericalError("initial shape overlaps the obstacle");

    // Adjoint gradient against central finite differences at the initial shape.
    const Eigen::VectorXd g = evaluator.gradient(q0);
    for (Eigen::Index j = 0; j < q0.size(); ++j) {
        const double h = std::max(1e-6 * std::abs(q0[j]), 1e-8);
        Eigen::VectorXd qp = q0, qm = q0;
        qp[j] += h;
        qm[j] -= h;
        const double fd = (evaluator.value_or_inf(qp) - evaluator.value_or_inf(qm)) / (2.0 * h);
        if (!(std::abs(g[j] - fd) <= 1e-4 * std::max(1.0, std::abs(fd))))
            throw NumericalError("gradient component " + std::to_string(j) +
                                 " disagrees with finite differences: adjoint " +
                                 std::to_string(g[j]) + ", difference quotient " +
                                 std::to_string(fd));
    }

    // Short integration of the configured flow.
    HamiltonianParams flow = config.flow;
    flow.horizon = 3.0 * flow.alpha;
    const OptimizerResult smoke = hamiltonian_flow(
        q0, Eigen::VectorXd::Zero(q0.size()), flow,
        [&evaluator](const Eigen::VectorXd& q) { return evaluator.value(q).j_lambda; },
        [&evaluator](const Eigen::VectorXd& q) { return evaluator.gradient(q); });
    if (smoke.reason == StopReason::error)
        throw NumericalError("flow smoke test failed: " + smoke.diagnostics);
}

} // namespace shapeflow

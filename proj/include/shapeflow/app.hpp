#pragma once

#include <optional>
#include <string>
#include <vector>

#include "shapeflow/config.hpp"
#include "shapeflow/objectives.hpp"
#include "shapeflow/optimize.hpp"
#include "shapeflow/pareto.hpp"
#include "shapeflow/shape_grid.hpp"

namespace shapeflow {

/**
 * Deterministic initial guess: thickness fixed at boundary_height, meanline a
 * straight ramp between the configured end centers, lifted over the obstacle
 * so the lower boundary clears its top by clearance_margin across the
 * obstacle's x-extent (widened by one mesh column, so no element edge can cut
 * the corner into the circle).  Ends stay pinned.  Raises ConfigError when the
 * lift is impossible: a pinned end sits inside the footprint below the
 * required height, or the obstacle is so high the shape would leave the
 * domain scale.  Postcondition: the meshed shape has exactly zero obstacle
 * overlap.
 */
ShapeParams build_initial_shape(const ProblemConfig& config);

/** Evaluator over the free coefficients of build_initial_shape's pin layout. */
ObjectiveEvaluator make_evaluator(const ProblemConfig& config, const ShapeParams& pinned);

/** Output directory for a config: output_root (when non-empty) + "/" + the
 *  configured directory.  Created on demand by run/trace. */
std::string resolve_output_dir(const ProblemConfig& config, const std::string& output_root);

struct ModeArtifacts {
    OptimizerResult result;
    ObjectiveValue final_value;
};

struct RunOutcome {
    std::string directory;
    std::optional<ModeArtifacts> descent; // populated when mode covers gd
    std::optional<ModeArtifacts> flow;    // populated when mode covers hamiltonian
    std::string error;                    // empty on success
    int exit_code = 0;                    // 0 ok, 3 numerical failure mid-run
};

/**
 * Full run: manifest, initial shape artifacts, then the selected optimizers
 * with per-iterate history CSVs, snapshot SVGs (first, last, and every
 * snapshot_every records) and final coefficient files.  Numerical failures
 * mid-run keep the partial artifacts, add an error manifest and return
 * exit_code 3 instead of throwing; configuration and I/O failures throw.
 */
RunOutcome run_problem(const ProblemConfig& config, const std::string& output_root);

struct TraceOutcome {
    std::string directory;
    std::vector<FrontPoint> front;    // one point per weight, in sweep order
    std::vector<FrontPoint> filtered; // dominance-filtered front
};

/** Warm-started weight sweep of the failure/volume trade-off from a stored
 *  coefficient file; writes front.csv and front_filtered.csv. */
TraceOutcome trace_problem(const ProblemConfig& config, const std::string& start_path,
                           const std::string& output_root, int n_weights = 21);

/**
 * Invariant sweep used by the check command; throws on the first violation.
 * Covers: manifest echo parses back to an identical manifest; the initial
 * shape is feasible with exactly zero obstacle overlap; the adjoint gradient
 * matches central finite differences at the initial shape; a short
 * integration of the configured flow runs cleanly.
 */
void check_problem(const ProblemConfig& config);

} // namespace shapeflow

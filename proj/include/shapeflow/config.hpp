#pragma once

#include <string>

#include "shapeflow/circle_overlap.hpp"
#include "shapeflow/elasticity.hpp"
#include "shapeflow/objectives.hpp"
#include "shapeflow/optimize.hpp"

namespace shapeflow {

enum class RunMode { gd, hamiltonian, both };

const char* run_mode_name(RunMode mode);

/**
 * Fully resolved run description.  Parsing applies the documented defaults,
 * validates every field, and rejects unknown keys, so an instance always
 * satisfies the construction invariants of the component types it feeds.
 */
struct ProblemConfig {
    MaterialParams material;
    BoundaryLoads loads;

    // Geometry: rod of given length whose end cross-sections are pinned to
    // boundary_height thickness, centered at left_center on the left and
    // left_center + right_offset on the right.
    double length = 1.0;
    int n_x = 41;
    int n_y = 7;
    int n_basis = 5;
    int degree = 3;
    double boundary_height = 0.2;
    double left_center = 0.1;
    double right_offset = 0.0;

    ObstacleCircle obstacle{{0.0, 0.0}, 1.0};
    ObjectiveWeights weights;

    RunMode mode = RunMode::both;
    HamiltonianParams flow;
    double gd_tol = 1e-5;
    int gd_max_iter = 200;

    std::string output_dir = "run";
    int snapshot_every = 10;
    bool write_svg = true;

    double clearance_margin = 0.01;
};

/** Parses config text; ConfigError messages name the offending field/line. */
ProblemConfig parse_config(const std::string& text);

/** Reads and parses a config file. */
ProblemConfig load_config(const std::string& path);

/**
 * Deterministic echo of every effective parameter, defaults included.  The
 * output is itself parseable config text, so a manifest reproduces its run.
 */
std::string manifest_text(const ProblemConfig& config);

} // namespace shapeflow

#pragma once

#include <string>
#include <vector>

#include "shapeflow/circle_overlap.hpp"
#include "shapeflow/optimize.hpp"
#include "shapeflow/pareto.hpp"
#include "shapeflow/shape_grid.hpp"

namespace shapeflow {

struct EnergyCsvRow {
    int k = 0;
    double t = 0.0;
    double e_pot = 0.0;
    double e_kin = 0.0;
    double e_tot = 0.0;
    double j1 = 0.0;
    double j2 = 0.0;
    double j3 = 0.0;
};

/**
 * One row per recorded step, columns k,t,e_pot,e_kin,e_tot,j1,j2,j3.  Doubles
 * are printed round-trip exactly, so re-reading reproduces the run verbatim;
 * requires the result to carry a full objective breakdown.
 */
void write_energy_csv(const OptimizerResult& result, const std::string& path);

std::vector<EnergyCsvRow> read_energy_csv(const std::string& path);

/** Front sweep export: weight,j1,j2,converged plus the coefficient columns. */
void write_front_csv(const std::vector<FrontPoint>& front, const std::string& path);

/**
 * True-scale vector rendering: the shape outline as one closed path, the
 * obstacle as one circle element, equal-aspect user units (meters), optional
 * interior mesh edges.
 */
void export_shape_svg(const MeshGrid& mesh, const ObstacleCircle& circle,
                      const std::string& path, bool draw_mesh_edges = false);

/** Writes text to path verbatim; IoError when the path cannot be written. */
void write_text_file(const std::string& path, const std::string& text);

/** Coefficient snapshot; the written file parses back bit-identically. */
void write_coefficients(const ShapeParams& params, const std::string& path);

ShapeParams read_coefficients(const std::string& path);

} // namespace shapeflow
